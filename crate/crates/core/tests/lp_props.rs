mod common;

use common::*;
use minkorth::lp::{
    solve_linear_fractional, solve_lp, Affine, Bound, HalfSpace, LinearProgram, LpOutcome, Region, Relation, Sense,
};
use minkorth::vector::dot;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

/// `max <c, x>` over `|x_i| <= 5`, `<a_j, x> <= b_j` with `b_j > 0`.
#[derive(Debug, Clone)]
struct Boxed {
    c: Vec<f64>,
    rows: Vec<(Vec<f64>, f64)>,
}

impl Boxed {
    fn all_rows(&self) -> Vec<(Vec<f64>, f64)> {
        let n = self.c.len();
        let mut rows = self.rows.clone();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            rows.push((e.clone(), 5.0));
            e[i] = -1.0;
            rows.push((e, 5.0));
        }
        rows
    }

    fn primal(&self, c: &[f64]) -> LinearProgram {
        self.all_rows()
            .into_iter()
            .fold(LinearProgram::new(Sense::Maximize, c.to_vec()).free(), |lp, (a, b)| lp.constrain(a, Relation::Le, b))
    }

    /// `min <b, y>` subject to `A^T y = c`, `y >= 0`.
    fn dual(&self) -> LinearProgram {
        let rows = self.all_rows();
        let b: Vec<f64> = rows.iter().map(|r| r.1).collect();
        (0..self.c.len()).fold(LinearProgram::new(Sense::Minimize, b), |lp, i| {
            lp.constrain(rows.iter().map(|r| r.0[i]).collect(), Relation::Eq, self.c[i])
        })
    }
}

fn boxed_strategy() -> impl Strategy<Value = Boxed> {
    (any::<u64>(), 2..=4usize, 0..=6usize).prop_map(|(seed, n, m)| {
        let mut r = rng(seed);
        let c = normal_vec(&mut r, n);
        let rows = (0..m).map(|_| (normal_vec(&mut r, n), r.gen_range(0.5..2.0))).collect();
        Boxed { c, rows }
    })
}

fn rank(rows: &[Vec<f64>], n: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]).rank(1e-8)
}

/// All vertices of a bounded planar polygon `<n_i, x> >= o_i`.
fn polygon_vertices(rows: &[HalfSpace]) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (a.offset * b.normal[1] - b.offset * a.normal[1]) / det;
            let y = (a.normal[0] * b.offset - b.normal[0] * a.offset) / det;
            let p = vec![x, y];
            if rows.iter().all(|h| dot(&h.normal, &p) >= h.offset - 1e-9) {
                out.push(p);
            }
        }
    }
    out
}

fn extrema_over(points: &[Vec<f64>], num: &Affine, den: &Affine) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let r = num.at(p) / den.at(p);
        (lo.min(r), hi.max(r))
    })
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn strong_duality(p in boxed_strategy()) {
        let (v, _) = solve_lp(&p.primal(&p.c)).unwrap().optimal().expect("bounded and feasible");
        let (w, y) = solve_lp(&p.dual()).unwrap().optimal().expect("dual feasible");
        prop_assert!((v - w).abs() <= 1e-8 * (1.0 + v.abs()), "{v} vs {w}");
        prop_assert!(y.iter().all(|&t| t >= -1e-12));
    }

    #[test]
    fn optimum_is_a_feasible_vertex(p in boxed_strategy()) {
        let n = p.c.len();
        let (v, x) = solve_lp(&p.primal(&p.c)).unwrap().optimal().unwrap();
        prop_assert!((dot(&p.c, &x) - v).abs() < 1e-9 * (1.0 + v.abs()));
        let rows = p.all_rows();
        for (a, b) in &rows {
            prop_assert!(dot(a, &x) <= b + 1e-9);
        }
        let active: Vec<Vec<f64>> =
            rows.iter().filter(|(a, b)| (dot(a, &x) - b).abs() <= 1e-9).map(|r| r.0.clone()).collect();
        prop_assert_eq!(rank(&active, n), n);
    }

    #[test]
    fn small_objective_perturbation(p in boxed_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let delta: Vec<f64> = normal_vec(&mut r, p.c.len()).into_iter().map(|t| 1e-10 * t).collect();
        let c2: Vec<f64> = p.c.iter().zip(&delta).map(|(a, b)| a + b).collect();
        let (v1, _) = solve_lp(&p.primal(&p.c)).unwrap().optimal().unwrap();
        let (v2, _) = solve_lp(&p.primal(&c2)).unwrap().optimal().unwrap();
        // |x_i| <= 5 bounds the change by 5 |delta|_1
        let bound = 5.0 * delta.iter().map(|t| t.abs()).sum::<f64>();
        prop_assert!((v1 - v2).abs() <= bound + 1e-11, "{v1} vs {v2}");
    }

    #[test]
    fn fractional_over_hull_matches_generators(seed in any::<u64>(), d in 2..=4usize, m in 3..=9usize) {
        let mut r = rng(seed);
        let generators: Vec<Vec<f64>> = (0..m).map(|_| normal_vec(&mut r, d)).collect();
        let num = Affine { coeffs: normal_vec(&mut r, d), constant: r.gen_range(-1.0..1.0) };
        let dc = normal_vec(&mut r, d);
        let reach = generators.iter().map(|g| dot(&dc, g).abs()).fold(0.0, f64::max);
        let den = Affine { coeffs: dc, constant: reach + r.gen_range(0.1..2.0) };
        let region = Region::Hull { generators: generators.clone(), cuts: vec![] };
        let ex = solve_linear_fractional(&num, &den, &region).unwrap();
        let (lo, hi) = extrema_over(&generators, &num, &den);
        prop_assert!((ex.min - lo).abs() <= 1e-9 * (1.0 + lo.abs()), "{} vs {lo}", ex.min);
        prop_assert!((ex.max - hi).abs() <= 1e-9 * (1.0 + hi.abs()), "{} vs {hi}", ex.max);
        prop_assert!((num.at(&ex.argmin) / den.at(&ex.argmin) - ex.min).abs() <= 1e-9 * (1.0 + lo.abs()));
        prop_assert!((num.at(&ex.argmax) / den.at(&ex.argmax) - ex.max).abs() <= 1e-9 * (1.0 + hi.abs()));
    }

    #[test]
    fn fractional_over_polygon_matches_vertices(seed in any::<u64>(), m in 0..=5usize) {
        let mut r = rng(seed);
        let mut rows: Vec<HalfSpace> = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
            .iter()
            .map(|n| HalfSpace { normal: n.to_vec(), offset: -2.0 })
            .collect();
        for _ in 0..m {
            rows.push(HalfSpace { normal: normal_vec(&mut r, 2), offset: -r.gen_range(0.3..1.5) });
        }
        let num = Affine { coeffs: normal_vec(&mut r, 2), constant: r.gen_range(-1.0..1.0) };
        let dc = normal_vec(&mut r, 2);
        let den = Affine { constant: 2.0 * (dc[0].abs() + dc[1].abs()) + 0.5, coeffs: dc };
        let verts = polygon_vertices(&rows);
        let ex = solve_linear_fractional(&num, &den, &Region::Halfspaces { dim: 2, rows }).unwrap();
        let (lo, hi) = extrema_over(&verts, &num, &den);
        prop_assert!((ex.min - lo).abs() <= 1e-9 * (1.0 + lo.abs()), "{} vs {lo}", ex.min);
        prop_assert!((ex.max - hi).abs() <= 1e-9 * (1.0 + hi.abs()), "{} vs {hi}", ex.max);
    }
}

#[test]
fn separable_box() {
    let b = [1.5, 0.25, 3.0];
    let lp = (0..3).fold(LinearProgram::new(Sense::Maximize, vec![1.0; 3]), |lp, i| {
        let mut e = vec![0.0; 3];
        e[i] = 1.0;
        lp.constrain(e, Relation::Le, b[i])
    });
    let (v, x) = solve_lp(&lp).unwrap().optimal().unwrap();
    assert!((v - 4.75).abs() < 1e-12);
    assert!(close(&x, &b, 1e-12));
}

#[test]
fn simplex_corner() {
    // min <c, x> over the probability simplex picks the smallest coefficient
    let lp = LinearProgram::new(Sense::Minimize, vec![3.0, -1.0, 2.0, -0.5]).constrain(vec![1.0; 4], Relation::Eq, 1.0);
    let (v, x) = solve_lp(&lp).unwrap().optimal().unwrap();
    assert_eq!(v, -1.0);
    assert!(close(&x, &[0.0, 1.0, 0.0, 0.0], 1e-12));
}

#[test]
fn infeasible_and_unbounded() {
    let lp = LinearProgram::new(Sense::Maximize, vec![1.0]).constrain(vec![1.0], Relation::Ge, 1.0).constrain(
        vec![1.0],
        Relation::Le,
        0.0,
    );
    assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Infeasible);
    let lp = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0]).constrain(vec![1.0, -1.0], Relation::Le, 1.0);
    assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Unbounded);
    let lp = LinearProgram::new(Sense::Minimize, vec![1.0]).with_bounds(vec![Bound::Free]);
    assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Unbounded);
}
