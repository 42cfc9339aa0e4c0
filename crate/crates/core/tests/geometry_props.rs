mod common;

use common::*;
use minkorth::geometry::{
    bisector_sample, boundary_reversal_check_2d, cone_membership, rotundity_check, section2d, smoothness_check,
    unique_bisector_guarantee, Cone,
};
use minkorth::orthogonality::{
    birkhoff_slack, birkhoff_test, isosceles_alpha_interval, isosceles_test, left_alpha_interval, right_alpha_interval,
};
use minkorth::vector::{add, axpy, dot, lin, neg, norm, scale, sub};
use minkorth::Gauge;
use proptest::prelude::*;

fn strictly(g: &Gauge, x: &[f64], y: &[f64], holds: bool) -> Option<bool> {
    let s = birkhoff_slack(g, x, y, 0.0).unwrap();
    let tol = 1e-7 * (1.0 + g.eval(x).unwrap());
    if s.abs() <= tol {
        None
    } else {
        Some((s > 0.0) == holds)
    }
}

/// `(y1, y2)` with `x` orthogonal to both but not to `y1 + y2 = x`, built
/// from two distinct subgradients `a`, `b` at `x`.
fn additivity_breakers(x: &[f64], a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let v = axpy(a, -dot(a, b) / dot(b, b), b);
    let t = dot(a, x) / dot(a, &v);
    (axpy(x, -t, &v), scale(&v, t))
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn ellipsoids_are_smooth_and_rotund(seed in any::<u64>(), d in 2..=4usize) {
        let mut r = rng(seed);
        let g = random_ellipsoid(&mut r, d);
        let x = normal_vec(&mut r, d);
        let y = normal_vec(&mut r, d);
        let z = normal_vec(&mut r, d);
        prop_assert!(smoothness_check(&g).unwrap().smooth);
        prop_assert!(rotundity_check(&g).unwrap().rotund);
        prop_assert!(right_alpha_interval(&g, &x, &y, 0.0).unwrap().width() <= 1e-8);
        prop_assert!(left_alpha_interval(&g, &x, &y, 0.0).unwrap().width() <= 1e-6);
        // right additivity on orthogonalized pairs
        let ay = right_alpha_interval(&g, &x, &y, 0.0).unwrap().midpoint();
        let az = right_alpha_interval(&g, &x, &z, 0.0).unwrap().midpoint();
        let (y1, z1) = (lin(ay, &x, &y), lin(az, &x, &z));
        prop_assert!(birkhoff_test(&g, &x, &add(&y1, &z1), 0.0).unwrap());
        // unique maximizer of a functional over the ball
        let u = normal_vec(&mut r, d);
        // the polar gauge's subdifferential at the origin is the ball itself
        let dual = g.polar_gauge().unwrap();
        let o = dual.subdifferential(&vec![0.0; d], 0.0).unwrap();
        let p = o.extreme_point(&u).unwrap();
        let (lo, hi) = o.value_interval(&u).unwrap();
        prop_assert!((dot(&p, &u) - hi).abs() <= 1e-8 * (1.0 + hi.abs()));
        prop_assert!(lo <= hi);
        // a second maximizer would lie on a segment of the sphere
        let q = o.extreme_point(&axpy(&u, 1e-6, &normal_vec(&mut r, d))).unwrap();
        prop_assert!(norm(&sub(&p, &q)) < 1e-3);
    }

    #[test]
    fn polytopes_are_neither_smooth_nor_rotund(seed in any::<u64>(), d in 2..=3usize) {
        let mut r = rng(seed);
        let g = random_polytope(&mut r, d);
        let s = smoothness_check(&g).unwrap();
        prop_assert!(!s.smooth);
        let (x, a, b) = s.witness.unwrap();
        let o = g.subdifferential(&x, 0.0).unwrap();
        prop_assert!(o.contains(&a, 1e-7).unwrap() && o.contains(&b, 1e-7).unwrap());
        // a direction separating the two subgradients opens the right interval
        let w = sub(&a, &b);
        prop_assert!(right_alpha_interval(&g, &x, &w, 0.0).unwrap().width() > 1e-6);
        let (y1, y2) = additivity_breakers(&x, &a, &b);
        prop_assert!(birkhoff_test(&g, &x, &y1, 0.0).unwrap());
        prop_assert!(birkhoff_test(&g, &x, &y2, 0.0).unwrap());
        prop_assert!(!birkhoff_test(&g, &x, &add(&y1, &y2), 0.0).unwrap());

        let rt = rotundity_check(&g).unwrap();
        prop_assert!(!rt.rotund);
        let (p, q) = rt.witness.unwrap();
        for t in [0.0, 0.25, 0.5, 1.0] {
            prop_assert!((g.eval(&lin(t, &sub(&q, &p), &p)).unwrap() - 1.0).abs() < 1e-8);
        }
        let iv = left_alpha_interval(&g, &sub(&q, &p), &p, 0.0).unwrap();
        prop_assert!(iv.lo <= 1e-8 && iv.hi >= 1.0 - 1e-8, "{iv:?}");
        // the facet functional is maximized at both ends
        let m = lin(0.5, &sub(&q, &p), &p);
        let f = g.subdifferential(&m, 0.0).unwrap().extreme_point(&m).unwrap();
        prop_assert!((dot(&f, &p) - 1.0).abs() < 1e-8 && (dot(&f, &q) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn unimodality(
        (g, vs) in gauge_with_vecs(2..=4, 3, false),
        lam in 0.01..0.99f64,
    ) {
        let (x, y, z) = (&vs[0], &vs[1], &vs[2]);
        let w = lin(lam, y, &scale(z, 1.0 - lam));
        let (a, b, c) = (g.eval(&sub(&w, x)).unwrap(), g.eval(&sub(y, x)).unwrap(), g.eval(&sub(z, x)).unwrap());
        let m = b.max(c);
        prop_assert!(a <= m + 1e-9);
        if (a - m).abs() <= 1e-9 {
            prop_assert!((a - b).abs() < 1e-7 && (a - c).abs() < 1e-7);
        }
    }

    #[test]
    fn cone_intersection_lies_on_the_bisector(
        seed in any::<u64>(),
        d in 2..=3usize,
        c in 0.05..0.5f64,
        extra in 0.0..3.0f64,
        mu in 0.0..1.0f64,
    ) {
        // z - x and z + x on the same ray set of an exposed face
        let mut r = rng(seed);
        let g = random_polytope(&mut r, d);
        let (p, q) = rotundity_check(&g).unwrap().witness.unwrap();
        let e = sub(&q, &p);
        let m = lin(0.5, &e, &p);
        let xs = g.subdifferential(&m, 0.0).unwrap().extreme_point(&m).unwrap();
        let x = scale(&e, c);
        let s = 2.0 * c + extra;
        let w1 = axpy(&p, mu * (1.0 - 2.0 * c / s), &e);
        let z = axpy(&x, s, &w1);
        let cm = Cone::new(&g, neg(&x), xs.clone()).unwrap();
        let cp = Cone::new(&g, x.clone(), xs).unwrap();
        prop_assert!(cone_membership(&g, &cm, &z).unwrap());
        prop_assert!(cone_membership(&g, &cp, &z).unwrap());
        prop_assert!(isosceles_test(&g, &z, &x).unwrap());
    }

    #[test]
    fn guarantee_implies_unique_bisector_point(seed in any::<u64>(), d in 2..=3usize) {
        let mut r = rng(seed);
        let g = random_gauge(&mut r, d);
        let x = normal_vec(&mut r, d);
        let y = normal_vec(&mut r, d);
        if unique_bisector_guarantee(&g, &x, &y).unwrap() {
            prop_assert!(isosceles_alpha_interval(&g, &x, &y).unwrap().width() <= 1e-8);
        }
    }

    #[test]
    fn sections_lie_on_the_sphere(seed in any::<u64>(), d in 2..=3usize) {
        let mut r = rng(seed);
        let g = random_gauge(&mut r, d);
        let x = normal_vec(&mut r, d);
        let y = normal_vec(&mut r, d);
        let sec = section2d(&g, &x, &y, 360).unwrap();
        prop_assert!(sec.boundary.len() >= 3);
        for p in &sec.boundary {
            prop_assert!(p[1] >= -1e-12);
            prop_assert!((g.eval(&sec.lift(*p)).unwrap() - 1.0).abs() < 1e-8);
        }
        let first = sec.boundary.first().unwrap();
        let last = sec.boundary.last().unwrap();
        prop_assert!(first[1].abs() < 1e-12 && first[0] > 0.0);
        prop_assert!(last[1].abs() < 1e-12 && last[0] < 0.0);
    }

    #[test]
    fn reversal_holds_on_planar_gauges(seed in any::<u64>(), kappa in 0.2..5.0f64) {
        let mut r = rng(seed);
        let g = random_gauge(&mut r, 2);
        let a = boundary_reversal_check_2d(&g, 240).unwrap();
        prop_assert!(a.max_slack <= 1e-7, "{a:?}");
        let b = boundary_reversal_check_2d(&g.scaled(kappa).unwrap(), 240).unwrap();
        prop_assert!((a.max_slack - b.max_slack).abs() <= 1e-9);
    }
}

#[test]
fn theorem_grid_over_zoo() {
    let dirs: Vec<f64> = (0..20).map(|i| std::f64::consts::TAU * i as f64 / 20.0).collect();
    for (name, g) in polytope_zoo().into_iter().chain(ellipsoid_zoo()).filter(|(_, g)| g.dim() == 2) {
        for &s in &dirs {
            for &t in &dirs {
                let (x, y) = ([s.cos(), s.sin()], [1.3 * t.cos(), 0.7 * t.sin()]);
                if (x[0] * y[1] - x[1] * y[0]).abs() < 1e-3 {
                    continue;
                }
                if unique_bisector_guarantee(&g, &x, &y).unwrap() {
                    let w = isosceles_alpha_interval(&g, &x, &y).unwrap().width();
                    assert!(w <= 1e-8, "{name}: width {w} at {x:?} {y:?}");
                }
            }
        }
    }
}

#[test]
fn triangle_cone_example() {
    let g = triangle();
    let x = [1.0, 0.0];
    let cm = Cone::new(&g, neg(&x), vec![0.0, -1.0]).unwrap();
    let cp = Cone::new(&g, x.to_vec(), vec![0.0, -1.0]).unwrap();
    let z = [0.0, -2.0];
    assert!(cone_membership(&g, &cm, &z).unwrap() && cone_membership(&g, &cp, &z).unwrap());
    assert!(isosceles_test(&g, &z, &x).unwrap());
    assert!(cone_membership(&g, &cp, &x).unwrap());
}

#[test]
fn triangle_left_additivity_fails() {
    // left-orthogonal points come from the midpoints of left intervals
    let g = triangle();
    let dirs: Vec<Vec<f64>> = (0..16)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 16.0 + 0.05;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let mut found = None;
    'outer: for z in &dirs {
        let orth: Vec<Vec<f64>> = dirs
            .iter()
            .filter(|w| (z[0] * w[1] - z[1] * w[0]).abs() >= 1e-3)
            .map(|w| lin(left_alpha_interval(&g, z, w, 0.0).unwrap().midpoint(), z, w))
            .collect();
        for x in &orth {
            for y in &orth {
                if strictly(&g, &add(x, y), z, false) == Some(true) {
                    found = Some((x.clone(), y.clone(), z.clone()));
                    break 'outer;
                }
            }
        }
    }
    let (x, y, z) = found.expect("left-additivity witness");
    assert!(birkhoff_test(&g, &x, &z, 0.0).unwrap());
    assert!(birkhoff_test(&g, &y, &z, 0.0).unwrap());
    assert!(!birkhoff_test(&g, &add(&x, &y), &z, 0.0).unwrap());
}

#[test]
fn bisector_of_the_circle_is_the_orthogonal_line() {
    let g = Gauge::euclidean(2);
    let dirs = vec![vec![0.0, 1.0], vec![1.0, 1.0], vec![-2.0, 0.5]];
    for b in bisector_sample(&g, &[1.0, 0.0], &dirs).unwrap() {
        assert!(b.interval.is_degenerate());
        assert!(b.points.0[0].abs() < 1e-9);
    }
}
