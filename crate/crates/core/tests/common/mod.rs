#![allow(dead_code)]

use minkorth::approximation::Subspace;
use minkorth::Gauge;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn triangle() -> Gauge {
    Gauge::polytope_h(vec![vec![0.0, -1.0], vec![-1.0, 1.0], vec![1.0, 1.0]]).unwrap()
}

pub fn triangle_v() -> Gauge {
    Gauge::polytope_v(vec![vec![0.0, 1.0], vec![-2.0, -1.0], vec![2.0, -1.0]]).unwrap()
}

pub fn shifted_disk() -> Gauge {
    Gauge::ellipsoid(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.5, 0.0]).unwrap()
}

/// Fixed polytope gauges used across suites.
pub fn polytope_zoo() -> Vec<(&'static str, Gauge)> {
    vec![
        ("triangle", triangle()),
        ("triangle_v", triangle_v()),
        ("square", Gauge::polytope_h(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap()),
        (
            "skew_pentagon_v",
            Gauge::polytope_v(vec![vec![1.0, 0.2], vec![0.3, 1.1], vec![-0.9, 0.6], vec![-0.7, -0.8], vec![0.4, -0.6]])
                .unwrap(),
        ),
        (
            "simplex_3d",
            Gauge::polytope_h(vec![
                vec![1.0, 1.0, 1.0],
                vec![-1.0, 0.0, 0.0],
                vec![0.0, -1.0, 0.0],
                vec![0.0, 0.0, -1.0],
            ])
            .unwrap(),
        ),
        ("scaled_triangle", triangle().scaled(2.5).unwrap()),
    ]
}

pub fn ellipsoid_zoo() -> Vec<(&'static str, Gauge)> {
    vec![
        ("euclidean_2d", Gauge::euclidean(2)),
        ("shifted_disk", shifted_disk()),
        ("tilted_ellipse", Gauge::ellipsoid(vec![vec![2.0, 0.7], vec![0.7, 0.5]], vec![-0.3, 0.4]).unwrap()),
        (
            "ellipsoid_3d",
            Gauge::ellipsoid(vec![vec![1.5, 0.2, 0.0], vec![0.2, 1.0, 0.3], vec![0.0, 0.3, 0.8]], vec![0.2, -0.3, 0.4])
                .unwrap(),
        ),
    ]
}

pub fn normal_vec(rng: &mut TestRng, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

fn unit_vec(rng: &mut TestRng, d: usize) -> Vec<f64> {
    loop {
        let v = normal_vec(rng, d);
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.iter().map(|a| a / n).collect();
        }
    }
}

/// Random H-polytope gauge with `m` normals of length in `[0.5, 2]`.
pub fn random_h(rng: &mut TestRng, d: usize, m: usize) -> Gauge {
    loop {
        let normals: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let r = rng.gen_range(0.5..2.0);
                unit_vec(rng, d).into_iter().map(|a| a * r).collect()
            })
            .collect();
        if let Ok(g) = Gauge::polytope_h(normals) {
            return g;
        }
    }
}

/// Random V-polytope gauge with `m` generators at radius `[0.5, 2]`.
pub fn random_v(rng: &mut TestRng, d: usize, m: usize) -> Gauge {
    loop {
        let vertices: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let r = rng.gen_range(0.5..2.0);
                unit_vec(rng, d).into_iter().map(|a| a * r).collect()
            })
            .collect();
        if let Ok(g) = Gauge::polytope_v(vertices) {
            return g;
        }
    }
}

/// Random ellipsoid gauge with the origin well inside.
pub fn random_ellipsoid(rng: &mut TestRng, d: usize) -> Gauge {
    let a: Vec<Vec<f64>> = (0..d).map(|_| normal_vec(rng, d)).collect();
    let q: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d).map(|j| (0..d).map(|k| a[k][i] * a[k][j]).sum::<f64>() + if i == j { 0.3 } else { 0.0 }).collect()
        })
        .collect();
    let dir = unit_vec(rng, d);
    let qn: f64 = (0..d).map(|i| (0..d).map(|j| dir[i] * q[i][j] * dir[j]).sum::<f64>()).sum();
    let t = rng.gen_range(0.0..0.8) / qn.sqrt();
    let c = dir.iter().map(|v| v * t).collect();
    Gauge::ellipsoid(q, c).unwrap()
}

pub fn random_polytope(rng: &mut TestRng, d: usize) -> Gauge {
    let m = rng.gen_range((d + 1).max(4)..=12);
    if rng.gen_bool(0.25) {
        random_v(rng, d, m)
    } else {
        random_h(rng, d, m)
    }
}

pub fn random_gauge(rng: &mut TestRng, d: usize) -> Gauge {
    let m = rng.gen_range((d + 1).max(4)..=12);
    match rng.gen_range(0..3) {
        0 => random_h(rng, d, m),
        1 => random_v(rng, d, m),
        _ => random_ellipsoid(rng, d),
    }
}

pub fn random_subspace(rng: &mut TestRng, d: usize) -> Subspace {
    let k = rng.gen_range(1..d);
    loop {
        if let Ok(u) = Subspace::new((0..k).map(|_| normal_vec(rng, d)).collect(), d) {
            return u;
        }
    }
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Proptest strategy: a seed plus a dimension, turned into a gauge by the
/// seeded generators above.
pub fn gauge_strategy(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Gauge, u64)> {
    (any::<u64>(), dims).prop_map(|(seed, d)| {
        let mut r = rng(seed);
        (random_gauge(&mut r, d), seed)
    })
}

pub fn polytope_strategy(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Gauge, u64)> {
    (any::<u64>(), dims).prop_map(|(seed, d)| {
        let mut r = rng(seed);
        (random_polytope(&mut r, d), seed)
    })
}

pub fn vec_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, d)
}

pub fn nonzero(v: &[f64]) -> bool {
    v.iter().map(|a| a * a).sum::<f64>() > 1e-4
}

/// A seeded gauge together with `n` vectors of matching dimension.
pub fn gauge_with_vecs(
    dims: std::ops::RangeInclusive<usize>,
    n: usize,
    polytopes_only: bool,
) -> impl Strategy<Value = (Gauge, Vec<Vec<f64>>)> {
    (any::<u64>(), dims).prop_flat_map(move |(seed, d)| {
        let mut r = rng(seed);
        let g = if polytopes_only { random_polytope(&mut r, d) } else { random_gauge(&mut r, d) };
        (Just(g), prop::collection::vec(vec_strategy(d), n))
    })
}

/// Fixed seed unless `PROPTEST_RNG_SEED` is set, so plain `cargo test` is
/// reproducible.
pub fn config(cases: u32) -> ProptestConfig {
    let base = ProptestConfig::default();
    let rng_seed =
        if std::env::var_os("PROPTEST_RNG_SEED").is_some() { base.rng_seed } else { RngSeed::Fixed(0x6d6b_6f72) };
    ProptestConfig { cases, failure_persistence: None, rng_seed, ..base }
}
