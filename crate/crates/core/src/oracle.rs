//! Brute-force reference routines for tests. They only call
//! [`Gauge::eval`], never the LP kernel or the main-path searches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gauge::Gauge;

/// Sample points: a tensor grid over a box plus seeded uniform draws.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub bounds: Vec<(f64, f64)>,
    pub resolution: Vec<usize>,
    pub seed: u64,
    /// Number of extra uniform samples drawn from the box.
    pub random: usize,
}

/// Tensor grids larger than this are thinned to the random draws only.
const MAX_TENSOR: usize = 1 << 16;

impl GridSpec {
    pub fn new(bounds: Vec<(f64, f64)>, resolution: Vec<usize>, seed: u64, random: usize) -> Result<Self> {
        if bounds.len() != resolution.len() || bounds.is_empty() {
            return Err(Error::Domain("one bound and one resolution per axis".into()));
        }
        if bounds.iter().any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::Domain("grid bounds must be finite and increasing".into()));
        }
        if resolution.iter().any(|&r| r < 16) {
            return Err(Error::Domain("grid resolution must be at least 16".into()));
        }
        Ok(GridSpec { bounds, resolution, seed, random })
    }

    /// `[-r, r]^d` with `res` points per axis.
    pub fn cube(d: usize, r: f64, res: usize, seed: u64, random: usize) -> Result<Self> {
        GridSpec::new(vec![(-r, r); d], vec![res; d], seed, random)
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let d = self.bounds.len();
        let total = self.resolution.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r));
        let mut out = Vec::new();
        if let Some(total) = total.filter(|&t| t <= MAX_TENSOR) {
            out.reserve(total + self.random);
            for idx in 0..total {
                let mut rem = idx;
                let mut p = Vec::with_capacity(d);
                for ((a, b), &r) in self.bounds.iter().zip(&self.resolution) {
                    p.push(a + (b - a) * (rem % r) as f64 / (r - 1) as f64);
                    rem /= r;
                }
                out.push(p);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random {
            out.push(self.bounds.iter().map(|&(a, b)| rng.gen_range(a..=b)).collect());
        }
        out
    }
}

/// `(argmin, min)` of `f` on `[a, b]`: a dense scan followed by repeated
/// rescans of the cell around the best sample.
pub fn brute_min_1d(f: impl Fn(f64) -> f64, bracket: (f64, f64), resolution: usize) -> (f64, f64) {
    let (mut a, mut b) = bracket;
    let n = resolution.max(16);
    let mut best = (a, f(a));
    for _ in 0..200 {
        let h = (b - a) / (n - 1) as f64;
        for i in 0..n {
            let t = a + h * i as f64;
            let v = f(t);
            if v < best.1 {
                best = (t, v);
            }
        }
        let lo = (best.0 - h).max(bracket.0);
        let hi = (best.0 + h).min(bracket.1);
        if hi - lo <= 1e-13 * (1.0 + best.0.abs()) {
            break;
        }
        a = lo;
        b = hi;
    }
    best
}

/// Checks `<x*, y - x> <= gamma(y) - gamma(x) + eps` at every grid point
/// and at a few points on the ray of `x`.
pub fn brute_subgradient_check(g: &Gauge, x: &[f64], eps: f64, xstar: &[f64], grid: &GridSpec) -> Result<bool> {
    let gx = g.eval(x)?;
    let mut ys = grid.points();
    for t in [0.0, 0.5, 2.0, -1.0, 10.0] {
        ys.push(x.iter().map(|v| t * v).collect());
    }
    for y in &ys {
        let gy = g.eval(y)?;
        let lhs: f64 = xstar.iter().zip(y.iter().zip(x)).map(|(s, (a, b))| s * (a - b)).sum();
        if lhs > gy - gx + eps + 1e-9 * (1.0 + gy + gx) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::tests::triangle;

    #[test]
    fn one_dimensional_minima() {
        let g = triangle();
        let (l, v) = brute_min_1d(|l| g.eval(&[l, 1.0]).unwrap(), (-5.0, 5.0), 64);
        assert!(l.abs() < 1e-8 && (v - 1.0).abs() < 1e-12);
        let (l, v) = brute_min_1d(|l| (l - 2.0) * (l - 2.0), (-5.0, 5.0), 64);
        assert!((l - 2.0).abs() < 1e-6 && v < 1e-12);
        let (x, y) = ([1.0, 2.0], [3.0, -1.0]);
        let e = Gauge::euclidean(2);
        let (l, _) = brute_min_1d(|l| e.eval(&[x[0] + l * y[0], x[1] + l * y[1]]).unwrap(), (-10.0, 10.0), 64);
        assert!((l + 0.1).abs() < 1e-6);
    }

    #[test]
    fn subgradient_examples() {
        let g = triangle();
        let grid = GridSpec::cube(2, 4.0, 33, 7, 200).unwrap();
        assert!(brute_subgradient_check(&g, &[0.0, 1.0], 0.0, &[0.0, 1.0], &grid).unwrap());
        assert!(!brute_subgradient_check(&g, &[0.0, 1.0], 0.0, &[0.0, 1.01], &grid).unwrap());
        assert!(brute_subgradient_check(&g, &[0.0, 1.0], 1.0, &[0.0, 0.0], &grid).unwrap());
        assert!(GridSpec::cube(2, 1.0, 8, 0, 0).is_err());
    }
}
