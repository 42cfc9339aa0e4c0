//! epsilon-Birkhoff and isosceles orthogonality, the alpha-intervals they
//! induce, duality mappings and semi-inner products.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::{Backend, Gauge, SubdifferentialOracle};
use crate::lp::{solve_linear_fractional, Affine, HalfSpace, Region};
use crate::search::{bisect, golden_min};
use crate::vector::{add, axpy, check_dim, dot, is_zero, lin, neg, scale, sub};

/// Intervals narrower than this (relative) are reported as a single point.
pub const ALPHA_RESOLUTION: f64 = 1e-10;

/// A closed interval of scalars, optionally with dual witnesses at the ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaInterval {
    pub lo: f64,
    pub hi: f64,
    pub certificates: Option<(Vec<f64>, Vec<f64>)>,
}

impl AlphaInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        if hi - lo <= ALPHA_RESOLUTION * (1.0 + lo.abs().max(hi.abs())) {
            let m = 0.5 * (lo + hi);
            AlphaInterval { lo: m, hi: m, certificates: None }
        } else {
            AlphaInterval { lo, hi, certificates: None }
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, a: f64, tol: f64) -> bool {
        a >= self.lo - tol && a <= self.hi + tol
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

fn tol_for(g: &Gauge, scale: f64) -> f64 {
    g.tolerances().exact * (1.0 + scale)
}

/// `(argmin, min)` of `l -> gamma(x + l y)`.
pub fn line_minimum(g: &Gauge, x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    check_dim(g.dim(), x)?;
    check_dim(g.dim(), y)?;
    Ok(line_min(g, x, y))
}

fn line_min(g: &Gauge, x: &[f64], y: &[f64]) -> (f64, f64) {
    let gx = g.value(x);
    if is_zero(y) || is_zero(x) {
        return (0.0, gx);
    }
    // outside |l| <= r the value exceeds gamma(x)
    let r = (gx + g.value(&neg(x))) / g.value(y).min(g.value(&neg(y)));
    let (l, v) = golden_min(|l| g.value(&axpy(x, l, y)), -r, r, 1e-13 * r, 400);
    if v < gx {
        (l, v)
    } else {
        (0.0, gx)
    }
}

/// `min_l gamma(x + l y) - gamma(x) + eps`; non-negative exactly when
/// `x` is epsilon-Birkhoff orthogonal to `y`.
pub fn birkhoff_slack(g: &Gauge, x: &[f64], y: &[f64], eps: f64) -> Result<f64> {
    check_dim(g.dim(), x)?;
    check_dim(g.dim(), y)?;
    check_eps(eps)?;
    Ok(slack(g, x, y, eps))
}

fn slack(g: &Gauge, x: &[f64], y: &[f64], eps: f64) -> f64 {
    line_min(g, x, y).1 - g.value(x) + eps
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::Domain("epsilon must be finite and non-negative".into()));
    }
    Ok(())
}

/// `x` is epsilon-Birkhoff orthogonal to `y`: `gamma(x) <= gamma(x + l y) + eps`
/// for all real `l`.
pub fn birkhoff_test(g: &Gauge, x: &[f64], y: &[f64], eps: f64) -> Result<bool> {
    let s = birkhoff_slack(g, x, y, eps)?;
    Ok(s >= -tol_for(g, g.value(x)))
}

#[derive(Debug, Clone, Serialize)]
pub struct DualBirkhoff {
    pub holds: bool,
    /// An element of the epsilon-subdifferential annihilating `y`.
    pub certificate: Option<Vec<f64>>,
    /// `-gamma'_eps(x; -y)`
    pub lower: f64,
    /// `gamma'_eps(x; y)`
    pub upper: f64,
}

/// Birkhoff orthogonality through the subdifferential: the values of
/// `<., y>` over the epsilon-subdifferential at `x` straddle zero.
pub fn birkhoff_dual_test(g: &Gauge, x: &[f64], y: &[f64], eps: f64) -> Result<DualBirkhoff> {
    check_dim(g.dim(), y)?;
    let o = g.subdifferential(x, eps)?;
    let gx = g.value(x);
    if eps >= gx {
        return Err(Error::Domain("epsilon must be smaller than gamma(x)".into()));
    }
    let (lower, upper) = o.value_interval(y)?;
    let tol = tol_for(g, g.value(y).max(g.value(&neg(y))));
    let holds = lower <= tol && upper >= -tol;
    let certificate = if holds {
        let p = o.extreme_point(y)?;
        let m = o.extreme_point(&neg(y))?;
        let (a, b) = (dot(&p, y), dot(&m, y));
        Some(if a <= 0.0 {
            p
        } else if b >= 0.0 {
            m
        } else {
            let t = -b / (a - b);
            lin(t, &p, &scale(&m, 1.0 - t))
        })
    } else {
        None
    };
    Ok(DualBirkhoff { holds, certificate, lower, upper })
}

fn right_preconditions(g: &Gauge, x: &[f64], y: &[f64], eps: f64) -> Result<f64> {
    check_dim(g.dim(), x)?;
    check_dim(g.dim(), y)?;
    check_eps(eps)?;
    if is_zero(x) {
        return Err(Error::Domain("x must be non-zero".into()));
    }
    let gx = g.value(x);
    if eps >= gx {
        return Err(Error::Domain("epsilon must be smaller than gamma(x)".into()));
    }
    Ok(gx)
}

/// Upper bound on `|alpha|` for the right interval.
pub fn right_interval_bound(g: &Gauge, x: &[f64], y: &[f64], eps: f64) -> Result<f64> {
    let gx = right_preconditions(g, x, y, eps)?;
    Ok(g.value(y).max(g.value(&neg(y))) / (gx - eps))
}

/// `{alpha : x is eps-Birkhoff orthogonal to alpha x + y}`, with normalized
/// dual witnesses at both ends.
pub fn right_alpha_interval(g: &Gauge, x: &[f64], y: &[f64], eps: f64) -> Result<AlphaInterval> {
    let gx = right_preconditions(g, x, y, eps)?;
    let cut = HalfSpace { normal: x.to_vec(), offset: gx - eps };
    let region = match g.backend() {
        Backend::PolytopeH { normals } => Some(Region::Hull { generators: normals.clone(), cuts: vec![cut] }),
        Backend::PolytopeV { vertices } => {
            let mut rows: Vec<HalfSpace> =
                vertices.iter().map(|v| HalfSpace { normal: neg(v), offset: -1.0 }).collect();
            rows.push(cut);
            Some(Region::Halfspaces { dim: g.dim(), rows })
        }
        Backend::Ellipsoid(_) => None,
    };
    let normalize = |p: Vec<f64>| {
        let s = g.polar_value(&p);
        scale(&p, 1.0 / s)
    };
    if let Some(region) = region {
        let num = Affine::linear(neg(y));
        let den = Affine::linear(x.to_vec());
        let r = solve_linear_fractional(&num, &den, &region)?;
        let mut out = AlphaInterval::new(r.min, r.max);
        out.certificates = Some((normalize(r.argmin), normalize(r.argmax)));
        return Ok(out);
    }

    // Smooth backend: alpha is inside iff gamma'_eps(x; +-(alpha x + y)) >= 0.
    // Both are monotone in alpha, so each end is a root.
    let o = g.subdifferential(x, eps)?;
    let bound = g.value(y).max(g.value(&neg(y))) / (gx - eps);
    let outer = bound * (1.0 + 1e-6) + 1e-12;
    let seed = o.extreme_point(x)?;
    let a0 = -dot(&seed, y) / dot(&seed, x);
    let up = |a: f64| o.support(&lin(a, x, y)).map(|v| v >= 0.0).unwrap_or(false);
    let down = |a: f64| o.support(&neg(&lin(a, x, y))).map(|v| v >= 0.0).unwrap_or(false);
    let res = 1e-14 * (1.0 + bound);
    let lo = bisect(up, a0, -outer.max(a0.abs() + 1.0), res);
    let hi = bisect(down, a0, outer.max(a0.abs() + 1.0), res);
    let mut out = AlphaInterval::new(lo, hi);
    let wl = o.extreme_point(&lin(out.lo, x, y))?;
    let wh = o.extreme_point(&neg(&lin(out.hi, x, y)))?;
    out.certificates = Some((normalize(wl), normalize(wh)));
    Ok(out)
}

/// The right interval located from the primal predicate alone: an interior
/// point by maximizing the Birkhoff slack, then bisection on `birkhoff_test`
/// from the a-priori bound.
pub fn right_alpha_interval_bisection(g: &Gauge, x: &[f64], y: &[f64], eps: f64) -> Result<AlphaInterval> {
    let gx = right_preconditions(g, x, y, eps)?;
    let bound = g.value(y).max(g.value(&neg(y))) / (gx - eps);
    let s = |a: f64| slack(g, x, &lin(a, x, y), eps);
    let tol = tol_for(g, gx);
    let (seed, best) = golden_min(|a| -s(a), -bound, bound, 1e-13 * (1.0 + bound), 400);
    if -best < -tol {
        return Err(Error::Numerical("no interior point found for the right interval".into()));
    }
    // the slack can be flat near the ends; a loose cutoff widens the interval
    let cutoff = 1e-12 * (1.0 + gx);
    let inside = |a: f64| s(a) >= -cutoff;
    let outer = bound * (1.0 + 1e-6) + 1e-12;
    let res = 1e-13 * (1.0 + bound);
    let lo = bisect(inside, seed, -outer, res);
    let hi = bisect(inside, seed, outer, res);
    Ok(AlphaInterval::new(lo, hi))
}

/// inf of the set where a false-then-true predicate holds.
fn first_true(pred: impl Fn(f64) -> bool, guess: f64, step: f64, res: f64) -> Result<f64> {
    let mut h = step;
    if pred(guess) {
        for _ in 0..200 {
            let a = guess - h;
            if !pred(a) {
                return Ok(bisect(&pred, guess, a, res));
            }
            h *= 2.0;
        }
    } else {
        for _ in 0..200 {
            let a = guess + h;
            if pred(a) {
                return Ok(bisect(&pred, a, guess, res));
            }
            h *= 2.0;
        }
    }
    Err(Error::Numerical("interval endpoint search did not terminate".into()))
}

/// sup of the set where a true-then-false predicate holds.
fn last_true(pred: impl Fn(f64) -> bool, guess: f64, step: f64, res: f64) -> Result<f64> {
    first_true(|a| pred(-a), -guess, step, res).map(|a| -a)
}

/// `{alpha : gamma(alpha x + y) <= min_l gamma(l x + y) + eps}`, i.e. the
/// alphas for which `alpha x + y` is eps-Birkhoff orthogonal to `x`.
pub fn left_alpha_interval(g: &Gauge, x: &[f64], y: &[f64], eps: f64) -> Result<AlphaInterval> {
    check_dim(g.dim(), x)?;
    check_dim(g.dim(), y)?;
    check_eps(eps)?;
    if is_zero(x) {
        return Err(Error::Domain("x must be non-zero".into()));
    }
    let k = |a: f64| g.value(&lin(a, x, y));
    let gx = g.value(x).min(g.value(&neg(x)));
    let r = (g.value(y) + g.value(&neg(y))) / gx;
    let (am, m) = if r == 0.0 { (0.0, k(0.0)) } else { golden_min(k, -r, r, 1e-13 * r, 400) };
    let step = r.max(1e-3);
    let res = 1e-13 * (1.0 + r);
    let (lo, hi) = if eps > 0.0 {
        let level = |a: f64| k(a) <= m + eps;
        (first_true(level, am, step, res)?, last_true(level, am, step, res)?)
    } else {
        // one-sided slopes of k straddle zero exactly on the argmin
        let tau = 1e-12 * (g.value(x) + g.value(&neg(x)));
        let nx = neg(x);
        let right = |a: f64| g.dd_value(&lin(a, x, y), x, 0.0).map(|v| v >= -tau).unwrap_or(false);
        let left = |a: f64| g.dd_value(&lin(a, x, y), &nx, 0.0).map(|v| v >= -tau).unwrap_or(false);
        (first_true(right, am, step, res)?, last_true(left, am, step, res)?)
    };
    Ok(AlphaInterval::new(lo, hi))
}

/// Weight functions for duality mappings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Weight {
    ConstantOne,
    Identity,
    Power(f64),
}

impl Weight {
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Domain("power weight needs p > 0".into()));
        }
        Ok(Weight::Power(p))
    }

    pub fn phi(&self, t: f64) -> f64 {
        match self {
            Weight::ConstantOne => 1.0,
            Weight::Identity => t,
            Weight::Power(p) => t.powf(*p),
        }
    }

    /// `psi(t) = int_0^t phi`.
    pub fn psi(&self, t: f64) -> f64 {
        match self {
            Weight::ConstantOne => t,
            Weight::Identity => 0.5 * t * t,
            Weight::Power(p) => t.powf(p + 1.0) / (p + 1.0),
        }
    }
}

/// `J(x) = phi(gamma(x)) * subdifferential(x)`. At the origin this is
/// `phi(0)` times the polar ball, which is `{0}` for `phi(0) = 0`.
pub fn duality_map<'g>(g: &'g Gauge, x: &[f64], w: Weight) -> Result<SubdifferentialOracle<'g>> {
    if let Weight::Power(p) = w {
        Weight::power(p)?;
    }
    let o = g.subdifferential(x, 0.0)?;
    let f = w.phi(g.value(x));
    Ok(o.scaled_by(f))
}

/// `(y, x)_s = gamma(x) gamma'(x; y)`.
pub fn semi_inner_superior(g: &Gauge, y: &[f64], x: &[f64]) -> Result<f64> {
    Ok(g.eval(x)? * g.directional_derivative(x, y, 0.0)?)
}

/// `(y, x)_i = -gamma(x) gamma'(x; -y)`.
pub fn semi_inner_inferior(g: &Gauge, y: &[f64], x: &[f64]) -> Result<f64> {
    Ok(-g.eval(x)? * g.directional_derivative(x, &neg(y), 0.0)?)
}

/// `y` is isosceles orthogonal to `x`: `gamma(y + x) = gamma(y - x)`.
pub fn isosceles_test(g: &Gauge, y: &[f64], x: &[f64]) -> Result<bool> {
    check_dim(g.dim(), x)?;
    check_dim(g.dim(), y)?;
    let (a, b) = (g.value(&add(y, x)), g.value(&sub(y, x)));
    Ok((a - b).abs() <= tol_for(g, a.max(b)))
}

/// `alpha -> gamma(alpha x + y + x) - gamma(alpha x + y - x)`, non-decreasing.
pub fn isosceles_defect(g: &Gauge, x: &[f64], y: &[f64], alpha: f64) -> Result<f64> {
    check_dim(g.dim(), x)?;
    check_dim(g.dim(), y)?;
    Ok(defect(g, x, y, alpha).0)
}

fn defect(g: &Gauge, x: &[f64], y: &[f64], alpha: f64) -> (f64, f64) {
    let p = lin(alpha, x, y);
    let (a, b) = (g.value(&add(&p, x)), g.value(&sub(&p, x)));
    (a - b, 1e-12 * (1.0 + a + b))
}

/// `{alpha : alpha x + y is isosceles orthogonal to x}`.
pub fn isosceles_alpha_interval(g: &Gauge, x: &[f64], y: &[f64]) -> Result<AlphaInterval> {
    check_dim(g.dim(), x)?;
    check_dim(g.dim(), y)?;
    if is_zero(x) {
        return Err(Error::Domain("x must be non-zero".into()));
    }
    let below = |a: f64| {
        let (f, t) = defect(g, x, y, a);
        f < -t
    };
    let above = |a: f64| {
        let (f, t) = defect(g, x, y, a);
        f > t
    };
    let mut a = 1.0;
    let mut found = false;
    for _ in 0..200 {
        if below(-a) && above(a) {
            found = true;
            break;
        }
        a *= 2.0;
    }
    if !found {
        return Err(Error::Numerical("isosceles bracket did not close".into()));
    }
    let res = 1e-13 * (1.0 + a);
    let lo = bisect(|t| !below(t), a, -a, res);
    let hi = bisect(|t| !above(t), -a, a, res);
    Ok(AlphaInterval::new(lo, hi))
}

/// Roots of `alpha -> gamma(x + (alpha x + y)) - gamma(x - (alpha x + y))`
/// on `[-bound, bound]`, found by scanning `samples` points and bisecting
/// each sign change. An empty result is possible.
pub fn isosceles_right_existence_search(
    g: &Gauge,
    x: &[f64],
    y: &[f64],
    bound: f64,
    samples: usize,
) -> Result<Vec<f64>> {
    check_dim(g.dim(), x)?;
    check_dim(g.dim(), y)?;
    if is_zero(x) {
        return Err(Error::Domain("x must be non-zero".into()));
    }
    if !(bound.is_finite() && bound > 0.0) || samples < 2 {
        return Err(Error::Domain("need a positive bound and at least 2 samples".into()));
    }
    let h = |a: f64| {
        let z = lin(a, x, y);
        g.value(&add(x, &z)) - g.value(&sub(x, &z))
    };
    let grid: Vec<f64> = (0..samples).map(|i| -bound + 2.0 * bound * i as f64 / (samples - 1) as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&a| h(a)).collect();
    let mut roots: Vec<f64> = Vec::new();
    for i in 0..samples {
        if vals[i] == 0.0 {
            roots.push(grid[i]);
        }
        if i + 1 < samples && vals[i] * vals[i + 1] < 0.0 {
            let s = vals[i].signum();
            let r = bisect(|a| h(a).signum() == s, grid[i], grid[i + 1], 1e-13 * (1.0 + bound));
            roots.push(r);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + bound));
    Ok(roots)
}
