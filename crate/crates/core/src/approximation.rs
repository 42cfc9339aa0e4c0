//! epsilon-best approximation and co-approximation in linear subspaces.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::{Backend, Gauge};
use crate::lp::{solve_lp, Bound, HalfSpace, LinearProgram, LpOptions, LpOutcome, Region, Relation, Sense};
use crate::orthogonality::birkhoff_test;
use crate::vector::{check_dim, complement, dot, neg, norm, orthonormalize, scale, sub};

const RANK_TOL: f64 = 1e-10;

/// A linear subspace `U` given by an independent basis, `1 <= dim U < d`.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: Vec<Vec<f64>>,
    ortho: Vec<Vec<f64>>,
    perp: Vec<Vec<f64>>,
    ambient: usize,
}

impl Subspace {
    pub fn new(basis: Vec<Vec<f64>>, ambient: usize) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::Domain("subspace basis must be non-empty".into()));
        }
        for b in &basis {
            check_dim(ambient, b)?;
        }
        if basis.len() >= ambient {
            return Err(Error::Domain("subspace must be proper (dim U < d)".into()));
        }
        let ortho = orthonormalize(&basis, RANK_TOL)
            .ok_or_else(|| Error::Domain("subspace basis must be linearly independent".into()))?;
        let perp = complement(&ortho, ambient);
        Ok(Subspace { basis, ortho, perp, ambient })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Orthonormal basis of `U`.
    pub fn orthonormal(&self) -> &[Vec<f64>] {
        &self.ortho
    }

    /// Orthonormal basis of the Euclidean complement of `U`.
    pub fn complement(&self) -> &[Vec<f64>] {
        &self.perp
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.ambient];
        for q in &self.ortho {
            let c = dot(x, q);
            for (pi, qi) in p.iter_mut().zip(q) {
                *pi += c * qi;
            }
        }
        p
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        norm(&sub(x, &self.project(x))) <= tol * (1.0 + norm(x))
    }

    /// `sum c_j b_j`
    pub fn combine(&self, c: &[f64]) -> Vec<f64> {
        crate::lp::combine(&self.basis, c)
    }

    fn lift_ortho(&self, c: &[f64]) -> Vec<f64> {
        crate::lp::combine(&self.ortho, c)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BestApproxResult {
    pub point: Vec<f64>,
    /// Coordinates of `point` in the given basis.
    pub coefficients: Vec<f64>,
    /// `gamma(point - y)`
    pub value: f64,
    pub certificate: Vec<f64>,
}

fn check_problem(g: &Gauge, u: &Subspace, y: &[f64], eps: f64) -> Result<()> {
    check_dim(g.dim(), y)?;
    if u.ambient_dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: u.ambient_dim() });
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::Domain("epsilon must be finite and non-negative".into()));
    }
    if u.contains(y, RANK_TOL) {
        return Err(Error::Domain("y must not lie in U".into()));
    }
    Ok(())
}

/// A minimizer of `u -> gamma(u - y)` over `U` with a certificate `x*`:
/// `polar(x*) = 1`, `x*` annihilates `U`, `<x*, point - y> = gamma(point - y)`.
///
/// Every minimizer belongs to the epsilon-approximation set, so `eps` only
/// enters through validation here; use [`best_approx_membership`] for the set.
pub fn best_approximation(g: &Gauge, u: &Subspace, y: &[f64], eps: f64) -> Result<BestApproxResult> {
    check_problem(g, u, y, eps)?;
    let k = u.dim();
    let (coefficients, point) = match g.backend() {
        Backend::PolytopeH { normals } => {
            // min t  s.t. <a_i, B c - y> <= t
            let mut obj = vec![0.0; k + 1];
            obj[k] = 1.0;
            let mut lp = LinearProgram::new(Sense::Minimize, obj).free();
            for a in normals {
                let mut row: Vec<f64> = u.basis().iter().map(|b| dot(a, b)).collect();
                row.push(-1.0);
                lp.push(row, Relation::Le, dot(a, y));
            }
            let (_, sol) = optimal(solve_lp(&lp)?)?;
            let c = sol[..k].to_vec();
            let p = u.combine(&c);
            (c, p)
        }
        Backend::PolytopeV { vertices } => {
            // min sum w  s.t. sum w_i v_i - B c = -y, w >= 0
            let m = vertices.len();
            let mut obj = vec![0.0; k];
            obj.extend(vec![1.0; m]);
            let mut bounds = vec![Bound::Free; k];
            bounds.extend(vec![Bound::NonNegative; m]);
            let mut lp = LinearProgram::new(Sense::Minimize, obj).with_bounds(bounds);
            for j in 0..g.dim() {
                let mut row: Vec<f64> = u.basis().iter().map(|b| -b[j]).collect();
                row.extend(vertices.iter().map(|v| v[j]));
                lp.push(row, Relation::Eq, -y[j]);
            }
            let (_, sol) = optimal(solve_lp(&lp)?)?;
            let c = sol[..k].to_vec();
            let p = u.combine(&c);
            (c, p)
        }
        Backend::Ellipsoid(e) => ellipsoid_projection(&e.q, &e.c, u, y)?,
    };
    let value = g.value(&sub(&point, y));
    let certificate = match g.backend() {
        Backend::Ellipsoid(_) => g
            .gateaux_gradient(&sub(&point, y))?
            .ok_or_else(|| Error::Numerical("ellipsoid gauge lost smoothness".into()))?,
        _ => distance_dual(g, u, y)?.1,
    };
    Ok(BestApproxResult { point, coefficients, value, certificate })
}

fn optimal(o: LpOutcome) -> Result<(f64, Vec<f64>)> {
    o.optimal().ok_or_else(|| Error::Numerical("approximation LP not optimal".into()))
}

/// Exact minimizer for an ellipsoidal gauge: the smallest `r` for which
/// `y + r B` meets `U` solves a scalar quadratic.
fn ellipsoid_projection(q: &DMatrix<f64>, c: &DVector<f64>, u: &Subspace, y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = q.nrows();
    let k = u.dim();
    let b = DMatrix::from_fn(d, k, |i, j| u.basis()[j][i]);
    let qb = q * &b;
    let gram = b.transpose() * &qb;
    let gram_inv = gram.try_inverse().ok_or_else(|| Error::Numerical("singular subspace Gram matrix".into()))?;
    // Q-orthogonal projection onto U: P = B (B^T Q B)^{-1} B^T Q
    let coeffs_of = |w: &DVector<f64>| &gram_inv * (qb.transpose() * w);
    let m = q - &qb * &gram_inv * qb.transpose();
    let yv = DVector::from_column_slice(y);
    let a = 1.0 - c.dot(&(&m * c));
    let bb = c.dot(&(&m * &yv));
    let e = yv.dot(&(&m * &yv)).max(0.0);
    let root = (bb * bb + a * e).sqrt();
    let r = if bb >= 0.0 { (bb + root) / a } else { e / (root - bb) };
    let w = &yv + c * r;
    let cf = coeffs_of(&w);
    let point = &b * &cf;
    Ok((cf.as_slice().to_vec(), point.as_slice().to_vec()))
}

/// `max <x*, -y>` over polar-ball elements annihilating `U`, with the
/// maximizer. By duality the value is the distance from `y` to `U`.
pub fn distance_dual(g: &Gauge, u: &Subspace, y: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dim(g.dim(), y)?;
    let target = neg(y);
    let mut cuts: Vec<HalfSpace> = Vec::new();
    for b in u.basis() {
        cuts.push(HalfSpace { normal: b.clone(), offset: 0.0 });
        cuts.push(HalfSpace { normal: neg(b), offset: 0.0 });
    }
    let opts = LpOptions { lexicographic: false };
    let (value, xs) = match g.backend() {
        Backend::PolytopeH { normals } => Region::Hull { generators: normals.clone(), cuts }
            .optimize(Sense::Maximize, &target, opts)?
            .ok_or_else(|| Error::Numerical("dual approximation LP infeasible".into()))?,
        Backend::PolytopeV { vertices } => {
            let mut rows: Vec<HalfSpace> =
                vertices.iter().map(|v| HalfSpace { normal: neg(v), offset: -1.0 }).collect();
            rows.extend(cuts);
            Region::Halfspaces { dim: g.dim(), rows }
                .optimize(Sense::Maximize, &target, opts)?
                .ok_or_else(|| Error::Numerical("dual approximation LP infeasible".into()))?
        }
        Backend::Ellipsoid(_) => {
            let polar = g.polar_gauge()?;
            let Backend::Ellipsoid(pe) = polar.backend() else { unreachable!("polar of an ellipsoid is an ellipsoid") };
            ellipsoid_section_argmax(&pe.q, &pe.c, u.complement(), &target)?
        }
    };
    let s = g.polar_value(&xs);
    let xs = if s > 0.0 { scale(&xs, 1.0 / s) } else { xs };
    Ok((value, xs))
}

/// Max of `<t, z>` over `{(z - c)^T Q (z - c) <= 1} ∩ span(n)`.
fn ellipsoid_section_argmax(q: &DMatrix<f64>, c: &DVector<f64>, n: &[Vec<f64>], t: &[f64]) -> Result<(f64, Vec<f64>)> {
    let d = q.nrows();
    let m = n.len();
    let nm = DMatrix::from_fn(d, m, |i, j| n[j][i]);
    let a = nm.transpose() * q * &nm;
    let a_inv = a.try_inverse().ok_or_else(|| Error::Numerical("singular section".into()))?;
    let h = nm.transpose() * (q * c);
    let z0 = &a_inv * &h;
    let rho = (1.0 - c.dot(&(q * c)) + h.dot(&z0)).max(0.0);
    let gv = nm.transpose() * DVector::from_column_slice(t);
    let ag = &a_inv * &gv;
    let s = gv.dot(&ag).max(0.0).sqrt();
    let z = if s > 0.0 { &z0 + ag * (rho.sqrt() / s) } else { z0 };
    let xs = &nm * z;
    let xs = xs.as_slice().to_vec();
    Ok((dot(&xs, t), xs))
}

fn check_member(g: &Gauge, u: &Subspace, x: &[f64]) -> Result<()> {
    check_dim(g.dim(), x)?;
    if !u.contains(x, 1e-9) {
        return Err(Error::Domain("x must lie in U".into()));
    }
    Ok(())
}

/// `x` is an epsilon-best approximation of `y` in `U`:
/// `gamma(x - y) <= dist(y, U) + eps`.
pub fn best_approx_membership(g: &Gauge, u: &Subspace, y: &[f64], eps: f64, x: &[f64]) -> Result<bool> {
    check_problem(g, u, y, eps)?;
    check_member(g, u, x)?;
    let dist = best_approximation(g, u, y, 0.0)?.value;
    let gx = g.value(&sub(x, y));
    Ok(gx <= dist + eps + g.tolerances().exact * (1.0 + dist))
}

/// A certificate for `x` in the epsilon-approximation set, if one exists:
/// `polar(x*) = 1`, `x*` annihilates `U`, `<x*, x - y> >= gamma(x - y) - eps`.
pub fn best_approx_certificate(g: &Gauge, u: &Subspace, y: &[f64], eps: f64, x: &[f64]) -> Result<Option<Vec<f64>>> {
    check_problem(g, u, y, eps)?;
    check_member(g, u, x)?;
    let (_, xs) = distance_dual(g, u, y)?;
    let d = sub(x, y);
    let gd = g.value(&d);
    let ok = dot(&xs, &d) >= gd - eps - g.tolerances().exact * (1.0 + gd);
    Ok(ok.then_some(xs))
}

fn default_radius(g: &Gauge, y: &[f64]) -> f64 {
    8.0 * g.value(y).max(g.value(&neg(y)))
}

/// Grid of coefficient vectors in `[-r, r]^k`, `n` points per axis, kept
/// inside the Euclidean ball of radius `r`. Always contains the origin.
fn coefficient_grid(k: usize, n: usize, r: f64) -> Vec<Vec<f64>> {
    let n = n.max(2);
    let axis: Vec<f64> = (0..n).map(|i| -r + 2.0 * r * i as f64 / (n - 1) as f64).collect();
    let mut out = vec![vec![0.0; k]];
    let total = n.pow(k as u32);
    for idx in 0..total {
        let mut rem = idx;
        let mut c = Vec::with_capacity(k);
        for _ in 0..k {
            c.push(axis[rem % n]);
            rem /= n;
        }
        if norm(&c) <= r * (1.0 + 1e-12) {
            out.push(c);
        }
    }
    out
}

/// Sampled check of `gamma(x - z) <= gamma(y - z) + eps` over a grid of
/// the ball of radius `8 max(gamma(y), gamma(-y))` in `U`. A necessary
/// condition only.
pub fn coapprox_membership_sampled(
    g: &Gauge,
    u: &Subspace,
    y: &[f64],
    eps: f64,
    x: &[f64],
    samples: usize,
) -> Result<bool> {
    check_problem(g, u, y, eps)?;
    check_member(g, u, x)?;
    let r = default_radius(g, y);
    let tol = g.tolerances().exact;
    for c in coefficient_grid(u.dim(), samples, r) {
        let z = u.lift_ortho(&c);
        let lhs = g.value(&sub(x, &z));
        let rhs = g.value(&sub(y, &z));
        if lhs > rhs + eps + tol * (1.0 + rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Directions on the unit sphere of `U` (orthonormal coordinates).
fn sphere_directions(k: usize, samples: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..k {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; k];
            e[i] = s;
            out.push(e);
        }
    }
    match k {
        1 => {}
        2 => {
            let n = samples.max(4);
            for i in 0..n {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                out.push(vec![t.cos(), t.sin()]);
            }
        }
        _ => {
            let n = samples.clamp(3, 16);
            for c in coefficient_grid(k, n, 1.0) {
                let l = norm(&c);
                if l > 1e-12 {
                    out.push(scale(&c, 1.0 / l));
                }
            }
        }
    }
    out
}

/// Sufficient condition for `x` to be an epsilon-best co-approximation:
/// `z` is eps-Birkhoff orthogonal to `y - x` for every sampled `z` in `U`
/// (basis directions, a sphere grid, and for `eps > 0` several radii).
pub fn coapprox_sufficient_test(
    g: &Gauge,
    u: &Subspace,
    y: &[f64],
    x: &[f64],
    eps: f64,
    samples: usize,
) -> Result<bool> {
    check_problem(g, u, y, eps)?;
    check_member(g, u, x)?;
    let w = sub(y, x);
    let mut zs: Vec<Vec<f64>> = Vec::new();
    for b in u.basis() {
        zs.push(b.clone());
        zs.push(neg(b));
    }
    let dirs: Vec<Vec<f64>> = sphere_directions(u.dim(), samples).iter().map(|c| u.lift_ortho(c)).collect();
    if eps == 0.0 {
        zs.extend(dirs);
    } else {
        let r = default_radius(g, y);
        for j in 0..6 {
            let rad = r / f64::powi(2.0, j);
            zs.extend(dirs.iter().map(|d| scale(d, rad)));
        }
    }
    for z in &zs {
        if !birkhoff_test(g, z, &w, eps)? {
            return Ok(false);
        }
    }
    Ok(true)
}
