//! epsilon-directional derivatives and epsilon-subdifferentials.

use crate::error::{Error, Result};
use crate::lp::{HalfSpace, LpOptions, Region, Sense};
use crate::search::golden_min;
use crate::vector::{axpy, check_dim, dot, is_zero, neg, norm, scale, unit};

use super::{Backend, Gauge};

const LAMBDA_FLOOR: f64 = 1e-12;

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::Domain("epsilon must be finite and non-negative".into()));
    }
    Ok(())
}

impl Gauge {
    /// `inf_{l > 0} (gamma(x + l y) - gamma(x) + eps) / l`.
    ///
    /// Polytopes go through an LP over the epsilon-subdifferential, smooth
    /// ellipsoids use the gradient at `eps = 0` and the slope search otherwise.
    pub fn directional_derivative(&self, x: &[f64], y: &[f64], eps: f64) -> Result<f64> {
        check_dim(self.dim, x)?;
        check_dim(self.dim, y)?;
        check_eps(eps)?;
        self.dd_value(x, y, eps)
    }

    pub(crate) fn dd_value(&self, x: &[f64], y: &[f64], eps: f64) -> Result<f64> {
        if is_zero(x) {
            return Ok(self.value(y));
        }
        match &self.backend {
            Backend::Ellipsoid(e) if eps == 0.0 => Ok(dot(&e.gradient(x), y)),
            Backend::Ellipsoid(_) => self.slope_value(x, y, eps),
            _ => Ok(self.eps_argmax(x, self.value(x), eps, y)?.0),
        }
    }

    /// Same quantity computed straight from the definition: a limit of
    /// difference quotients at `eps = 0`, a golden-section search over
    /// `log(lambda)` otherwise. Works for every backend.
    pub fn slope_derivative(&self, x: &[f64], y: &[f64], eps: f64) -> Result<f64> {
        check_dim(self.dim, x)?;
        check_dim(self.dim, y)?;
        check_eps(eps)?;
        self.slope_value(x, y, eps)
    }

    fn slope_value(&self, x: &[f64], y: &[f64], eps: f64) -> Result<f64> {
        if is_zero(y) {
            return Ok(0.0);
        }
        let gy = self.value(y);
        if is_zero(x) {
            return Ok(gy);
        }
        let gx = self.value(x);
        let q = |l: f64| (self.value(&axpy(x, l, y)) - gx + eps) / l;
        let out = if eps == 0.0 {
            // quotient is monotone; Richardson on the right limit
            let h = 1e-6 * norm(x) / norm(y);
            2.0 * q(0.5 * h) - q(h)
        } else {
            let gmx = self.value(&neg(x));
            let mut hi = ((gx + gmx) / gy).max(LAMBDA_FLOOR) * 4.0;
            for _ in 0..200 {
                if q(2.0 * hi) >= q(hi) {
                    break;
                }
                hi *= 2.0;
            }
            let (_, best) = golden_min(|s| q(s.exp()), LAMBDA_FLOOR.ln(), (2.0 * hi).ln(), 1e-12, 400);
            best.min(gy)
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::Numerical("slope search produced a non-finite value".into()))
        }
    }

    /// Max of `<x*, u>` over the epsilon-subdifferential at `x`, with the
    /// maximizer. `gx` is `gamma(x)`.
    pub(crate) fn eps_argmax(&self, x: &[f64], gx: f64, eps: f64, u: &[f64]) -> Result<(f64, Vec<f64>)> {
        let cut = |normal: &[f64]| HalfSpace { normal: normal.to_vec(), offset: gx - eps };
        let opts = LpOptions { lexicographic: false };
        match &self.backend {
            Backend::PolytopeH { normals } => {
                let cuts = if is_zero(x) { vec![] } else { vec![cut(x)] };
                let region = Region::Hull { generators: normals.clone(), cuts };
                region
                    .optimize(Sense::Maximize, u, opts)?
                    .ok_or_else(|| Error::Numerical("empty subdifferential".into()))
            }
            Backend::PolytopeV { vertices } => {
                let mut rows: Vec<HalfSpace> =
                    vertices.iter().map(|v| HalfSpace { normal: neg(v), offset: -1.0 }).collect();
                if !is_zero(x) {
                    rows.push(cut(x));
                }
                let region = Region::Halfspaces { dim: self.dim, rows };
                region
                    .optimize(Sense::Maximize, u, opts)?
                    .ok_or_else(|| Error::Numerical("empty subdifferential".into()))
            }
            Backend::Ellipsoid(e) => {
                let p = if is_zero(x) {
                    e.cap_argmax(u, None)
                } else if eps == 0.0 {
                    e.gradient(x)
                } else {
                    e.cap_argmax(u, Some((x, gx - eps)))
                };
                Ok((dot(&p, u), p))
            }
        }
    }

    /// The epsilon-subdifferential at `x` as a support/extreme-point oracle.
    pub fn subdifferential(&self, x: &[f64], eps: f64) -> Result<SubdifferentialOracle<'_>> {
        check_dim(self.dim, x)?;
        check_eps(eps)?;
        Ok(SubdifferentialOracle { gauge: self, x: x.to_vec(), eps, gx: self.eval(x)?, factor: 1.0 })
    }

    /// The gradient when the subdifferential at `x != 0` is a single point.
    pub fn gateaux_gradient(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        check_dim(self.dim, x)?;
        if is_zero(x) {
            return Err(Error::Domain("x must be non-zero".into()));
        }
        let oracle = self.subdifferential(x, 0.0)?;
        let tol = self.tol.exact * (1.0 + self.value(x));
        for i in 0..self.dim {
            let e = unit(self.dim, i);
            if oracle.support(&e)? + oracle.support(&neg(&e))? > tol {
                return Ok(None);
            }
        }
        Ok(Some(oracle.extreme_point(&unit(self.dim, 0))?))
    }
}

/// `factor * (epsilon-subdifferential of the gauge at x)`.
#[derive(Debug, Clone)]
pub struct SubdifferentialOracle<'g> {
    gauge: &'g Gauge,
    x: Vec<f64>,
    eps: f64,
    gx: f64,
    factor: f64,
}

impl<'g> SubdifferentialOracle<'g> {
    pub(crate) fn scaled_by(mut self, factor: f64) -> Self {
        self.factor *= factor;
        self
    }

    pub fn gauge(&self) -> &'g Gauge {
        self.gauge
    }

    pub fn point(&self) -> &[f64] {
        &self.x
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    /// Support function in direction `u`.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        check_dim(self.gauge.dim, u)?;
        if self.factor == 0.0 {
            return Ok(0.0);
        }
        Ok(self.factor * self.gauge.dd_value(&self.x, u, self.eps)?)
    }

    /// A maximizer of `<., u>` over the set.
    pub fn extreme_point(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.gauge.dim, u)?;
        let (_, p) = self.gauge.eps_argmax(&self.x, self.gx, self.eps, u)?;
        Ok(scale(&p, self.factor))
    }

    /// `[min, max]` of `<., u>` over the set.
    pub fn value_interval(&self, u: &[f64]) -> Result<(f64, f64)> {
        Ok((-self.support(&neg(u))?, self.support(u)?))
    }

    /// Membership up to `tol`.
    pub fn contains(&self, xs: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.gauge.dim, xs)?;
        if self.factor == 0.0 {
            return Ok(xs.iter().all(|v| v.abs() <= tol));
        }
        let p = scale(xs, 1.0 / self.factor);
        let in_ball = self.gauge.polar_value(&p) <= 1.0 + tol;
        let active = dot(&p, &self.x) >= self.gx - self.eps - tol;
        Ok(in_ball && active)
    }
}
