//! Gauges (Minkowski functionals of convex bodies with 0 in the interior).
//!
//! Three backends: H-polytopes, V-polytopes and ellipsoids. The scale factor
//! is folded into the stored representation when a gauge is built, so every
//! routine downstream sees a single unscaled body.

mod json;
mod subdiff;

pub use json::GaugeSpec;
pub use subdiff::SubdifferentialOracle;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lp::{solve_lp_with, Bound, LinearProgram, LpOptions, LpOutcome, Relation, Sense};
use crate::vector::{check_dim, dot, is_zero, neg, unit};

/// Maximum number of normals or vertices (the LP kernel works with one
/// variable per generator).
pub const MAX_GENERATORS: usize = crate::lp::MAX_VARIABLES;

const FAST: LpOptions = LpOptions { lexicographic: false };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Quantities that come out of an LP or a closed form.
    pub exact: f64,
    /// Quantities produced by iterative searches.
    pub iterative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { exact: 1e-9, iterative: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct Ellipsoid {
    pub q: DMatrix<f64>,
    pub c: DVector<f64>,
    q_inv: DMatrix<f64>,
    /// 1 - c^T Q c, positive
    slack: f64,
    // polar body, itself an ellipsoid: (y - pc)^T pq (y - pc) <= 1
    pc: DVector<f64>,
    pq: DMatrix<f64>,
    /// inverse of the Cholesky factor of `pq`
    pl_inv: DMatrix<f64>,
}

impl Ellipsoid {
    fn new(q: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        let d = q.nrows();
        if q.ncols() != d {
            return Err(Error::InvalidGauge("Q must be square".into()));
        }
        if c.len() != d {
            return Err(Error::InvalidGauge(format!("c must have length {d}")));
        }
        if q.iter().chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidGauge("Q and c must be finite".into()));
        }
        let asym = (&q - q.transpose()).abs().max();
        if asym > 1e-12 * (1.0 + q.abs().max()) {
            return Err(Error::InvalidGauge("Q must be symmetric".into()));
        }
        let q = (&q + q.transpose()) * 0.5;
        let chol = q.clone().cholesky().ok_or_else(|| Error::InvalidGauge("Q must be positive definite".into()))?;
        let ctqc = c.dot(&(&q * &c));
        if ctqc >= 1.0 {
            return Err(Error::InvalidGauge("c^T Q c < 1 (the origin must lie inside the ellipsoid)".into()));
        }
        let q_inv = chol.inverse();
        let m = &q_inv - &c * c.transpose();
        let m_chol = m.clone().cholesky().ok_or_else(|| Error::InvalidGauge("Q is too ill-conditioned".into()))?;
        let minv_c = m_chol.solve(&c);
        let pc = -&minv_c;
        let pq = m / (1.0 + c.dot(&minv_c));
        let pl = pq.clone().cholesky().ok_or_else(|| Error::InvalidGauge("Q is too ill-conditioned".into()))?.l();
        let pl_inv = pl.try_inverse().ok_or_else(|| Error::InvalidGauge("Q is too ill-conditioned".into()))?;
        Ok(Ellipsoid { q, c, q_inv, slack: 1.0 - ctqc, pc, pq, pl_inv })
    }

    fn value(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        let qx = &self.q * &x;
        let a = x.dot(&qx);
        if a <= 0.0 {
            return 0.0;
        }
        let b = self.c.dot(&qx);
        let root = (b * b + a * self.slack).sqrt();
        if b >= 0.0 {
            a / (b + root)
        } else {
            (root - b) / self.slack
        }
    }

    fn polar_value(&self, y: &[f64]) -> f64 {
        let y = DVector::from_column_slice(y);
        y.dot(&self.c) + y.dot(&(&self.q_inv * &y)).max(0.0).sqrt()
    }

    /// Gradient at `x != 0`: outward normal at `x / gamma(x)`, scaled so it
    /// pairs to 1 with that boundary point.
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let g = self.value(x);
        let p = DVector::from_column_slice(x) / g;
        let n = &self.q * (&p - &self.c);
        let s = n.dot(&p);
        (n / s).as_slice().to_vec()
    }

    /// Maximizer of `<., u>` over the polar body cut by `<., x> >= beta`.
    fn cap_argmax(&self, u: &[f64], x: Option<(&[f64], f64)>) -> Vec<f64> {
        let ut = &self.pl_inv * DVector::from_column_slice(u);
        let un = ut.norm();
        let w = match x {
            None => {
                if un == 0.0 {
                    DVector::zeros(u.len())
                } else {
                    &ut / un
                }
            }
            Some((x, beta)) => {
                let xv = DVector::from_column_slice(x);
                let xt = &self.pl_inv * &xv;
                let xn2 = xt.norm_squared();
                let b = beta - xv.dot(&self.pc);
                let free = if un > 0.0 { Some(&ut / un) } else { None };
                match free {
                    Some(w0) if xt.dot(&w0) >= b => w0,
                    _ => {
                        let base = &xt * (b / xn2);
                        let r = (1.0 - b * b / xn2).max(0.0).sqrt();
                        let perp = &ut - &xt * (ut.dot(&xt) / xn2);
                        let pn = perp.norm();
                        if pn > 1e-300 {
                            base + perp * (r / pn)
                        } else {
                            base
                        }
                    }
                }
            }
        };
        // y = pc + L^{-T} w
        let y = &self.pc + self.pl_inv.transpose() * w;
        y.as_slice().to_vec()
    }

    fn transformed(&self, m: &DMatrix<f64>, m_inv: &DMatrix<f64>) -> Result<Self> {
        Ellipsoid::new(m.transpose() * &self.q * m, m_inv * &self.c)
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Backend {
    /// Unit ball `{x : <a_i, x> <= 1}`.
    PolytopeH { normals: Vec<Vec<f64>> },
    /// Unit ball `conv(v_i)`.
    PolytopeV { vertices: Vec<Vec<f64>> },
    /// Unit ball `{x : (x - c)^T Q (x - c) <= 1}`.
    Ellipsoid(Ellipsoid),
}

#[derive(Debug, Clone)]
pub struct Gauge {
    backend: Backend,
    dim: usize,
    scale: f64,
    tol: Tolerances,
}

impl Gauge {
    pub fn polytope_h(normals: Vec<Vec<f64>>) -> Result<Self> {
        let dim = check_generators(&normals, "normals")?;
        if !positively_spanning(&normals)? {
            return Err(Error::InvalidGauge("normals must positively span R^d (bounded unit ball)".into()));
        }
        Ok(Gauge { backend: Backend::PolytopeH { normals }, dim, scale: 1.0, tol: Tolerances::default() })
    }

    pub fn polytope_v(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let dim = check_generators(&vertices, "vertices")?;
        if !positively_spanning(&vertices)? {
            return Err(Error::InvalidGauge("the origin must lie in the interior of conv(vertices)".into()));
        }
        Ok(Gauge { backend: Backend::PolytopeV { vertices }, dim, scale: 1.0, tol: Tolerances::default() })
    }

    pub fn ellipsoid(q: Vec<Vec<f64>>, c: Vec<f64>) -> Result<Self> {
        let d = q.len();
        if d == 0 {
            return Err(Error::InvalidGauge("dimension must be at least 1".into()));
        }
        if q.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidGauge("Q must be square".into()));
        }
        let qm = DMatrix::from_fn(d, d, |i, j| q[i][j]);
        let e = Ellipsoid::new(qm, DVector::from_vec(c))?;
        Ok(Gauge { backend: Backend::Ellipsoid(e), dim: d, scale: 1.0, tol: Tolerances::default() })
    }

    /// The Euclidean norm on R^d.
    pub fn euclidean(d: usize) -> Self {
        let id: Vec<Vec<f64>> = (0..d).map(|i| unit(d, i)).collect();
        Gauge::ellipsoid(id, vec![0.0; d]).expect("identity is a valid ellipsoid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GaugeSpec = serde_json::from_str(text)?;
        spec.build()
    }

    /// `kappa * gamma`. The unit ball shrinks by `kappa`.
    pub fn scaled(&self, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidGauge("scale must be positive and finite".into()));
        }
        let backend = match &self.backend {
            Backend::PolytopeH { normals } => {
                Backend::PolytopeH { normals: normals.iter().map(|a| a.iter().map(|v| v * kappa).collect()).collect() }
            }
            Backend::PolytopeV { vertices } => Backend::PolytopeV {
                vertices: vertices.iter().map(|a| a.iter().map(|v| v / kappa).collect()).collect(),
            },
            Backend::Ellipsoid(e) => Backend::Ellipsoid(Ellipsoid::new(&e.q * (kappa * kappa), &e.c / kappa)?),
        };
        Ok(Gauge { backend, dim: self.dim, scale: self.scale * kappa, tol: self.tol })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Accumulated scale factor (informational; already folded in).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn is_polytope(&self) -> bool {
        !matches!(self.backend, Backend::Ellipsoid(_))
    }

    pub fn kind(&self) -> &'static str {
        match self.backend {
            Backend::PolytopeH { .. } => "polytope_h",
            Backend::PolytopeV { .. } => "polytope_v",
            Backend::Ellipsoid(_) => "ellipsoid",
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x)?;
        let v = self.value(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numerical("gauge evaluation failed".into()))
        }
    }

    /// Unchecked evaluation for internal loops. NaN if an LP fails.
    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        match &self.backend {
            Backend::PolytopeH { normals } => normals.iter().map(|a| dot(a, x)).fold(f64::NEG_INFINITY, f64::max),
            Backend::PolytopeV { vertices } => {
                if is_zero(x) {
                    return 0.0;
                }
                cone_cost(vertices, x).unwrap_or(f64::NAN)
            }
            Backend::Ellipsoid(e) => e.value(x),
        }
    }

    pub fn polar_eval(&self, xs: &[f64]) -> Result<f64> {
        check_dim(self.dim, xs)?;
        let v = self.polar_value(xs);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numerical("polar evaluation failed".into()))
        }
    }

    pub(crate) fn polar_value(&self, xs: &[f64]) -> f64 {
        match &self.backend {
            Backend::PolytopeH { normals } => {
                if is_zero(xs) {
                    return 0.0;
                }
                let mut lp = LinearProgram::new(Sense::Maximize, xs.to_vec()).free();
                for a in normals {
                    lp.push(a.clone(), Relation::Le, 1.0);
                }
                match solve_lp_with(&lp, FAST) {
                    Ok(LpOutcome::Optimal { value, .. }) => value,
                    _ => f64::NAN,
                }
            }
            Backend::PolytopeV { vertices } => vertices.iter().map(|v| dot(v, xs)).fold(f64::NEG_INFINITY, f64::max),
            Backend::Ellipsoid(e) => e.polar_value(xs),
        }
    }

    /// `x -> gamma(-x)`.
    pub fn reverse(&self) -> Gauge {
        let backend = match &self.backend {
            Backend::PolytopeH { normals } => Backend::PolytopeH { normals: normals.iter().map(|a| neg(a)).collect() },
            Backend::PolytopeV { vertices } => {
                Backend::PolytopeV { vertices: vertices.iter().map(|a| neg(a)).collect() }
            }
            Backend::Ellipsoid(e) => {
                let mut r = e.clone();
                r.c = -&e.c;
                r.pc = -&e.pc;
                Backend::Ellipsoid(r)
            }
        };
        Gauge { backend, ..self.clone() }
    }

    /// The polar gauge as a gauge in its own right.
    pub fn polar_gauge(&self) -> Result<Gauge> {
        let backend = match &self.backend {
            Backend::PolytopeH { normals } => Backend::PolytopeV { vertices: normals.clone() },
            Backend::PolytopeV { vertices } => Backend::PolytopeH { normals: vertices.clone() },
            Backend::Ellipsoid(e) => Backend::Ellipsoid(Ellipsoid::new(e.pq.clone(), e.pc.clone())?),
        };
        Ok(Gauge { backend, dim: self.dim, scale: 1.0 / self.scale, tol: self.tol })
    }

    /// `x -> gamma(M x)` for invertible `M` (row-major).
    pub fn compose_linear(&self, m: &[Vec<f64>]) -> Result<Gauge> {
        let d = self.dim;
        if m.len() != d || m.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: m.len() });
        }
        let mm = DMatrix::from_fn(d, d, |i, j| m[i][j]);
        let mi = mm.clone().try_inverse().ok_or_else(|| Error::Domain("linear map must be invertible".into()))?;
        let apply =
            |mat: &DMatrix<f64>, v: &[f64]| -> Vec<f64> { (mat * DVector::from_column_slice(v)).as_slice().to_vec() };
        let backend = match &self.backend {
            Backend::PolytopeH { normals } => {
                let mt = mm.transpose();
                Backend::PolytopeH { normals: normals.iter().map(|a| apply(&mt, a)).collect() }
            }
            Backend::PolytopeV { vertices } => {
                Backend::PolytopeV { vertices: vertices.iter().map(|v| apply(&mi, v)).collect() }
            }
            Backend::Ellipsoid(e) => Backend::Ellipsoid(e.transformed(&mm, &mi)?),
        };
        Ok(Gauge { backend, ..self.clone() })
    }

    /// Generators of the polar ball for polytope backends (normals for H,
    /// `None` otherwise).
    pub fn normals(&self) -> Option<&[Vec<f64>]> {
        match &self.backend {
            Backend::PolytopeH { normals } => Some(normals),
            _ => None,
        }
    }

    pub fn vertices(&self) -> Option<&[Vec<f64>]> {
        match &self.backend {
            Backend::PolytopeV { vertices } => Some(vertices),
            _ => None,
        }
    }

    /// Symmetry check on the given sample points.
    pub fn is_symmetric_on(&self, samples: &[Vec<f64>]) -> bool {
        samples.iter().all(|x| (self.value(x) - self.value(&neg(x))).abs() <= self.tol.exact * (1.0 + self.value(x)))
    }
}

fn check_generators(gens: &[Vec<f64>], what: &str) -> Result<usize> {
    let first = gens.first().ok_or_else(|| Error::InvalidGauge(format!("{what} must be non-empty")))?;
    let d = first.len();
    if d == 0 {
        return Err(Error::InvalidGauge("dimension must be at least 1".into()));
    }
    if gens.iter().any(|g| g.len() != d) {
        return Err(Error::InvalidGauge(format!("all {what} must have dimension {d}")));
    }
    if gens.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGauge(format!("{what} must be finite")));
    }
    if gens.len() > MAX_GENERATORS {
        return Err(Error::InvalidGauge(format!("at most {MAX_GENERATORS} {what}")));
    }
    if gens.len() <= d {
        return Err(Error::InvalidGauge(format!("{what} must positively span R^d, which needs at least d+1 of them")));
    }
    Ok(d)
}

/// `min sum(u)` subject to `sum u_i g_i = x`, `u >= 0`; `None` if `x` is
/// outside the cone.
fn cone_cost(gens: &[Vec<f64>], x: &[f64]) -> Option<f64> {
    let k = gens.len();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0; k]).with_bounds(vec![Bound::NonNegative; k]);
    for (j, xj) in x.iter().enumerate() {
        lp.push(gens.iter().map(|g| g[j]).collect(), Relation::Eq, *xj);
    }
    match solve_lp_with(&lp, FAST) {
        Ok(LpOutcome::Optimal { value, .. }) => Some(value),
        _ => None,
    }
}

fn positively_spanning(gens: &[Vec<f64>]) -> Result<bool> {
    let d = gens[0].len();
    for j in 0..d {
        for s in [1.0, -1.0] {
            let mut e = unit(d, j);
            e[j] = s;
            if cone_cost(gens, &e).is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
