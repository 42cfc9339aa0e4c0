//! Unit-ball diagnostics, planar sections, bisectors and cones.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::{Backend, Gauge};
use crate::lp::{solve_lp, LinearProgram, Relation, Sense};
use crate::orthogonality::{birkhoff_slack, isosceles_alpha_interval, AlphaInterval};
use crate::vector::{add, axpy, check_dim, dot, is_zero, lin, neg, norm, scale, sub, unit};

/// Default number of arc samples for smooth sections.
pub const SECTION_SAMPLES: usize = 720;

const PARALLEL_TOL: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Polygon,
    SampledArc,
}

/// The unit sphere on the half-flat `{s x + t y : t >= 0}`.
///
/// `boundary` runs counterclockwise in `(s, t)` coordinates from the
/// positive `s` axis to the negative one.
#[derive(Debug, Clone, Serialize)]
pub struct Section2D {
    pub x_hat: Vec<f64>,
    pub y_hat: Vec<f64>,
    pub boundary: Vec<[f64; 2]>,
    pub kind: BoundaryKind,
    pub half_flat_clip: bool,
}

impl Section2D {
    pub fn lift(&self, p: [f64; 2]) -> Vec<f64> {
        lin(p[0], &self.x_hat, &scale(&self.y_hat, p[1]))
    }
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn d2(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [b[0] - a[0], b[1] - a[1]]
}

fn len2(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

/// Counterclockwise convex hull without collinear points.
fn hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup_by(|a, b| len2(d2(*a, *b)) <= DEDUP_TOL);
    if p.len() < 3 {
        return p;
    }
    let scale = p.iter().map(|q| len2(*q)).fold(0.0, f64::max);
    let eps = 1e-12 * scale * scale;
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for q in &p {
        while lower.len() >= 2
            && cross(d2(lower[lower.len() - 2], lower[lower.len() - 1]), d2(lower[lower.len() - 1], *q)) <= eps
        {
            lower.pop();
        }
        lower.push(*q);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for q in p.iter().rev() {
        while upper.len() >= 2
            && cross(d2(upper[upper.len() - 2], upper[upper.len() - 1]), d2(upper[upper.len() - 1], *q)) <= eps
        {
            upper.pop();
        }
        upper.push(*q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Vertices (counterclockwise) of `{p : <n_i, p> <= 1}`, assumed bounded.
fn polygon_from_normals(normals: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let h = hull(normals);
    let m = h.len();
    (0..m)
        .map(|i| {
            let (a, b) = (h[i], h[(i + 1) % m]);
            let det = cross(a, b);
            [(b[1] - a[1]) / det, (a[0] - b[0]) / det]
        })
        .collect()
}

/// Keeps the part of a star-shaped closed boundary in `t >= 0`, ordered by
/// angle, with the two axis crossings as end points.
fn clip_upper(vertices: &[[f64; 2]], right: f64, left: f64) -> Vec<[f64; 2]> {
    let mut pts: Vec<(f64, [f64; 2])> =
        vertices.iter().filter(|p| p[1] > DEDUP_TOL * (1.0 + len2(**p))).map(|p| (p[1].atan2(p[0]), *p)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = vec![[right, 0.0]];
    out.extend(pts.into_iter().map(|(_, p)| p));
    out.push([-left, 0.0]);
    out.dedup_by(|a, b| len2(d2(*a, *b)) <= DEDUP_TOL);
    out
}

fn plane_value(g: &Gauge, x: &[f64], y: &[f64], p: [f64; 2]) -> f64 {
    g.value(&lin(p[0], x, &scale(y, p[1])))
}

/// The unit sphere of `gamma` on the half-flat spanned by `x` and the ray
/// of `y`. Polytopes give an exact polygon, ellipsoids `samples` arc points.
pub fn section2d(g: &Gauge, x: &[f64], y: &[f64], samples: usize) -> Result<Section2D> {
    check_dim(g.dim(), x)?;
    check_dim(g.dim(), y)?;
    let (nx, ny) = (norm(x), norm(y));
    if nx == 0.0 || ny == 0.0 || (dot(x, y).abs() >= nx * ny * (1.0 - 1e-12)) {
        return Err(Error::Domain("x and y must be linearly independent".into()));
    }
    let right = 1.0 / g.value(x);
    let left = 1.0 / g.value(&neg(x));
    let (boundary, kind) = match g.backend() {
        Backend::PolytopeH { normals } => {
            let ns: Vec<[f64; 2]> = normals.iter().map(|a| [dot(a, x), dot(a, y)]).collect();
            (clip_upper(&polygon_from_normals(&ns), right, left), BoundaryKind::Polygon)
        }
        Backend::PolytopeV { .. } => (refine_polygon(g, x, y)?, BoundaryKind::Polygon),
        Backend::Ellipsoid(_) => {
            let n = samples.max(2);
            let pts = (0..n)
                .map(|k| {
                    let th = std::f64::consts::PI * k as f64 / (n - 1) as f64;
                    let u = [th.cos(), th.sin()];
                    let r = plane_value(g, x, y, u);
                    [u[0] / r, u[1] / r]
                })
                .collect();
            (pts, BoundaryKind::SampledArc)
        }
    };
    Ok(Section2D { x_hat: x.to_vec(), y_hat: y.to_vec(), boundary, kind, half_flat_clip: true })
}

struct Anchor {
    p: [f64; 2],
    forward: [f64; 2],
    backward: [f64; 2],
}

/// Polygonal upper section through supporting lines: between two boundary
/// points, the outgoing edge line of the first and the incoming edge line
/// of the second either coincide or meet at a candidate vertex.
fn refine_polygon(g: &Gauge, x: &[f64], y: &[f64]) -> Result<Vec<[f64; 2]>> {
    let anchor = |th: f64| -> Result<Anchor> {
        let u = [th.cos(), th.sin()];
        let w = lin(u[0], x, &scale(y, u[1]));
        let gw = g.value(&w);
        let tangent = [-u[1], u[0]];
        let lift = |t: [f64; 2]| lin(t[0], x, &scale(y, t[1]));
        let f = g.eps_argmax(&w, gw, 0.0, &lift(tangent))?.1;
        let b = g.eps_argmax(&w, gw, 0.0, &lift([-tangent[0], -tangent[1]]))?.1;
        Ok(Anchor { p: [u[0] / gw, u[1] / gw], forward: [dot(&f, x), dot(&f, y)], backward: [dot(&b, x), dot(&b, y)] })
    };
    const PIECES: usize = 8;
    let mut anchors = Vec::with_capacity(PIECES + 1);
    for k in 0..=PIECES {
        let th = std::f64::consts::PI * k as f64 / PIECES as f64;
        anchors.push((th, anchor(th)?));
    }
    let mut out = vec![anchors[0].1.p];
    for pair in anchors.windows(2) {
        refine_arc(&anchor, &pair[0], &pair[1], 0, &mut out)?;
    }
    Ok(simplify(out))
}

fn refine_arc(
    anchor: &dyn Fn(f64) -> Result<Anchor>,
    a: &(f64, Anchor),
    b: &(f64, Anchor),
    depth: usize,
    out: &mut Vec<[f64; 2]>,
) -> Result<()> {
    let (fa, bb) = (a.1.forward, b.1.backward);
    let on_line = |n: [f64; 2], p: [f64; 2]| (n[0] * p[0] + n[1] * p[1] - 1.0).abs() <= 1e-10;
    if on_line(fa, b.1.p) || depth > 40 {
        out.push(b.1.p);
        return Ok(());
    }
    let det = cross(fa, bb);
    if det.abs() > 1e-14 {
        let q = [(bb[1] - fa[1]) / det, (fa[0] - bb[0]) / det];
        let qa = q[1].atan2(q[0]);
        if qa > a.0 && qa < b.0 {
            let mid = anchor(qa)?;
            if len2(d2(mid.p, q)) <= 1e-10 * (1.0 + len2(q)) {
                out.push(q);
                out.push(b.1.p);
                return Ok(());
            }
            let m = (qa, mid);
            refine_arc(anchor, a, &m, depth + 1, out)?;
            return refine_arc(anchor, &m, b, depth + 1, out);
        }
    }
    let th = 0.5 * (a.0 + b.0);
    let m = (th, anchor(th)?);
    refine_arc(anchor, a, &m, depth + 1, out)?;
    refine_arc(anchor, &m, b, depth + 1, out)
}

/// Drops duplicates and interior points of straight runs; keeps the ends.
fn simplify(pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let mut v: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for p in pts {
        if v.last().is_none_or(|q| len2(d2(*q, p)) > DEDUP_TOL) {
            v.push(p);
        }
    }
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(v.len());
    for (i, p) in v.iter().enumerate() {
        if i > 0 && i + 1 < v.len() {
            let (a, b) = (d2(*out.last().unwrap(), *p), d2(*p, v[i + 1]));
            if cross(a, b).abs() <= 1e-10 * len2(a) * len2(b) && a[0] * b[0] + a[1] * b[1] > 0.0 {
                continue;
            }
        }
        out.push(*p);
    }
    out
}

/// Longest boundary segment parallel to `x`, measured as `gamma` of the
/// positively `x`-oriented edge vector. Zero for sampled arcs.
pub fn max_parallel_segment(sec: &Section2D, g: &Gauge, x: &[f64]) -> Result<f64> {
    check_dim(g.dim(), x)?;
    if sec.kind == BoundaryKind::SampledArc {
        return Ok(0.0);
    }
    let gx = g.value(x);
    let mut best: f64 = 0.0;
    for e in sec.boundary.windows(2) {
        let d = d2(e[0], e[1]);
        let l = len2(d);
        if l > DEDUP_TOL && d[1].abs() <= PARALLEL_TOL * l {
            best = best.max(d[0].abs() * gx);
        }
    }
    Ok(best)
}

/// Sufficient condition for a unique `alpha` with `alpha x + y` isosceles
/// orthogonal to `x`: `M_y(x) <= 2 gamma(x) / gamma(y)`.
pub fn unique_bisector_guarantee(g: &Gauge, x: &[f64], y: &[f64]) -> Result<bool> {
    let sec = section2d(g, x, y, SECTION_SAMPLES)?;
    let m = max_parallel_segment(&sec, g, x)?;
    let bound = 2.0 * g.value(x) / g.value(y);
    Ok(m <= bound + g.tolerances().exact * (1.0 + bound))
}

#[derive(Debug, Clone, Serialize)]
pub struct BisectorSample {
    pub direction: Vec<f64>,
    pub interval: AlphaInterval,
    /// `alpha x + y` at both interval ends.
    pub points: (Vec<f64>, Vec<f64>),
}

/// Points of the bisector of `-x` and `x` along each direction.
pub fn bisector_sample(g: &Gauge, x: &[f64], directions: &[Vec<f64>]) -> Result<Vec<BisectorSample>> {
    directions
        .iter()
        .map(|y| {
            if is_zero(y) {
                return Err(Error::Domain("directions must be non-zero".into()));
            }
            let interval = isosceles_alpha_interval(g, x, y)?;
            let points = (axpy(y, interval.lo, x), axpy(y, interval.hi, x));
            Ok(BisectorSample { direction: y.clone(), interval, points })
        })
        .collect()
}

/// `C(x, x*)`: points `z` with `<x*, z - x> = gamma(z - x)`.
#[derive(Debug, Clone, Serialize)]
pub struct Cone {
    pub apex: Vec<f64>,
    pub functional: Vec<f64>,
}

impl Cone {
    /// Normalizes the functional to polar value one.
    pub fn new(g: &Gauge, apex: Vec<f64>, functional: Vec<f64>) -> Result<Self> {
        check_dim(g.dim(), &apex)?;
        check_dim(g.dim(), &functional)?;
        let p = g.polar_value(&functional);
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Domain("functional must have positive polar value".into()));
        }
        Ok(Cone { apex, functional: scale(&functional, 1.0 / p) })
    }
}

pub fn cone_membership(g: &Gauge, cone: &Cone, z: &[f64]) -> Result<bool> {
    check_dim(g.dim(), &cone.apex)?;
    check_dim(g.dim(), z)?;
    let tol = g.tolerances().exact;
    let p = g.polar_value(&cone.functional);
    if (p - 1.0).abs() > tol {
        return Err(Error::Domain("cone functional must have polar value 1".into()));
    }
    let d = sub(z, &cone.apex);
    let gd = g.value(&d);
    Ok((dot(&cone.functional, &d) - gd).abs() <= tol * (1.0 + gd))
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothnessReport {
    pub smooth: bool,
    /// `(x, x1*, x2*)`: two distinct subgradients at `x`.
    pub witness: Option<(Vec<f64>, Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RotundityReport {
    pub rotund: bool,
    /// Two distinct points whose segment stays on the unit sphere.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

fn check_plane(g: &Gauge) -> Result<usize> {
    let d = g.dim();
    if d < 2 {
        return Err(Error::Domain("dimension must be at least 2".into()));
    }
    Ok(d)
}

fn distinct(a: &[f64], b: &[f64]) -> bool {
    norm(&sub(a, b)) > 1e-9 * (1.0 + norm(a).max(norm(b)))
}

/// Gateaux differentiability of the gauge away from the origin. Polytopes
/// are never smooth; the witness is a ball vertex with two subgradients.
pub fn smoothness_check(g: &Gauge) -> Result<SmoothnessReport> {
    let d = check_plane(g)?;
    let top = unit(d, d - 1);
    let witness = match g.backend() {
        Backend::Ellipsoid(_) => None,
        Backend::PolytopeH { normals } => {
            let mut lp = LinearProgram::new(Sense::Maximize, top.clone()).free();
            for a in normals {
                lp.push(a.clone(), Relation::Le, 1.0);
            }
            let (_, x) = solve_lp(&lp)?.optimal().ok_or_else(|| Error::Numerical("ball vertex LP failed".into()))?;
            let active: Vec<&Vec<f64>> = normals.iter().filter(|a| dot(a, &x) >= 1.0 - 1e-9).collect();
            let first = active[0];
            let second = active
                .iter()
                .find(|a| distinct(a, first))
                .ok_or_else(|| Error::Numerical("ball vertex has a single active facet".into()))?;
            Some((x, first.clone(), (*second).clone()))
        }
        Backend::PolytopeV { vertices } => {
            let x = vertices
                .iter()
                .max_by(|a, b| a[d - 1].total_cmp(&b[d - 1]).then_with(|| cmp_lex(b, a)))
                .cloned()
                .expect("non-empty vertex list");
            let o = g.subdifferential(&x, 0.0)?;
            let mut found = None;
            'probe: for i in 0..d {
                let e = unit(d, i);
                let p = o.extreme_point(&e)?;
                let m = o.extreme_point(&neg(&e))?;
                if distinct(&p, &m) {
                    found = Some((x.clone(), p, m));
                    break 'probe;
                }
            }
            Some(found.ok_or_else(|| Error::Numerical("no distinct subgradients at the top vertex".into()))?)
        }
    };
    Ok(SmoothnessReport { smooth: witness.is_none(), witness })
}

fn cmp_lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter().zip(b).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
}

/// Rotundity of the unit ball. Polytopes are never rotund; the witness is
/// a pair of points inside one facet.
pub fn rotundity_check(g: &Gauge) -> Result<RotundityReport> {
    let d = check_plane(g)?;
    let witness = match g.backend() {
        Backend::Ellipsoid(_) => None,
        Backend::PolytopeH { normals } => Some(facet_pair_h(normals, d)?),
        Backend::PolytopeV { vertices } => {
            let polar = g.polar_gauge()?;
            let Backend::PolytopeH { normals: verts } = polar.backend() else {
                unreachable!("polar of a V-polytope is an H-polytope")
            };
            let mut lp = LinearProgram::new(Sense::Maximize, unit(d, 0)).free();
            for v in verts {
                lp.push(v.clone(), Relation::Le, 1.0);
            }
            let (_, xs) = solve_lp(&lp)?.optimal().ok_or_else(|| Error::Numerical("polar vertex LP failed".into()))?;
            let mut active: Vec<Vec<f64>> = Vec::new();
            for v in vertices {
                if dot(v, &xs) >= 1.0 - 1e-9 && active.iter().all(|a| distinct(a, v)) {
                    active.push(v.clone());
                }
            }
            let c = scale(&active.iter().fold(vec![0.0; d], |s, v| add(&s, v)), 1.0 / active.len() as f64);
            let m = scale(&add(&c, &active[0]), 0.5);
            Some((c, m))
        }
    };
    Ok(RotundityReport { rotund: witness.is_none(), witness })
}

fn facet_pair_h(normals: &[Vec<f64>], d: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    for (i, a) in normals.iter().enumerate() {
        // max s  s.t. <a, x> = 1, <a_j, x> + s <= 1
        let mut obj = vec![0.0; d + 1];
        obj[d] = 1.0;
        let mut lp = LinearProgram::new(Sense::Maximize, obj).free();
        let mut row = a.clone();
        row.push(0.0);
        lp.push(row, Relation::Eq, 1.0);
        let others: Vec<&Vec<f64>> =
            normals.iter().enumerate().filter(|(j, b)| *j != i && distinct(b, a)).map(|(_, b)| b).collect();
        for b in &others {
            let mut row = (*b).clone();
            row.push(1.0);
            lp.push(row, Relation::Le, 1.0);
        }
        let Some((s, sol)) = solve_lp(&lp)?.optimal() else { continue };
        if s <= 1e-9 {
            continue;
        }
        let x0 = sol[..d].to_vec();
        let aa = dot(a, a);
        let w = (0..d)
            .map(|k| axpy(&unit(d, k), -a[k] / aa, a))
            .find(|w| norm(w) > 1e-9)
            .expect("d >= 2 leaves a direction inside the facet");
        let spread = others.iter().map(|b| dot(b, &w).abs()).fold(0.0, f64::max);
        let delta = if spread > 0.0 { s / (2.0 * spread) } else { 1.0 };
        let x1 = axpy(&x0, delta, &w);
        return Ok((x0, x1));
    }
    Err(Error::Numerical("no facet with relative interior found".into()))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReversalReport {
    pub points: usize,
    /// Largest relative violation of `c(t)` Birkhoff orthogonal to `c'(t; 1)`.
    pub primal_slack: f64,
    /// Same for `c'(t; 1)` orthogonal to `c(t)` under the rotated polar gauge.
    pub dual_slack: f64,
    pub max_slack: f64,
}

/// Checks, along a clockwise parametrization `c` of the unit sphere of a
/// planar gauge, that `c(t)` is Birkhoff orthogonal to the forward tangent
/// under `gamma` and the tangent to `c(t)` under `polar o rho`, with `rho`
/// the counterclockwise quarter turn.
pub fn boundary_reversal_check_2d(g: &Gauge, n: usize) -> Result<ReversalReport> {
    if g.dim() != 2 {
        return Err(Error::Domain("reversal check needs dimension 2".into()));
    }
    if n == 0 {
        return Err(Error::Domain("need at least one sample point".into()));
    }
    let rho = vec![vec![0.0, -1.0], vec![1.0, 0.0]];
    let h = g.polar_gauge()?.compose_linear(&rho)?;
    let samples: Vec<(Vec<f64>, Vec<f64>)> = match g.backend() {
        Backend::Ellipsoid(_) => (0..n)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / n as f64;
                let u = vec![th.cos(), -th.sin()];
                let du = vec![-th.sin(), -th.cos()];
                let gu = g.value(&u);
                let grad = g.gateaux_gradient(&u)?.expect("ellipsoidal gauges are smooth");
                let c = scale(&u, 1.0 / gu);
                let dc = axpy(&scale(&du, 1.0 / gu), -dot(&grad, &du) / (gu * gu), &u);
                Ok((c, dc))
            })
            .collect::<Result<_>>()?,
        _ => {
            let mut poly = match g.backend() {
                Backend::PolytopeH { normals } => {
                    polygon_from_normals(&normals.iter().map(|a| [a[0], a[1]]).collect::<Vec<_>>())
                }
                Backend::PolytopeV { vertices } => hull(&vertices.iter().map(|v| [v[0], v[1]]).collect::<Vec<_>>()),
                Backend::Ellipsoid(_) => unreachable!(),
            };
            poly.reverse();
            let e = poly.len();
            let mut per_edge = n.div_ceil(e).max(2);
            per_edge += per_edge % 2;
            let mut out = Vec::with_capacity(e * per_edge);
            for k in 0..e {
                let (a, b) = (poly[k], poly[(k + 1) % e]);
                let dir = d2(a, b);
                for j in 0..per_edge {
                    let t = j as f64 / per_edge as f64;
                    out.push((vec![a[0] + t * dir[0], a[1] + t * dir[1]], vec![dir[0], dir[1]]));
                }
            }
            out
        }
    };
    let (mut primal, mut dual): (f64, f64) = (0.0, 0.0);
    for (c, dc) in &samples {
        let s1 = -birkhoff_slack(g, c, dc, 0.0)? / g.value(c);
        let s2 = -birkhoff_slack(&h, dc, c, 0.0)? / h.value(dc);
        primal = primal.max(s1);
        dual = dual.max(s2);
    }
    Ok(ReversalReport { points: samples.len(), primal_slack: primal, dual_slack: dual, max_slack: primal.max(dual) })
}
