//! Dense two-phase simplex for desk-scale linear programs.
//!
//! Bland's rule throughout, so the pivot sequence (and the reported vertex) is
//! a pure function of the input. Problems are limited to 64 user variables and
//! 256 constraints; nothing here is tuned for anything larger.

use crate::error::{Error, Result};

pub const MAX_VARIABLES: usize = 64;
pub const MAX_CONSTRAINTS: usize = 256;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;
const LEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bound>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(f64, Vec<f64>)> {
        match self {
            LpOutcome::Optimal { value, point } => Some((value, point)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    /// Re-solve over the optimal face to report its lexicographically
    /// smallest vertex. Costs one extra solve per variable.
    pub lexicographic: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { lexicographic: true }
    }
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram { sense, objective, constraints: Vec::new(), bounds: vec![Bound::NonNegative; n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn with_bounds(mut self, bounds: Vec<Bound>) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn free(mut self) -> Self {
        self.bounds = vec![Bound::Free; self.objective.len()];
        self
    }

    pub fn push(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn constrain(mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        self.push(coeffs, relation, rhs);
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidProgram("at least one variable".into()));
        }
        if n > MAX_VARIABLES {
            return Err(Error::InvalidProgram(format!("at most {MAX_VARIABLES} variables (got {n})")));
        }
        if self.constraints.len() > MAX_CONSTRAINTS {
            return Err(Error::InvalidProgram(format!(
                "at most {MAX_CONSTRAINTS} constraints (got {})",
                self.constraints.len()
            )));
        }
        if self.bounds.len() != n {
            return Err(Error::InvalidProgram("one bound per variable".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidProgram("finite objective".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::InvalidProgram(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidProgram(format!("constraint {i} is not finite")));
            }
        }
        Ok(())
    }
}

/// Solve with the default options (lexicographic tie-break on).
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    solve_lp_with(lp, LpOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, opts: LpOptions) -> Result<LpOutcome> {
    lp.validate()?;
    let first = solve_once(lp)?;
    if !opts.lexicographic {
        return Ok(first);
    }
    let (value, mut point) = match first {
        LpOutcome::Optimal { value, point } => (value, point),
        other => return Ok(other),
    };
    // Pin the objective, then walk the coordinates.
    let slack = LEX_TOL * (1.0 + value.abs());
    let mut face = lp.clone();
    match lp.sense {
        Sense::Minimize => face.push(lp.objective.clone(), Relation::Le, value + slack),
        Sense::Maximize => face.push(lp.objective.clone(), Relation::Ge, value - slack),
    }
    for k in 0..lp.num_vars() {
        if face.constraints.len() >= MAX_CONSTRAINTS {
            break;
        }
        let mut e = vec![0.0; lp.num_vars()];
        e[k] = 1.0;
        let probe = LinearProgram {
            sense: Sense::Minimize,
            objective: e.clone(),
            constraints: face.constraints.clone(),
            bounds: face.bounds.clone(),
        };
        if let LpOutcome::Optimal { value: xk, point: p } = solve_once(&probe)? {
            point = p;
            face.push(e, Relation::Le, xk + LEX_TOL * (1.0 + xk.abs()));
        }
    }
    let point = snap_to_active(lp, point);
    let value = dot(&lp.objective, &point);
    Ok(LpOutcome::Optimal { value, point })
}

/// Moves `p` the least distance that makes its near-active constraints
/// exact, undoing the small drift the pinned re-solves allow. Kept only if
/// the result is still feasible.
fn snap_to_active(lp: &LinearProgram, p: Vec<f64>) -> Vec<f64> {
    let n = lp.num_vars();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for c in &lp.constraints {
        let r = dot(&c.coeffs, &p) - c.rhs;
        if c.relation == Relation::Eq || r.abs() <= FEAS_TOL * (1.0 + c.rhs.abs()) {
            rows.push((c.coeffs.clone(), c.rhs));
        }
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        if *b == Bound::NonNegative && p[j].abs() <= FEAS_TOL {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            rows.push((e, 0.0));
        }
    }
    if rows.is_empty() {
        return p;
    }
    let a = nalgebra::DMatrix::from_fn(rows.len(), n, |i, j| rows[i].0[j]);
    let resid = nalgebra::DVector::from_fn(rows.len(), |i, _| rows[i].1 - dot(&rows[i].0, &p));
    let Ok(step) = a.svd(true, true).solve(&resid, 1e-12) else {
        return p;
    };
    let q: Vec<f64> = p.iter().zip(step.iter()).map(|(x, d)| x + d).collect();
    let feasible = lp.constraints.iter().all(|c| {
        let v = dot(&c.coeffs, &q);
        let t = FEAS_TOL * (1.0 + c.rhs.abs());
        match c.relation {
            Relation::Le => v <= c.rhs + t,
            Relation::Ge => v >= c.rhs - t,
            Relation::Eq => (v - c.rhs).abs() <= t,
        }
    }) && lp.bounds.iter().zip(&q).all(|(b, x)| *b == Bound::Free || *x >= -FEAS_TOL);
    if feasible {
        q.into_iter().zip(&lp.bounds).map(|(x, b)| if *b == Bound::NonNegative { x.max(0.0) } else { x }).collect()
    } else {
        p
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Column layout after splitting free variables: (user index, sign).
struct Layout {
    cols: Vec<(usize, f64)>,
}

struct Tableau {
    // rows x (ncols + 1); last column is the rhs
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.ncols + 1;
        let p = self.a[r][c];
        for j in 0..w {
            self.a[r][j] /= p;
        }
        let prow = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for j in 0..w {
                    row[j] -= f * prow[j];
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Minimize `cost` over the current basis using Bland's rule.
    /// `allowed` masks columns that may enter.
    fn run(&mut self, cost: &[f64], allowed: &[bool]) -> Result<bool> {
        let m = self.a.len();
        let limit = 50 * (m + self.ncols) + 1000;
        for _ in 0..limit {
            // reduced costs: c_j - c_B^T B^{-1} a_j, tableau already holds B^{-1}A
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j];
                for i in 0..m {
                    rc -= cost[self.basis[i]] * self.a[i][j];
                }
                if rc < -COST_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let aij = self.a[i][c];
                if aij > PIVOT_TOL {
                    let ratio = self.a[i][self.ncols] / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - 1e-12 || ((ratio - best).abs() <= 1e-12 && self.basis[i] < self.basis[r])
                            {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(Error::Numerical("simplex iteration limit reached".into()))
    }
}

fn solve_once(lp: &LinearProgram) -> Result<LpOutcome> {
    let n = lp.num_vars();
    let mut layout = Layout { cols: Vec::new() };
    for (j, b) in lp.bounds.iter().enumerate() {
        layout.cols.push((j, 1.0));
        if *b == Bound::Free {
            layout.cols.push((j, -1.0));
        }
    }
    let nstruct = layout.cols.len();
    let m = lp.constraints.len();
    let nslack = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let nart = m;
    let ncols = nstruct + nslack + nart;

    let mut a = vec![vec![0.0; ncols + 1]; m];
    let mut slack_at = nstruct;
    for (i, con) in lp.constraints.iter().enumerate() {
        let row = &mut a[i];
        for (k, &(j, s)) in layout.cols.iter().enumerate() {
            row[k] = s * con.coeffs[j];
        }
        match con.relation {
            Relation::Le => {
                row[slack_at] = 1.0;
                slack_at += 1;
            }
            Relation::Ge => {
                row[slack_at] = -1.0;
                slack_at += 1;
            }
            Relation::Eq => {}
        }
        row[ncols] = con.rhs;
        if con.rhs < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        row[nstruct + nslack + i] = 1.0;
    }
    let mut t = Tableau { a, basis: (0..m).map(|i| nstruct + nslack + i).collect(), ncols };

    // phase one
    let mut cost1 = vec![0.0; ncols];
    for c in cost1.iter_mut().skip(nstruct + nslack) {
        *c = 1.0;
    }
    let all = vec![true; ncols];
    t.run(&cost1, &all)?;
    let infeas: f64 = (0..m).filter(|&i| t.basis[i] >= nstruct + nslack).map(|i| t.a[i][ncols]).sum();
    let bnorm: f64 = lp.constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max);
    if infeas > FEAS_TOL * (1.0 + bnorm) {
        return Ok(LpOutcome::Infeasible);
    }
    // drive zero-level artificials out, dropping redundant rows
    let mut i = 0;
    while i < t.a.len() {
        if t.basis[i] >= nstruct + nslack {
            let col = (0..nstruct + nslack).find(|&j| t.a[i][j].abs() > 1e-9);
            match col {
                Some(c) => {
                    t.pivot(i, c);
                    i += 1;
                }
                None => {
                    t.a.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    // phase two
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut cost2 = vec![0.0; ncols];
    for (k, &(j, s)) in layout.cols.iter().enumerate() {
        cost2[k] = sign * s * lp.objective[j];
    }
    let mut allowed = vec![true; ncols];
    for flag in allowed.iter_mut().skip(nstruct + nslack) {
        *flag = false;
    }
    if !t.run(&cost2, &allowed)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut point = vec![0.0; n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < nstruct {
            let (j, s) = layout.cols[b];
            point[j] += s * t.a[r][ncols];
        }
    }
    let value = dot(&lp.objective, &point);
    if !value.is_finite() || point.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite simplex solution".into()));
    }
    Ok(LpOutcome::Optimal { value, point })
}

/// An affine functional `<coeffs, x> + constant`.
#[derive(Debug, Clone)]
pub struct Affine {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

impl Affine {
    pub fn linear(coeffs: Vec<f64>) -> Self {
        Affine { coeffs, constant: 0.0 }
    }

    pub fn at(&self, x: &[f64]) -> f64 {
        dot(&self.coeffs, x) + self.constant
    }
}

/// Half-space `<normal, x> >= offset`.
#[derive(Debug, Clone)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// A bounded polyhedron in R^d.
#[derive(Debug, Clone)]
pub enum Region {
    /// `conv(generators)` cut by extra half-spaces.
    Hull { generators: Vec<Vec<f64>>, cuts: Vec<HalfSpace> },
    /// Intersection of half-spaces; must be bounded.
    Halfspaces { dim: usize, rows: Vec<HalfSpace> },
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Hull { generators, .. } => generators.first().map_or(0, Vec::len),
            Region::Halfspaces { dim, .. } => *dim,
        }
    }

    /// Max or min of a linear functional, with the attaining point.
    pub fn optimize(&self, sense: Sense, f: &[f64], opts: LpOptions) -> Result<Option<(f64, Vec<f64>)>> {
        match self {
            Region::Hull { generators, cuts } => {
                let k = generators.len();
                let obj: Vec<f64> = generators.iter().map(|g| dot(g, f)).collect();
                let mut lp = LinearProgram::new(sense, obj).constrain(vec![1.0; k], Relation::Eq, 1.0);
                for h in cuts {
                    let row = generators.iter().map(|g| dot(g, &h.normal)).collect();
                    lp.push(row, Relation::Ge, h.offset);
                }
                Ok(match solve_lp_with(&lp, opts)? {
                    LpOutcome::Optimal { value, point } => Some((value, combine(generators, &point))),
                    LpOutcome::Infeasible => None,
                    LpOutcome::Unbounded => return Err(Error::Numerical("hull LP unbounded".into())),
                })
            }
            Region::Halfspaces { rows, .. } => {
                let mut lp = LinearProgram::new(sense, f.to_vec()).free();
                for h in rows {
                    lp.push(h.normal.clone(), Relation::Ge, h.offset);
                }
                Ok(match solve_lp_with(&lp, opts)? {
                    LpOutcome::Optimal { value, point } => Some((value, point)),
                    LpOutcome::Infeasible => None,
                    LpOutcome::Unbounded => return Err(Error::InvalidProgram("region must be bounded".into())),
                })
            }
        }
    }
}

pub(crate) fn combine(generators: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    let d = generators.first().map_or(0, Vec::len);
    let mut x = vec![0.0; d];
    for (g, wi) in generators.iter().zip(w) {
        for (xj, gj) in x.iter_mut().zip(g) {
            *xj += wi * gj;
        }
    }
    x
}

#[derive(Debug, Clone)]
pub struct FractionalExtrema {
    pub min: f64,
    pub argmin: Vec<f64>,
    pub max: f64,
    pub argmax: Vec<f64>,
}

/// Extrema of `num(x) / den(x)` over a region via the Charnes–Cooper
/// transform. `den` must be positive on the whole region.
pub fn solve_linear_fractional(num: &Affine, den: &Affine, region: &Region) -> Result<FractionalExtrema> {
    let d = region.dim();
    if num.coeffs.len() != d || den.coeffs.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: num.coeffs.len().max(den.coeffs.len()) });
    }
    let opts = LpOptions { lexicographic: false };
    let dmin = region
        .optimize(Sense::Minimize, &den.coeffs, opts)?
        .ok_or_else(|| Error::Domain("feasible region is empty".into()))?;
    if dmin.0 + den.constant <= FEAS_TOL {
        return Err(Error::Domain("denominator must be positive on the region".into()));
    }
    let (min, argmin) = charnes_cooper(num, den, region, Sense::Minimize)?;
    let (max, argmax) = charnes_cooper(num, den, region, Sense::Maximize)?;
    Ok(FractionalExtrema { min, argmin, max, argmax })
}

/// Maps an LP solution back to `(x, s)`.
type Unpack = Box<dyn Fn(&[f64]) -> (Vec<f64>, f64)>;

fn charnes_cooper(num: &Affine, den: &Affine, region: &Region, sense: Sense) -> Result<(f64, Vec<f64>)> {
    // variables (z, s) with x = z / s
    let (lp, unpack): (LinearProgram, Unpack) = match region {
        Region::Hull { generators, cuts } => {
            let k = generators.len();
            let mut obj: Vec<f64> = generators.iter().map(|g| dot(g, &num.coeffs)).collect();
            obj.push(num.constant);
            let mut lp = LinearProgram::new(sense, obj);
            let mut row: Vec<f64> = generators.iter().map(|g| dot(g, &den.coeffs)).collect();
            row.push(den.constant);
            lp.push(row, Relation::Eq, 1.0);
            let mut simplex = vec![1.0; k];
            simplex.push(-1.0);
            lp.push(simplex, Relation::Eq, 0.0);
            for h in cuts {
                let mut row: Vec<f64> = generators.iter().map(|g| dot(g, &h.normal)).collect();
                row.push(-h.offset);
                lp.push(row, Relation::Ge, 0.0);
            }
            let gens = generators.clone();
            (lp, Box::new(move |p: &[f64]| (combine(&gens, &p[..k]), p[k])))
        }
        Region::Halfspaces { dim, rows } => {
            let d = *dim;
            let mut obj = num.coeffs.clone();
            obj.push(num.constant);
            let mut bounds = vec![Bound::Free; d];
            bounds.push(Bound::NonNegative);
            let mut lp = LinearProgram::new(sense, obj).with_bounds(bounds);
            let mut row = den.coeffs.clone();
            row.push(den.constant);
            lp.push(row, Relation::Eq, 1.0);
            for h in rows {
                let mut row = h.normal.clone();
                row.push(-h.offset);
                lp.push(row, Relation::Ge, 0.0);
            }
            (lp, Box::new(move |p: &[f64]| (p[..d].to_vec(), p[d])))
        }
    };
    match solve_lp_with(&lp, LpOptions { lexicographic: false })? {
        LpOutcome::Optimal { value, point } => {
            let (z, s) = unpack(&point);
            if s <= 1e-14 {
                return Err(Error::Numerical("Charnes-Cooper scale vanished".into()));
            }
            Ok((value, z.iter().map(|v| v / s).collect()))
        }
        LpOutcome::Infeasible => Err(Error::Domain("feasible region is empty".into())),
        LpOutcome::Unbounded => Err(Error::Numerical("linear-fractional program unbounded".into())),
    }
}
