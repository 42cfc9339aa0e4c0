//! Plain `&[f64]` helpers. Dimensions are small, so nothing clever here.

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| -x).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// `s * a + b`
pub fn lin(s: f64, a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| s * x + y).collect()
}

pub fn is_zero(a: &[f64]) -> bool {
    a.iter().all(|v| *v == 0.0)
}

pub fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

pub fn check_dim(expected: usize, v: &[f64]) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: v.len() });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("vector coordinates must be finite".into()));
    }
    Ok(())
}

/// Modified Gram–Schmidt. Returns `None` when the vectors are dependent.
pub fn orthonormalize(vs: &[Vec<f64>], tol: f64) -> Option<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = dot(&w, q);
                w = axpy(&w, -c, q);
            }
        }
        let n = norm(&w);
        if n <= tol * (1.0 + norm(v)) {
            return None;
        }
        out.push(scale(&w, 1.0 / n));
    }
    Some(out)
}

/// Orthonormal basis of the orthogonal complement of `span(q)`, where `q`
/// is already orthonormal.
pub fn complement(q: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = q.to_vec();
    let mut extra = Vec::new();
    for i in 0..d {
        if all.len() == d {
            break;
        }
        let mut w = unit(d, i);
        for _ in 0..2 {
            for b in &all {
                let c = dot(&w, b);
                w = axpy(&w, -c, b);
            }
        }
        let n = norm(&w);
        if n > 1e-8 {
            let w = scale(&w, 1.0 / n);
            all.push(w.clone());
            extra.push(w);
        }
    }
    extra
}
