//! One-dimensional searches shared by the numeric routines.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `tol` (absolute) or after
/// `max_iter` shrinks. Returns the best point seen.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    let mut best = (a, f(a));
    let fb = f(b);
    if fb < best.1 {
        best = (b, fb);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        if f1 < best.1 {
            best = (x1, f1);
        }
        if f2 < best.1 {
            best = (x2, f2);
        }
    }
    best
}

/// Boundary of a monotone predicate between a point where it holds and one
/// where it fails. Returns the last point known to satisfy it.
pub fn bisect(pred: impl Fn(f64) -> bool, mut inside: f64, mut outside: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if (outside - inside).abs() <= tol {
            break;
        }
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Walk away from `start` in direction `sign` with doubling steps until
/// `pred` fails. Returns the first failing point, or `None` after 200 steps.
pub fn expand_until_false(pred: impl Fn(f64) -> bool, start: f64, sign: f64, step: f64) -> Option<f64> {
    let mut h = step;
    for _ in 0..200 {
        let x = start + sign * h;
        if !pred(x) {
            return Some(x);
        }
        h *= 2.0;
    }
    None
}
