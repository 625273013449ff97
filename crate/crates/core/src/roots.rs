//! Scalar root finders for monotone functions.
//!
//! Every routine here works on a strictly *increasing* function given as a
//! closure returning `(value, derivative)`. Callers with decreasing functions
//! negate both components.

/// Outcome of a bracketed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection down to `xtol`, followed by `polish` Newton steps.
///
/// A Newton step is kept only if it stays inside the final bracket and does
/// not increase `|f|`. If `f(lo) >= 0` the answer is `lo`; if `f(hi) <= 0` it
/// is `hi` (the root sits on, or beyond, the bracket edge).
pub fn bisect_polish<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64, polish: usize) -> Root
where
    F: Fn(f64) -> (f64, f64),
{
    let (f_lo, _) = f(lo);
    if f_lo >= 0.0 {
        return Root { x: lo, residual: f_lo, iterations: 0 };
    }
    let (f_hi, _) = f(hi);
    if f_hi <= 0.0 {
        return Root { x: hi, residual: f_hi, iterations: 0 };
    }
    let mut iterations = 0;
    while hi - lo > xtol && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (v, _) = f(mid);
        if v == 0.0 {
            return Root { x: mid, residual: 0.0, iterations };
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let mut x = 0.5 * (lo + hi);
    let (mut v, mut dv) = f(x);
    for _ in 0..polish {
        if dv <= 0.0 || !dv.is_finite() {
            break;
        }
        let cand = x - v / dv;
        if !(cand >= lo && cand <= hi) {
            break;
        }
        let (cv, cdv) = f(cand);
        iterations += 1;
        if cv.abs() > v.abs() {
            break;
        }
        x = cand;
        v = cv;
        dv = cdv;
    }
    Root { x, residual: v, iterations }
}

/// Newton's method safeguarded by a sign-change bracket `f(lo) < 0 < f(hi)`.
///
/// Falls back to bisection whenever the Newton iterate leaves the bracket or
/// the derivative is unusable. Stops when the step or the bracket is below
/// `xtol` (relative to `1 + |x|`).
pub fn safeguarded_newton<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Root
where
    F: Fn(f64) -> (f64, f64),
{
    let mut x = 0.5 * (lo + hi);
    let (mut v, mut dv) = f(x);
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        if v == 0.0 {
            break;
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = if dv > 0.0 && dv.is_finite() { x - v / dv } else { f64::NAN };
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = (next - x).abs();
        x = next;
        let (nv, ndv) = f(x);
        v = nv;
        dv = ndv;
        let scale = 1.0 + x.abs();
        if step <= xtol * scale || (hi - lo) <= xtol * scale {
            break;
        }
    }
    Root { x, residual: v, iterations }
}

/// Geometric bracket expansion for an increasing function.
///
/// Starts from `[-1, 1]` and doubles the offending side until the signs
/// straddle zero or `|x|` exceeds `limit`. Returns `Err((f(lo), f(hi)))` with
/// the last probed values when no bracket is found.
pub fn expand_bracket<F>(f: F, limit: f64) -> Result<(f64, f64), (f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (-1.0, 1.0);
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    loop {
        if f_lo.is_nan() || f_hi.is_nan() {
            return Err((f_lo, f_hi));
        }
        if f_lo == 0.0 {
            return Ok((lo, lo));
        }
        if f_hi == 0.0 {
            return Ok((hi, hi));
        }
        if f_lo < 0.0 && f_hi > 0.0 {
            return Ok((lo, hi));
        }
        if f_lo > 0.0 {
            if lo.abs() >= limit {
                return Err((f_lo, f_hi));
            }
            hi = lo;
            f_hi = f_lo;
            lo *= 2.0;
            f_lo = f(lo);
        } else {
            if hi >= limit {
                return Err((f_lo, f_hi));
            }
            lo = hi;
            f_lo = f_hi;
            hi *= 2.0;
            f_hi = f(hi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_polish_finds_sqrt2() {
        let r = bisect_polish(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1e-12, 2);
        assert!((r.x - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bisect_polish_edges() {
        assert_eq!(bisect_polish(|x| (x, 1.0), 0.0, 1.0, 1e-12, 2).x, 0.0);
        assert_eq!(bisect_polish(|x| (x - 1.0, 1.0), 0.0, 1.0, 1e-12, 2).x, 1.0);
    }

    #[test]
    fn newton_with_bracket() {
        let r = safeguarded_newton(|x: f64| (x.exp() - 3.0, x.exp()), -10.0, 10.0, 1e-15, 100);
        assert!((r.x - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn expansion_reaches_far_roots() {
        let (lo, hi) = expand_bracket(|x| x - 1000.0, 1e6).unwrap();
        assert!(lo < 1000.0 && hi > 1000.0);
        let (lo, hi) = expand_bracket(|x| x + 37.0, 1e6).unwrap();
        assert!(lo < -37.0 && hi > -37.0);
        assert!(expand_bracket(|_| 1.0, 1e3).is_err());
    }
}
