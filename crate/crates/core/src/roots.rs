//! Sign-change scanning with bisection refinement.

use std::f64::consts::PI;

/// Default scan step for all one-dimensional root searches.
pub const SCAN_STEP: f64 = PI / 200.0;

/// Bisection stops once the bracket is narrower than this.
pub const BISECT_TOL: f64 = 1e-12;

/// Two roots closer than this are treated as a double root.
pub const DOUBLE_ROOT_GAP: f64 = 1e-6;

/// Refines a bracket `[a, b]` with `f(a)` and `f(b)` of opposite signs.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        if (b - a).abs() < BISECT_TOL {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Roots of `f` on `(lo, hi]` found by a uniform sign-change scan.
///
/// `f` may return `None` where it is undefined; brackets touching an
/// undefined sample are skipped. `sign_at_lo` overrides the sign used at the
/// left endpoint, which lets callers supply a series-expansion sign where
/// the function itself vanishes identically.
pub fn scan_roots<F>(f: F, lo: f64, hi: f64, step: f64, sign_at_lo: Option<f64>) -> Vec<f64>
where
    F: Fn(f64) -> Option<f64>,
{
    let mut roots = Vec::new();
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return roots;
    }
    let steps = ((hi - lo) / step).ceil().max(1.0) as usize;
    let h = (hi - lo) / steps as f64;
    let mut prev_x = lo;
    let mut prev = match sign_at_lo {
        Some(s) => Some(s),
        None => f(lo),
    };
    for k in 1..=steps {
        let x = if k == steps { hi } else { lo + k as f64 * h };
        let cur = f(x);
        if let (Some(p), Some(c)) = (prev, cur) {
            if c == 0.0 {
                roots.push(x);
            } else if p != 0.0 && (p > 0.0) != (c > 0.0) {
                let g = |s: f64| f(s).unwrap_or(f64::NAN);
                let fa = if k == 1 && sign_at_lo.is_some() { p } else { g(prev_x) };
                roots.push(bisect(&g, prev_x, x, fa));
            }
        }
        prev_x = x;
        prev = cur;
    }
    roots
}

/// True when two consecutive entries of a sorted list are closer than
/// [`DOUBLE_ROOT_GAP`].
pub fn has_close_pair(sorted: &[f64]) -> bool {
    sorted.windows(2).any(|w| (w[1] - w[0]).abs() < DOUBLE_ROOT_GAP)
}
