//! Independent ground truth by brute force.
//!
//! [`count_rhp_zeros`] winds `H(sigma)` around a right-half-plane rectangle.
//! The grid counters scan `h - G1(y)` and `tan(y/2) - E(y)` on a fixed fine
//! grid without using any of the structure the analytic code relies on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::harmonic::{Branch, EValue, HarmonicContext};
use crate::plant::{ControllerPoint, NormalizedPlant};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub x_max: f64,
    pub y_max: f64,
    pub samples_per_unit: usize,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            x_max: 30.0,
            y_max: 40.0 * PI,
            samples_per_unit: 50,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub rhp_zeros: usize,
    /// Contour the reported count was taken on.
    pub contour: ContourSpec,
    /// Counts agreed on the taller, denser check contour.
    pub certified: bool,
    /// Poles of `H` (at `-1/z_i`) inside the rectangle.
    pub poles_inside: usize,
    pub winding: i64,
}

/// Maximum `|arg|` step between neighbouring samples before subdividing.
const MAX_PHASE_STEP: f64 = 0.5;
const MAX_DEPTH: u32 = 24;
/// Relative `|H|` below which the contour is taken to pass through a zero.
const HIT_TOL: f64 = 1e-10;

/// `H(sigma) = sigma e^sigma R(sigma) + h_i + h sigma + h_d sigma^2`, up to a
/// positive real factor, plus a flag for passing (nearly) through zero.
struct Evaluator<'a> {
    t: &'a [f64],
    z: &'a [f64],
    point: ControllerPoint,
}

impl Evaluator<'_> {
    fn eval(&self, s: Complex64) -> Option<(Complex64, bool)> {
        let one = Complex64::new(1.0, 0.0);
        let rest = self.point.hi + s * self.point.h + s * s * self.point.hd;
        let mut log = s;
        if s.norm() == 0.0 {
            let hit = rest.norm() <= HIT_TOL * (1.0 + self.point.hi.abs());
            return Some((rest, hit));
        }
        log += s.ln();
        for &t in self.t {
            let f = one + s * t;
            if f.norm() == 0.0 {
                return Some((rest, rest.norm() <= HIT_TOL));
            }
            log += f.ln();
        }
        for &z in self.z {
            let f = one + s * z;
            if f.norm() == 0.0 {
                return None;
            }
            log -= f.ln();
        }
        if log.re > 600.0 {
            // phase from the factored form, magnitude dropped
            let ratio = rest * (-log).exp();
            let v = Complex64::from_polar(1.0, log.im) * (one + ratio);
            return Some((v, (one + ratio).norm() <= HIT_TOL));
        }
        let lead = log.exp();
        let v = lead + rest;
        let scale = 1.0 + lead.norm() + rest.norm();
        Some((v, v.norm() <= HIT_TOL * scale))
    }
}

fn phase_step(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}

/// Sum of phase increments of `H` along the segment `p -> q`.
fn segment_phase(ev: &Evaluator, p: Complex64, q: Complex64, n: usize) -> Result<f64> {
    fn refine(
        ev: &Evaluator,
        a: Complex64,
        va: Complex64,
        b: Complex64,
        vb: Complex64,
        depth: u32,
    ) -> Result<f64> {
        let d = phase_step(va, vb);
        if d.abs() <= MAX_PHASE_STEP || depth >= MAX_DEPTH {
            return Ok(d);
        }
        let m = 0.5 * (a + b);
        let (vm, hit) = ev.eval(m).ok_or(Error::ContourHitsZero { attempts: 0 })?;
        if hit {
            return Err(Error::ContourHitsZero { attempts: 0 });
        }
        Ok(refine(ev, a, va, m, vm, depth + 1)? + refine(ev, m, vm, b, vb, depth + 1)?)
    }

    let n = n.max(1);
    let mut total = 0.0;
    let sample = |k: usize| -> Result<(Complex64, Complex64)> {
        let s = p + (q - p) * (k as f64 / n as f64);
        match ev.eval(s) {
            Some((v, false)) => Ok((s, v)),
            _ => Err(Error::ContourHitsZero { attempts: 0 }),
        }
    };
    let (mut a, mut va) = sample(0)?;
    for k in 1..=n {
        let (b, vb) = sample(k)?;
        total += refine(ev, a, va, b, vb, 0)?;
        a = b;
        va = vb;
    }
    Ok(total)
}

/// Winding number of `H` around the rectangle, or an error if the contour
/// passes through a zero or the phase does not close.
fn winding(np: &NormalizedPlant, point: &ControllerPoint, spec: &ContourSpec, exec: Execution) -> Result<i64> {
    let ev = Evaluator {
        t: np.t(),
        z: np.z(),
        point: *point,
    };
    let (x, y) = (spec.x_max, spec.y_max);
    let c = |re: f64, im: f64| Complex64::new(re, im);
    // counterclockwise, with the origin as a vertex of the left edge
    let corners = [c(0.0, -y), c(x, -y), c(x, y), c(0.0, y), c(0.0, 0.0), c(0.0, -y)];
    let mut segments = Vec::new();
    for w in corners.windows(2) {
        let len = (w[1] - w[0]).norm();
        let pieces = ((len / 8.0).ceil() as usize).max(1);
        for k in 0..pieces {
            let p = w[0] + (w[1] - w[0]) * (k as f64 / pieces as f64);
            let q = w[0] + (w[1] - w[0]) * ((k + 1) as f64 / pieces as f64);
            let n = ((len / pieces as f64) * spec.samples_per_unit as f64).ceil() as usize;
            segments.push((p, q, n));
        }
    }
    let parts = exec.map(&segments, |&(p, q, n)| segment_phase(&ev, p, q, n));
    let mut total = 0.0;
    for part in parts {
        total += part?;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() * 2.0 * PI > 0.05 * 2.0 * PI {
        return Err(Error::Degenerate(format!("winding number {turns} is not integral")));
    }
    Ok(rounded as i64)
}

fn poles_inside(np: &NormalizedPlant, x_max: f64) -> usize {
    np.z()
        .iter()
        .filter(|z| **z < 0.0 && -1.0 / **z < x_max)
        .count()
}

fn count_on(np: &NormalizedPlant, point: &ControllerPoint, spec: &ContourSpec, exec: Execution) -> Result<(i64, usize)> {
    let mut last = None;
    for density in [1, 4, 16] {
        let s = ContourSpec {
            samples_per_unit: spec.samples_per_unit * density,
            ..*spec
        };
        match winding(np, point, &s, exec) {
            Ok(w) => {
                let poles = poles_inside(np, spec.x_max);
                return Ok((w + poles as i64, poles));
            }
            Err(Error::Degenerate(msg)) => last = Some(Error::Degenerate(msg)),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::Degenerate("winding failed".into())))
}

/// Number of zeros of `H` with `0 < Re sigma < x_max`, `|Im sigma| < y_max`.
///
/// If the contour runs into a zero, `y_max` is moved up by `pi/7` and the
/// count retried, up to three times. The count is certified when a contour
/// `2 pi` taller at twice the sampling density gives the same answer.
pub fn count_rhp_zeros(
    np: &NormalizedPlant,
    point: &ControllerPoint,
    spec: &ContourSpec,
    exec: Execution,
) -> Result<ZeroCount> {
    if !point.is_finite() || spec.samples_per_unit < 1 || !(spec.x_max > 0.0 && spec.y_max > 0.0) {
        return Err(Error::InvalidArgument("contour or controller point not finite".into()));
    }
    let mut attempts = 0;
    let mut spec = *spec;
    let (count, poles) = loop {
        match count_on(np, point, &spec, exec) {
            Ok(v) => break v,
            Err(Error::ContourHitsZero { .. }) => {
                attempts += 1;
                if attempts >= 3 {
                    return Err(Error::ContourHitsZero { attempts });
                }
                spec.y_max += PI / 7.0;
            }
            Err(e) => return Err(e),
        }
    };
    let check = ContourSpec {
        y_max: spec.y_max + 2.0 * PI,
        samples_per_unit: 2 * spec.samples_per_unit,
        ..spec
    };
    let certified = matches!(count_on(np, point, &check, exec), Ok((c, _)) if c == count);
    if count < 0 {
        return Err(Error::Degenerate(format!("negative zero count {count}")));
    }
    Ok(ZeroCount {
        rhp_zeros: count as usize,
        contour: spec,
        certified,
        poles_inside: poles,
        winding: count - poles as i64,
    })
}

/// Grid step of the brute-force counters.
pub const GRID_STEP: f64 = PI / 400.0;

fn grid(lo: f64, hi: f64) -> Vec<f64> {
    let n = ((hi - lo) / GRID_STEP).ceil().max(1.0) as usize;
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

/// Real roots of `G(y) = y (h - G1(y))` in `[y_lo, y_hi]`, including
/// `y = 0` when it lies in the interval, by sign changes on a fine grid.
pub fn grid_count_g_roots(ctx: &HarmonicContext, h: f64, y_lo: f64, y_hi: f64) -> Result<usize> {
    if y_hi.is_nan() || y_lo.is_nan() || y_hi <= y_lo {
        return Ok(0);
    }
    let f = |y: f64| ctx.g1(y).map(|g| h - g);
    let mut count = usize::from(y_lo <= 0.0 && 0.0 <= y_hi);
    let mut prev: Option<f64> = None;
    for y in grid(y_lo, y_hi) {
        let v = f(y)?;
        if v.abs() < 1e-12 {
            return Err(Error::Degenerate(format!("h - G1 vanishes on a grid point y = {y}")));
        }
        if let Some(p) = prev {
            if (p > 0.0) != (v > 0.0) {
                count += 1;
            }
        }
        prev = Some(v);
    }
    Ok(count)
}

/// `tan(y/2) - E(y)` and the scale `1 + |tan| + |E|` it is judged against.
fn tan_minus_e(ctx: &HarmonicContext, y: f64, branch: Branch) -> Option<(f64, f64)> {
    let half = 0.5 * y;
    if half.cos().abs() < 1e-9 {
        return None;
    }
    match ctx.e(y, branch) {
        Ok(EValue::Finite(e)) => {
            let t = half.tan();
            Some((t - e, 1.0 + t.abs() + e.abs()))
        }
        _ => None,
    }
}

/// The regular grid refined geometrically on both sides of every pole of
/// `tan(y/2)`, so a crossing right next to a pole gets its own cell.
fn crossing_grid(lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = grid(lo, hi);
    let first = ((lo / PI - 1.0) / 2.0).ceil() as i64;
    let last = ((hi / PI - 1.0) / 2.0).floor() as i64;
    for k in first..=last {
        let pole = (2 * k + 1) as f64 * PI;
        for e in 3..=8 {
            let d = 10f64.powi(-e);
            pts.extend([pole - d, pole + d].into_iter().filter(|y| (lo..=hi).contains(y)));
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn count_crossings(ctx: &HarmonicContext, branch: Branch, lo: f64, hi: f64) -> usize {
    let f = |y: f64| tan_minus_e(ctx, y, branch).map(|v| v.0);
    let pts = crossing_grid(lo, hi);
    let mut count = 0;
    for w in pts.windows(2) {
        let (Some(fa), Some(fb)) = (f(w[0]), f(w[1])) else { continue };
        if fa == 0.0 || (fa > 0.0) == (fb > 0.0) {
            continue;
        }
        // a pole of tan or of E also flips the sign; bisect and look at
        // the relative size of the difference at the limit point
        let (mut a, mut b, mut sa) = (w[0], w[1], fa);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            let Some(fm) = f(m) else { break };
            if (fm > 0.0) == (sa > 0.0) {
                a = m;
                sa = fm;
            } else {
                b = m;
            }
        }
        if tan_minus_e(ctx, 0.5 * (a + b), branch).is_some_and(|(v, scale)| v.abs() < 1e-6 * scale) {
            count += 1;
        }
    }
    count
}

/// Intersections of `tan(y/2)` with both branches of `E(y)` in
/// `[y_lo, y_hi]`, excluding the one at `y = 0`.
pub fn grid_count_tan_e_intersections(ctx: &HarmonicContext, y_lo: f64, y_hi: f64) -> usize {
    if y_hi.is_nan() || y_lo.is_nan() || y_hi <= y_lo {
        return 0;
    }
    const GAP: f64 = 1e-7;
    let mut ranges = Vec::new();
    if y_lo < -GAP {
        ranges.push((y_lo, y_hi.min(-GAP)));
    }
    if y_hi > GAP {
        ranges.push((y_lo.max(GAP), y_hi));
    }
    ranges
        .into_iter()
        .map(|(a, b)| {
            Branch::BOTH
                .iter()
                .map(|br| count_crossings(ctx, *br, a, b))
                .sum::<usize>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> HarmonicContext {
        HarmonicContext::new(NormalizedPlant::new(vec![0.6, 0.8], vec![]).unwrap())
    }

    #[test]
    fn example_points() {
        let ctx = example();
        let spec = ContourSpec::default();
        let inside = count_rhp_zeros(ctx.plant(), &ControllerPoint::new(0.5, 1.0, 0.5), &spec, Execution::Parallel).unwrap();
        assert_eq!(inside.rhp_zeros, 0);
        assert!(inside.certified);
        let outside = count_rhp_zeros(ctx.plant(), &ControllerPoint::new(0.5, 5.0, 0.0), &spec, Execution::Parallel).unwrap();
        assert!(outside.rhp_zeros >= 1);
    }

    #[test]
    fn zero_integral_gain_hits_the_contour() {
        let ctx = example();
        let r = count_rhp_zeros(
            ctx.plant(),
            &ControllerPoint::new(0.5, 0.0, 0.5),
            &ContourSpec::default(),
            Execution::Sequential,
        );
        assert_eq!(r, Err(Error::ContourHitsZero { attempts: 3 }));
    }

    #[test]
    fn polynomial_only_case_counts_known_zeros() {
        // first-order plant t -> 0 is not allowed, but a pure quadratic
        // controller with huge negative h_i pushes a real zero into the RHP
        let np = NormalizedPlant::new(vec![1.0], vec![]).unwrap();
        let c = count_rhp_zeros(&np, &ControllerPoint::new(0.0, -1.0, 0.0), &ContourSpec::default(), Execution::Sequential).unwrap();
        // H(0) = -1 < 0 and H(x) -> +inf along the real axis
        assert!(c.rhp_zeros >= 1);
    }

    #[test]
    fn nonminimum_phase_zero_is_compensated() {
        let np = NormalizedPlant::new(vec![1.0, 0.5], vec![-0.2]).unwrap();
        let c = count_rhp_zeros(&np, &ControllerPoint::new(0.1, 0.05, 0.0), &ContourSpec::default(), Execution::Sequential).unwrap();
        assert_eq!(c.poles_inside, 1);
        assert_eq!(c.winding, c.rhp_zeros as i64 - 1);
    }

    #[test]
    fn g_root_grid_counts() {
        let ctx = example();
        assert_eq!(grid_count_g_roots(&ctx, 0.5, 1e-9, 3.0 * PI).unwrap(), 4);
        assert_eq!(grid_count_g_roots(&ctx, 0.5, -8.0 * PI, 8.0 * PI).unwrap(), 19);
        assert_eq!(grid_count_g_roots(&ctx, 0.5, 1.0, 1.0).unwrap(), 0);
    }

    #[test]
    fn tan_e_grid_counts() {
        let ctx = example();
        // Phi table gives no intersection near the origin; the single pole
        // of E at y = 2.04 adds one on each side
        let inner = grid_count_tan_e_intersections(&ctx, -PI + 1e-3, PI - 1e-3);
        assert_eq!(inner, 2);
        let first_order = HarmonicContext::new(NormalizedPlant::new(vec![1.3], vec![]).unwrap());
        assert_eq!(grid_count_tan_e_intersections(&first_order, -PI + 1e-3, PI - 1e-3), 0);
        let a = grid_count_tan_e_intersections(&ctx, -(10.0 * PI), 10.0 * PI);
        let b = grid_count_tan_e_intersections(&ctx, -(12.0 * PI), 12.0 * PI);
        assert_eq!(b - a, 4);
    }
}
