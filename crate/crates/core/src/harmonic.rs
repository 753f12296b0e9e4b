//! Real and imaginary parts of the characteristic function on the imaginary
//! axis, and the quantities derived from them.
//!
//! With `sigma = j y` the characteristic function splits as
//! `F(y) = h_e - F1(y)` and `G(y) = y (h - G1(y))`, where
//! `F1 = y (Q cos y + P sin y)`, `G1 = -P cos y + Q sin y` and
//! `h_e = h_i - h_d y^2`. Setting `h = -1` in `G = 0` turns into the
//! half-angle equation `tan(y/2) = E(y)` with
//! `E = (-Q +- sqrt(P^2 + Q^2 - 1)) / (1 + P)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::plant::{ControllerPoint, NormalizedPlant};
use crate::poly::Poly;
use crate::roots::{bisect, scan_roots, SCAN_STEP};

/// Absolute tolerance for comparisons against zero.
pub const ZERO_TOL: f64 = 1e-10;

/// `P`, `Q` and their first two derivatives at one frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub p: f64,
    pub q: f64,
    pub dp: f64,
    pub dq: f64,
    pub d2p: f64,
    pub d2q: f64,
}

/// Branch of the square root in `E(y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Minus, Branch::Plus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            Branch::Plus => 1.0,
        }
    }
}

/// Value of one branch of `E(y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EValue {
    Finite(f64),
    /// `1 + P` vanishes while the numerator does not; `sign` is the sign of
    /// the numerator.
    Pole { sign: f64 },
}

impl EValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            EValue::Finite(v) => Some(v),
            EValue::Pole { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub y: f64,
    pub branch: Branch,
    /// `None` at a pole.
    pub value: Option<f64>,
}

/// A point where `tan(y/2)` and one branch of `E` have equal slopes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tangency {
    pub y: f64,
    pub branch: Branch,
    /// `tan(y/2) - E(y)` at the tangency abscissa.
    pub ed: f64,
}

/// A local extremum of `G1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub y: f64,
    pub g1: f64,
    pub hm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    /// Largest positive stationary point of the extremum envelope, if any.
    pub y_r1: Option<f64>,
    pub extrema: Vec<Extremum>,
}

/// `(Phi1, Phi2)`: the slope classifiers at `y = 0`. `Phi2` equals `G1''(0)`.
pub fn eval_phi(np: &NormalizedPlant) -> (f64, f64) {
    let (u1, u2) = (np.u(1), np.u(2));
    let (v1, v2) = (np.v(1), np.v(2));
    let phi1 = 1.0 + u1 - v1;
    let phi2 = 1.0 + 2.0 * u1 + 2.0 * u2 - 2.0 * u1 * v1 + 2.0 * v1 * v1 - 2.0 * v1 - 2.0 * v2;
    (phi1, phi2)
}

/// Slopes `(E'_-(0), E'_+(0))` of both branches at the origin.
pub fn eval_e_slope_at_zero(np: &NormalizedPlant) -> Result<(f64, f64)> {
    let (u1, u2) = (np.u(1), np.u(2));
    let (v1, v2) = (np.v(1), np.v(2));
    let radicand = u1 * u1 - 2.0 * u2 - v1 * v1 + 2.0 * v2;
    if radicand < 0.0 {
        return Err(Error::ImaginarySlope(radicand));
    }
    let mid = 0.5 * (v1 - u1);
    let half = 0.5 * radicand.sqrt();
    Ok((mid - half, mid + half))
}

/// Sum of squares of the time constants minus that of the zero constants.
/// `E` is defined at the origin only when this is positive.
pub fn origin_existence_margin(np: &NormalizedPlant) -> f64 {
    np.t().iter().map(|t| t * t).sum::<f64>() - np.z().iter().map(|z| z * z).sum::<f64>()
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Value and first two derivatives of `num / den` at `y`.
fn rational_jet(num: &[Poly; 3], den: &[Poly; 3], y: f64) -> (f64, f64, f64) {
    let (n0, n1, n2) = (num[0].eval(y), num[1].eval(y), num[2].eval(y));
    let (d0, d1, d2) = (den[0].eval(y), den[1].eval(y), den[2].eval(y));
    let f = n0 / d0;
    let f1 = (n1 * d0 - n0 * d1) / (d0 * d0);
    let f2 = (n2 - 2.0 * f1 * d1 - f * d2) / d0;
    (f, f1, f2)
}

fn with_derivatives(p: &Poly) -> [Poly; 3] {
    let d1 = p.derivative();
    let d2 = d1.derivative();
    [p.clone(), d1, d2]
}

/// Immutable evaluator for everything that depends on the plant alone.
#[derive(Clone, Debug)]
pub struct HarmonicContext {
    plant: NormalizedPlant,
    p_num: [Poly; 3],
    q_num: [Poly; 3],
    den: [Poly; 3],
    phi: (f64, f64),
    transient: f64,
}

impl HarmonicContext {
    pub fn new(plant: NormalizedPlant) -> Self {
        let (pn, den) = plant.p_rational();
        let (qn, _) = plant.q_rational();
        let p_num = with_derivatives(pn);
        let q_num = with_derivatives(qn);
        let den_j = with_derivatives(den);

        // Everything non-periodic (poles of E, the edge of the real branch)
        // lives below these root bounds.
        let pole_poly = (&den_j[0] + &p_num[0]).even_part_in_square();
        let a = plant.poly_a();
        let b = plant.poly_b();
        let disc_poly = (&(&(a * a) + &(b * b)) - &den_j[0]).even_part_in_square();
        let transient = pole_poly
            .cauchy_bound()
            .max(disc_poly.chop(1e-14).cauchy_bound())
            .sqrt();

        let phi = eval_phi(&plant);
        HarmonicContext {
            plant,
            p_num,
            q_num,
            den: den_j,
            phi,
            transient,
        }
    }

    pub fn plant(&self) -> &NormalizedPlant {
        &self.plant
    }

    pub fn phi(&self) -> (f64, f64) {
        self.phi
    }

    /// Upper bound on the frequencies where the non-oscillatory structure of
    /// `P` and `Q` (poles of `E`, real-branch edges) can change.
    pub fn transient_bound(&self) -> f64 {
        self.transient
    }

    /// Default scan ceiling for frequency searches.
    pub fn default_scan_max(&self) -> f64 {
        (4.0 * PI).max(2.0 * self.transient)
    }

    pub fn pq(&self, y: f64) -> Result<(f64, f64)> {
        self.plant.eval_pq(y)
    }

    pub fn jet(&self, y: f64) -> Result<Jet> {
        let den = self.den[0].eval(y);
        if den.abs() < 1e-300 {
            return Err(Error::ZeroOnImaginaryAxis(y));
        }
        let (p, dp, d2p) = rational_jet(&self.p_num, &self.den, y);
        let (q, dq, d2q) = rational_jet(&self.q_num, &self.den, y);
        Ok(Jet {
            p,
            q,
            dp,
            dq,
            d2p,
            d2q,
        })
    }

    pub fn f1(&self, y: f64) -> Result<f64> {
        let (p, q) = self.pq(y)?;
        Ok(y * (q * y.cos() + p * y.sin()))
    }

    pub fn g1(&self, y: f64) -> Result<f64> {
        let (p, q) = self.pq(y)?;
        Ok(-p * y.cos() + q * y.sin())
    }

    /// `(F(y), G(y))` for a controller point.
    pub fn fg(&self, point: &ControllerPoint, y: f64) -> Result<(f64, f64)> {
        let he = point.hi - point.hd * y * y;
        Ok((he - self.f1(y)?, y * (point.h - self.g1(y)?)))
    }

    /// `(G1'(y), G1''(y))` in closed form.
    pub fn g1_derivatives(&self, y: f64) -> Result<(f64, f64)> {
        let j = self.jet(y)?;
        let (c, s) = (y.cos(), y.sin());
        let d1 = (-j.dp + j.q) * c + (j.p + j.dq) * s;
        let d2 = (j.p - j.d2p + 2.0 * j.dq) * c + (-j.q + j.d2q + 2.0 * j.dp) * s;
        Ok((d1, d2))
    }

    /// One branch of `E(y)`.
    pub fn e(&self, y: f64, branch: Branch) -> Result<EValue> {
        if y == 0.0 {
            if origin_existence_margin(&self.plant) <= 0.0 {
                return Err(Error::ExistenceFail);
            }
            return Ok(EValue::Finite(0.0));
        }
        let (p, q) = self.pq(y)?;
        let disc = p * p + q * q - 1.0;
        if disc < 0.0 {
            return Err(Error::NoRealBranch(y));
        }
        let s = branch.sign();
        let root = disc.sqrt();
        let num = -q + s * root;
        let alt = -q - s * root;
        if num.abs() >= alt.abs() {
            // no cancellation in the numerator
            let d = 1.0 + p;
            if d.abs() < 1e-12 {
                return Ok(EValue::Pole { sign: sign(num) });
            }
            Ok(EValue::Finite(num / d))
        } else {
            // rationalized form (1 - P) / (-Q -+ sqrt(...))
            Ok(EValue::Finite((1.0 - p) / alt))
        }
    }

    /// `dE/dy` for one branch. `None` at poles or where the branch is not
    /// differentiable (edge of the real region).
    pub fn e_derivative(&self, y: f64, branch: Branch) -> Option<f64> {
        let j = self.jet(y).ok()?;
        let disc = j.p * j.p + j.q * j.q - 1.0;
        if disc <= 0.0 {
            return None;
        }
        let s = branch.sign();
        let root = disc.sqrt();
        let droot = (j.p * j.dp + j.q * j.dq) / root;
        let num = -j.q + s * root;
        let alt = -j.q - s * root;
        if num.abs() >= alt.abs() {
            let d = 1.0 + j.p;
            if d.abs() < 1e-12 {
                return None;
            }
            let dnum = -j.dq + s * droot;
            Some((dnum * d - num * j.dp) / (d * d))
        } else {
            let top = 1.0 - j.p;
            let dalt = -j.dq - s * droot;
            Some((-j.dp * alt - top * dalt) / (alt * alt))
        }
    }

    /// All equal-slope points of `tan(y/2)` and `E(y)` in `(0, y_max]`,
    /// over both branches, with `E_d = tan(y_t/2) - E(y_t)`.
    pub fn tangency_points(&self, y_max: f64) -> Vec<Tangency> {
        let mut out = Vec::new();
        for branch in Branch::BOTH {
            let g = |y: f64| -> Option<f64> {
                let half = 0.5 * y;
                if half.cos().abs() < 1e-6 {
                    return None;
                }
                let t = half.tan();
                let de = self.e_derivative(y, branch)?;
                Some(0.5 * (1.0 + t * t) - de)
            };
            for y in scan_roots(g, 1e-6, y_max, SCAN_STEP, None) {
                let Some(res) = g(y) else { continue };
                if res.abs() >= 1e-8 {
                    continue; // bracket straddled a pole
                }
                if let Ok(EValue::Finite(e)) = self.e(y, branch) {
                    out.push(Tangency {
                        y,
                        branch,
                        ed: (0.5 * y).tan() - e,
                    });
                }
            }
        }
        out.sort_by(|a, b| a.y.total_cmp(&b.y));
        out
    }

    /// Positive stationary points of `G1` in `(0, y_max]`, ascending.
    pub fn critical_points(&self, y_max: f64) -> Vec<f64> {
        let (_, phi2) = self.phi;
        let start = if phi2 != 0.0 { Some(phi2) } else { None };
        scan_roots(
            |y| self.g1_derivatives(y).ok().map(|d| d.0),
            0.0,
            y_max,
            SCAN_STEP,
            start,
        )
    }

    /// Local extrema of `G1` in `(0, y_max]`.
    pub fn g1_extrema(&self, y_max: f64) -> Result<Vec<Extremum>> {
        self.critical_points(y_max)
            .into_iter()
            .map(|y| {
                let g1 = self.g1(y)?;
                Ok(Extremum { y, g1, hm: g1.abs() })
            })
            .collect()
    }

    /// Extremum magnitude `h_m` as a function of the stationary abscissa,
    /// evaluated from `P`, `Q` and their derivatives alone.
    pub fn hm_closed_form(&self, y: f64) -> Result<f64> {
        let j = self.jet(y)?;
        let num = j.p * j.p + j.q * j.q + j.p * j.dq - j.dp * j.q;
        let m = (j.dp - j.q).powi(2) + (j.p + j.dq).powi(2);
        Ok(num.abs() / m.sqrt())
    }

    /// Numerator of `d h_m / dy` up to a positive factor (and the sign of
    /// the `h_m` numerator).
    fn hm_slope_kernel(&self, y: f64) -> Option<f64> {
        let j = self.jet(y).ok()?;
        let n = j.p * j.p + j.q * j.q + j.p * j.dq - j.dp * j.q;
        let dn = 2.0 * j.p * j.dp + 2.0 * j.q * j.dq + j.p * j.d2q - j.d2p * j.q;
        let a = j.dp - j.q;
        let b = j.p + j.dq;
        let m = a * a + b * b;
        let dm = 2.0 * a * (j.d2p - j.dq) + 2.0 * b * (j.dp + j.d2q);
        Some(dn * m - 0.5 * n * dm)
    }

    /// Extrema of `G1` that must be examined when looking for the extremum
    /// nearest to `-1`: all of them up to the first one beyond `y_r1`, or
    /// only the first when the envelope has no stationary point.
    pub fn hm_envelope(&self, y_max: f64) -> Result<Envelope> {
        let y_r1 = scan_roots(|y| self.hm_slope_kernel(y), 1e-6 * SCAN_STEP, y_max, SCAN_STEP, None)
            .last()
            .copied();
        let all = self.g1_extrema(y_max)?;
        let extrema = match y_r1 {
            None => all.into_iter().take(1).collect(),
            Some(limit) => {
                let cut = all
                    .iter()
                    .position(|e| e.y > limit)
                    .map(|i| i + 1)
                    .unwrap_or(all.len());
                all.into_iter().take(cut).collect()
            }
        };
        Ok(Envelope { y_r1, extrema })
    }

    /// Positive roots of `G1(y) = level` in `(0, y_hi]`, ascending.
    ///
    /// `G1` is monotone between consecutive stationary points, so each
    /// monotone piece holds at most one root. An extremum touching the level
    /// is reported as `Degenerate`.
    pub fn level_roots(&self, level: f64, y_hi: f64) -> Result<Vec<f64>> {
        let crit = self.critical_points(y_hi);
        let scale = level.abs().max(1.0);
        for &y in &crit {
            if (self.g1(y)? - level).abs() < 1e-9 * scale {
                return Err(Error::Degenerate(format!(
                    "extremum of G1 at y = {y:.6} touches the level {level}"
                )));
            }
        }
        let (_, phi2) = self.phi;
        let sign_at_zero = if (level + 1.0).abs() > ZERO_TOL {
            sign(-1.0 - level)
        } else if phi2.abs() > ZERO_TOL {
            sign(phi2)
        } else {
            return Err(Error::Degenerate("Phi2 vanishes at the level -1".into()));
        };

        let f = |y: f64| self.g1(y).map(|g| g - level).unwrap_or(f64::NAN);
        let mut roots = Vec::new();
        let mut a = 0.0;
        let mut fa = sign_at_zero;
        for b in crit.iter().copied().chain(std::iter::once(y_hi)) {
            if b <= a {
                continue;
            }
            let fb = f(b);
            if fb == 0.0 {
                roots.push(b);
            } else if fa != 0.0 && (fa > 0.0) != (fb > 0.0) {
                roots.push(bisect(&f, a, b, fa));
            }
            a = b;
            fa = fb;
        }
        Ok(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn example() -> HarmonicContext {
        HarmonicContext::new(NormalizedPlant::new(vec![0.6, 0.8], vec![]).unwrap())
    }

    #[test]
    fn worked_example_values() {
        let ctx = example();
        assert_eq!(ctx.f1(0.0).unwrap(), 0.0);
        let roots = ctx.level_roots(0.5, 3.0).unwrap();
        assert!((ctx.f1(roots[0]).unwrap() - 1.099).abs() < 2e-3);
        assert!((ctx.f1(roots[1]).unwrap() + 9.985).abs() < 5e-3);
        assert!((ctx.g1(0.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((ctx.g1(1.778).unwrap() - 2.330).abs() < 2e-3);
    }

    #[test]
    fn fg_at_origin_and_on_first_boundary() {
        let ctx = example();
        let point = ControllerPoint::new(0.3, 1.7, -0.4);
        let (f, g) = ctx.fg(&point, 0.0).unwrap();
        assert_eq!((f, g), (1.7, 0.0));

        let y = 0.863;
        let f1 = ctx.f1(y).unwrap();
        let point = ControllerPoint::new(0.5, f1 + 0.2 * y * y, 0.2);
        assert!(ctx.fg(&point, y).unwrap().0.abs() < 1e-12);
    }

    #[test]
    fn phi_for_two_pole_example() {
        let ctx = example();
        let (p1, p2) = ctx.phi();
        assert!((p1 - 2.4).abs() < 1e-14);
        assert!((p2 - 4.76).abs() < 1e-14);

        let tiny = NormalizedPlant::new(vec![1e-13], vec![]).unwrap();
        let (p1, p2) = eval_phi(&tiny);
        assert!((p1 - 1.0).abs() < 1e-12 && (p2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn g1_derivatives_at_origin() {
        for (t, z) in [
            (vec![0.6, 0.8], vec![]),
            (vec![1.5, -0.3, 2.0], vec![0.4]),
            (vec![-0.7, 0.2, 1.1, 0.9], vec![-0.5, 0.3]),
        ] {
            let ctx = HarmonicContext::new(NormalizedPlant::new(t, z).unwrap());
            let (d1, d2) = ctx.g1_derivatives(0.0).unwrap();
            assert!(d1.abs() < 1e-14);
            assert!((d2 - ctx.phi().1).abs() < 1e-12);
        }
    }

    #[test]
    fn e_at_origin_and_existence() {
        let ctx = example();
        for b in Branch::BOTH {
            assert_eq!(ctx.e(0.0, b).unwrap(), EValue::Finite(0.0));
        }
        let no = HarmonicContext::new(NormalizedPlant::new(vec![0.5], vec![0.7]).unwrap());
        assert_eq!(no.e(0.0, Branch::Plus), Err(Error::ExistenceFail));
        // |1 + j 0.5 y| < |1 + j 0.7 y| for every y != 0
        assert!(matches!(no.e(1.0, Branch::Plus), Err(Error::NoRealBranch(_))));
    }

    #[test]
    fn e_limits_at_infinity_for_even_order() {
        // A(+inf) < 0 here, so E_-(+inf) = +1 and E_+(+inf) = -1
        let ctx = example();
        let y = 1e5;
        let em = ctx.e(y, Branch::Minus).unwrap().finite().unwrap();
        let ep = ctx.e(y, Branch::Plus).unwrap().finite().unwrap();
        assert!((em - 1.0).abs() < 1e-3, "{em}");
        assert!((ep + 1.0).abs() < 1e-3, "{ep}");
    }

    #[test]
    fn e_pole_is_reported_on_one_branch() {
        let ctx = example();
        // 1 + A(y) = 2 - 0.48 y^2 vanishes at y^2 = 25/6
        let y = (25.0f64 / 6.0).sqrt();
        let vals: Vec<_> = Branch::BOTH.iter().map(|b| ctx.e(y, *b).unwrap()).collect();
        let poles = vals.iter().filter(|v| matches!(v, EValue::Pole { .. })).count();
        assert_eq!(poles, 1, "{vals:?}");
    }

    #[test]
    fn slope_at_zero_example_and_degenerate() {
        let np = NormalizedPlant::new(vec![0.6, 0.8], vec![]).unwrap();
        let (lo, hi) = eval_e_slope_at_zero(&np).unwrap();
        assert!((lo + 1.2).abs() < 1e-14 && (hi + 0.2).abs() < 1e-14);

        let tiny = NormalizedPlant::new(vec![1e-9], vec![]).unwrap();
        let (lo, hi) = eval_e_slope_at_zero(&tiny).unwrap();
        assert!(lo.abs() < 1e-8 && hi.abs() < 1e-8);

        let bad = NormalizedPlant::new(vec![0.5], vec![0.7]).unwrap();
        assert!(matches!(eval_e_slope_at_zero(&bad), Err(Error::ImaginarySlope(_))));
    }

    #[test]
    fn slope_classification_matches_phi_table() {
        let cases = [
            vec![0.6, 0.8],
            vec![-2.0, -2.0],
            vec![-0.4, 3.0],
            vec![-0.9, -0.2],
            vec![1.5, -0.3, 2.0],
            vec![-1.2, -0.3, 0.5],
        ];
        for t in cases {
            let np = NormalizedPlant::new(t.clone(), vec![]).unwrap();
            let (p1, p2) = eval_phi(&np);
            let (a, b) = eval_e_slope_at_zero(&np).unwrap();
            let above = [a, b].iter().filter(|s| **s > 0.5).count();
            let expected = if p2 < 0.0 {
                1
            } else if p1 > 0.0 {
                0
            } else {
                2
            };
            assert_eq!(above, expected, "t = {t:?}");

            // finite-difference slopes of E near zero agree
            let ctx = HarmonicContext::new(np);
            let y = 1e-4;
            let mut fd: Vec<f64> = Branch::BOTH
                .iter()
                .map(|br| ctx.e(y, *br).unwrap().finite().unwrap() / y)
                .collect();
            fd.sort_by(f64::total_cmp);
            assert!((fd[0] - a).abs() < 1e-3 && (fd[1] - b).abs() < 1e-3, "{fd:?} vs {a} {b}");
        }
    }

    #[test]
    fn first_extremum_of_worked_example() {
        let ctx = example();
        let env = ctx.hm_envelope(4.0 * PI).unwrap();
        let first = env.extrema[0];
        assert!((first.y - 1.778).abs() < 2e-3);
        assert!((first.hm - 2.330).abs() < 2e-3);
        for e in &env.extrema {
            assert!((e.hm - ctx.g1(e.y).unwrap().abs()).abs() < 1e-10);
            assert!(ctx.g1_derivatives(e.y).unwrap().0.abs() < 1e-8);
            assert!((ctx.hm_closed_form(e.y).unwrap() - e.hm).abs() < 1e-8);
        }
    }

    #[test]
    fn tangency_residuals() {
        for t in [vec![0.6, 0.8], vec![-2.0, -2.0], vec![2.5, 0.3, -0.2]] {
            let ctx = HarmonicContext::new(NormalizedPlant::new(t, vec![]).unwrap());
            for tp in ctx.tangency_points(6.0 * PI) {
                let half = 0.5 * tp.y;
                let lhs = 0.5 * (1.0 + half.tan().powi(2));
                let rhs = ctx.e_derivative(tp.y, tp.branch).unwrap();
                assert!((lhs - rhs).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn level_roots_of_worked_example() {
        let ctx = example();
        let roots = ctx.level_roots(0.5, 3.0 * PI).unwrap();
        let expected = [0.863, 2.498, 5.285, 8.191];
        assert_eq!(roots.len(), 4);
        for (r, e) in roots.iter().zip(expected) {
            assert!((r - e).abs() < 2e-3, "{r} vs {e}");
            assert!((ctx.g1(*r).unwrap() - 0.5).abs() < 1e-10);
        }
    }

    fn plant_strategy() -> impl Strategy<Value = NormalizedPlant> {
        let c = (0.1f64..3.0, any::<bool>()).prop_map(|(x, n)| if n { -x } else { x });
        (prop::collection::vec(c.clone(), 1..=4), prop::collection::vec(c, 0..=3))
            .prop_filter_map("valid plant", |(t, mut z)| {
                z.truncate(t.len().saturating_sub(1));
                NormalizedPlant::new(t, z).ok()
            })
    }

    proptest! {
        #[test]
        fn derivatives_match_finite_differences(np in plant_strategy(), y in 0.05f64..12.0) {
            let ctx = HarmonicContext::new(np);
            let h = 1e-6;
            let j = ctx.jet(y).unwrap();
            let (pp, qp) = ctx.pq(y + h).unwrap();
            let (pm, qm) = ctx.pq(y - h).unwrap();
            let scale = j.p.abs().max(j.q.abs()).max(1.0);
            prop_assert!((j.dp - (pp - pm) / (2.0 * h)).abs() < 1e-6 * scale);
            prop_assert!((j.dq - (qp - qm) / (2.0 * h)).abs() < 1e-6 * scale);

            let (d1, d2) = ctx.g1_derivatives(y).unwrap();
            let gp = ctx.g1(y + h).unwrap();
            let gm = ctx.g1(y - h).unwrap();
            let g0 = ctx.g1(y).unwrap();
            let gscale = g0.abs().max(1.0);
            prop_assert!((d1 - (gp - gm) / (2.0 * h)).abs() < 1e-5 * gscale);
            let (dp, _) = ctx.g1_derivatives(y + h).unwrap();
            let (dm, _) = ctx.g1_derivatives(y - h).unwrap();
            prop_assert!((d2 - (dp - dm) / (2.0 * h)).abs() < 1e-5 * gscale);
        }

        #[test]
        fn fg_matches_complex_evaluation(np in plant_strategy(), y in -10.0f64..10.0,
                                         h in -3.0f64..3.0, hi in -3.0f64..3.0, hd in -3.0f64..3.0) {
            let s = Complex64::new(0.0, y);
            let num: Complex64 = np.t().iter().map(|t| 1.0 + s * t).product();
            let den: Complex64 = np.z().iter().map(|z| 1.0 + s * z).product();
            let hval = s * s.exp() * num / den + hi + h * s + hd * s * s;
            let ctx = HarmonicContext::new(np);
            let (f, g) = ctx.fg(&ControllerPoint::new(h, hi, hd), y).unwrap();
            let scale = hval.norm().max(1.0);
            prop_assert!((f - hval.re).abs() < 1e-10 * scale);
            prop_assert!((g - hval.im).abs() < 1e-10 * scale);
        }

        #[test]
        fn parity(np in plant_strategy(), y in 0.01f64..10.0) {
            let ctx = HarmonicContext::new(np);
            let g = ctx.g1(y).unwrap();
            prop_assert!((g - ctx.g1(-y).unwrap()).abs() < 1e-10 * g.abs().max(1.0));
            for b in Branch::BOTH {
                if let Ok(EValue::Finite(e)) = ctx.e(y, b) {
                    // negating y swaps the branches
                    let other = if b == Branch::Plus { Branch::Minus } else { Branch::Plus };
                    if let Ok(EValue::Finite(en)) = ctx.e(-y, other) {
                        prop_assert!((e + en).abs() < 1e-9 * e.abs().max(1.0));
                    }
                }
            }
        }
    }
}
