//! Plant description, dimensionless normalization and the frequency-domain
//! polynomials of numerator and denominator.
//!
//! The plant is `K * prod(1 + Z_i s) / prod(1 + T_i s) * exp(-L s)`. All
//! analysis happens in time normalized by the delay `L`, with `t_i = T_i / L`
//! and `z_i = Z_i / L`. On the imaginary axis `s = j y / L` the denominator
//! becomes `A(y) + j B(y)` and the numerator `C(y) + j D(y)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Physical plant parameters, as read from plant JSON files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub gain: f64,
    pub delay: f64,
    pub time_constants: Vec<f64>,
    #[serde(default)]
    pub zero_constants: Vec<f64>,
}

/// Dimensionless PID gains: `h = K Kp`, `h_i = K Ki L`, `h_d = K Kd / L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerPoint {
    pub h: f64,
    pub hi: f64,
    pub hd: f64,
}

/// Physical PID gains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl ControllerPoint {
    pub fn new(h: f64, hi: f64, hd: f64) -> Self {
        ControllerPoint { h, hi, hd }
    }

    pub fn is_finite(&self) -> bool {
        self.h.is_finite() && self.hi.is_finite() && self.hd.is_finite()
    }

    pub fn from_gains(gains: PidGains, plant: &PlantSpec) -> Self {
        let (k, l) = (plant.gain, plant.delay);
        ControllerPoint {
            h: k * gains.kp,
            hi: k * gains.ki * l,
            hd: k * gains.kd / l,
        }
    }
}

impl PlantSpec {
    pub fn new(gain: f64, delay: f64, time_constants: Vec<f64>, zero_constants: Vec<f64>) -> Self {
        PlantSpec {
            gain,
            delay,
            time_constants,
            zero_constants,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gain.is_finite() || self.gain == 0.0 {
            return Err(Error::InvalidPlant("gain must be finite and nonzero".into()));
        }
        if !self.delay.is_finite() || self.delay <= 0.0 {
            return Err(Error::InvalidPlant("delay must be finite and positive".into()));
        }
        if self.time_constants.is_empty() {
            return Err(Error::InvalidPlant("at least one time constant is required".into()));
        }
        check_constants(&self.time_constants, "time constant")?;
        check_constants(&self.zero_constants, "zero constant")?;
        check_common_factors(&self.time_constants, &self.zero_constants)
    }

    pub fn normalize(&self) -> Result<NormalizedPlant> {
        self.validate()?;
        let l = self.delay;
        NormalizedPlant::new(
            self.time_constants.iter().map(|t| t / l).collect(),
            self.zero_constants.iter().map(|z| z / l).collect(),
        )
    }

    /// Physical gains for a dimensionless controller point.
    pub fn denormalize_gains(&self, point: &ControllerPoint) -> PidGains {
        let (k, l) = (self.gain, self.delay);
        PidGains {
            kp: point.h / k,
            ki: point.hi / (k * l),
            kd: point.hd * l / k,
        }
    }
}

fn check_constants(values: &[f64], what: &str) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() || *v == 0.0 {
            return Err(Error::InvalidPlant(format!(
                "{what} #{} must be finite and nonzero (got {v})",
                i + 1
            )));
        }
    }
    Ok(())
}

fn check_common_factors(t: &[f64], z: &[f64]) -> Result<()> {
    for &ti in t {
        for &zj in z {
            if (ti - zj).abs() <= 1e-12 * ti.abs().max(zj.abs()) {
                return Err(Error::CommonFactor {
                    time_constant: ti,
                    zero_constant: zj,
                });
            }
        }
    }
    Ok(())
}

/// Elementary symmetric functions of `values`: entry `k` is the sum of all
/// k-fold products of distinct entries (entry 0 is 1).
///
/// Built by multiplying in one factor `(1 + v x)` at a time.
pub fn symmetric_coefficients(values: &[f64]) -> Vec<f64> {
    let mut e = vec![1.0];
    for &v in values {
        e.push(0.0);
        for k in (1..e.len()).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e
}

/// Real and imaginary parts of `prod(1 + j v_i y)` as polynomials in `y`.
fn axis_polynomials(sym: &[f64]) -> (Poly, Poly) {
    let mut re = vec![0.0; sym.len()];
    let mut im = vec![0.0; sym.len()];
    for (k, &c) in sym.iter().enumerate() {
        // j^k alternates 1, j, -1, -j
        match k % 4 {
            0 => re[k] = c,
            1 => im[k] = c,
            2 => re[k] = -c,
            _ => im[k] = -c,
        }
    }
    (Poly::new(re), Poly::new(im))
}

/// Values of the four axis polynomials at one frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Abcd {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// The plant in delay-normalized form with its symmetric coefficient tables
/// and derived polynomials.
#[derive(Clone, Debug)]
pub struct NormalizedPlant {
    t: Vec<f64>,
    z: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    a: Poly,
    b: Poly,
    c: Poly,
    d: Poly,
    /// `A C + B D`
    p_num: Poly,
    /// `B C - A D`
    q_num: Poly,
    /// `C^2 + D^2`
    den: Poly,
}

impl NormalizedPlant {
    /// Builds a plant directly from dimensionless constants.
    pub fn new(t: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::InvalidPlant("at least one time constant is required".into()));
        }
        check_constants(&t, "time constant")?;
        check_constants(&z, "zero constant")?;
        check_common_factors(&t, &z)?;

        let u = symmetric_coefficients(&t);
        let v = symmetric_coefficients(&z);
        let (a, b) = axis_polynomials(&u);
        let (c, d) = axis_polynomials(&v);
        let p_num = &(&a * &c) + &(&b * &d);
        let q_num = &(&b * &c) - &(&a * &d);
        let den = &(&c * &c) + &(&d * &d);
        Ok(NormalizedPlant {
            t,
            z,
            u,
            v,
            a,
            b,
            c,
            d,
            p_num,
            q_num,
            den,
        })
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// Number of poles.
    pub fn n(&self) -> usize {
        self.t.len()
    }

    /// Number of zeros.
    pub fn m(&self) -> usize {
        self.z.len()
    }

    /// `U(n, k)`; zero for `k > n`.
    pub fn u(&self, k: usize) -> f64 {
        self.u.get(k).copied().unwrap_or(0.0)
    }

    /// `V(m, k)`; zero for `k > m`.
    pub fn v(&self, k: usize) -> f64 {
        self.v.get(k).copied().unwrap_or(0.0)
    }

    pub fn u_table(&self) -> &[f64] {
        &self.u
    }

    pub fn v_table(&self) -> &[f64] {
        &self.v
    }

    /// Count of nonminimum-phase zeros (negative `z_i`).
    pub fn m_p(&self) -> usize {
        self.z.iter().filter(|z| **z < 0.0).count()
    }

    pub fn poly_a(&self) -> &Poly {
        &self.a
    }

    pub fn poly_b(&self) -> &Poly {
        &self.b
    }

    pub fn poly_c(&self) -> &Poly {
        &self.c
    }

    pub fn poly_d(&self) -> &Poly {
        &self.d
    }

    /// Numerator and denominator of `P = (AC + BD) / (C^2 + D^2)`.
    pub fn p_rational(&self) -> (&Poly, &Poly) {
        (&self.p_num, &self.den)
    }

    /// Numerator and denominator of `Q = (BC - AD) / (C^2 + D^2)`.
    pub fn q_rational(&self) -> (&Poly, &Poly) {
        (&self.q_num, &self.den)
    }

    pub fn eval_abcd(&self, y: f64) -> Abcd {
        Abcd {
            a: self.a.eval(y),
            b: self.b.eval(y),
            c: self.c.eval(y),
            d: self.d.eval(y),
        }
    }

    pub fn eval_pq(&self, y: f64) -> Result<(f64, f64)> {
        let den = self.den.eval(y);
        if den.abs() < 1e-300 {
            return Err(Error::ZeroOnImaginaryAxis(y));
        }
        Ok((self.p_num.eval(y) / den, self.q_num.eval(y) / den))
    }

    /// Same plant with the constants rescaled by `c` (equivalent to dividing
    /// the delay by `c`).
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        NormalizedPlant::new(
            self.t.iter().map(|t| t * c).collect(),
            self.z.iter().map(|z| z * c).collect(),
        )
    }
}
