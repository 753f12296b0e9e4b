//! Whether a plant admits any stabilizing PID controller at all.
//!
//! A plant is stabilizable when the number `N_e` of nonzero intersections of
//! `G1(y)` with the level `-1` inside the window `[-2 r pi + eps, 2 r pi + eps]`
//! equals the count demanded by the root-counting condition, for every
//! sufficiently large `r`. The count is taken directly from `G1`; the
//! table-based estimate (sign table of `Phi1`, `Phi2`, parity of `n`, Sturm
//! pole count) is carried along as an advisory cross-check.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::harmonic::{HarmonicContext, Tangency, ZERO_TOL};
use crate::plant::{NormalizedPlant, PlantSpec};
use crate::sturm::{pole_count_of_e, pole_polynomial, PoleCount, SturmChain};

/// Sign of `U(n, n)`: which side of `h = -1` the proportional gain lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// `U(n,n) > 0`: `h > -1`, `h_i > 0`.
    Case1,
    /// `U(n,n) < 0`: `h < -1`, `h_i < 0`.
    Case2,
}

impl Case {
    /// Sign that `h + 1` and `h_i` must both have.
    pub fn side(self) -> f64 {
        match self {
            Case::Case1 => 1.0,
            Case::Case2 => -1.0,
        }
    }
}

pub fn case_of(np: &NormalizedPlant) -> Result<Case> {
    let unn = np.u(np.n());
    if unn.abs() < ZERO_TOL {
        return Err(Error::Degenerate(format!("U(n,n) = {unn:e} is numerically zero")));
    }
    Ok(if unn > 0.0 { Case::Case1 } else { Case::Case2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Stabilizable,
    NotStabilizable,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalTerm {
    pub ok: bool,
    pub reason: String,
    /// `|h_d|` must stay below this when `m = n - 1`.
    pub hd_bound: Option<f64>,
}

/// Checks that the characteristic function has a principal term whose
/// coefficient has no zeros in the closed right half plane.
pub fn check_principal_term(np: &NormalizedPlant, hd: Option<f64>) -> Result<PrincipalTerm> {
    let (n, m) = (np.n(), np.m());
    if m >= n {
        return Err(Error::OrderViolation { n, m });
    }
    if m + 1 < n {
        return Ok(PrincipalTerm {
            ok: true,
            reason: "m < n - 1".into(),
            hd_bound: None,
        });
    }
    let bound = (np.u(n) / np.v(m)).abs();
    Ok(match hd {
        None => PrincipalTerm {
            ok: true,
            reason: format!("m = n - 1: requires |h_d| < {bound}"),
            hd_bound: Some(bound),
        },
        Some(hd) => {
            let ok = hd.abs() < bound;
            PrincipalTerm {
                ok,
                reason: format!(
                    "m = n - 1: |h_d V(m,m)| = {} {} |U(n,n)| = {}",
                    (hd * np.v(m)).abs(),
                    if ok { "<" } else { ">=" },
                    np.u(n).abs()
                ),
                hd_bound: Some(bound),
            }
        }
    })
}

/// Targets of the root-counting condition as affine functions of `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequiredCounts {
    /// Window shift: 0 when `n - m` is even, `pi/2` when odd.
    pub epsilon: f64,
    pub ne_per_period: usize,
    /// `N_r = 4 r + nr_offset`.
    pub nr_offset: i64,
    /// `N_e = 4 r + ne_offset`.
    pub ne_offset: i64,
}

impl RequiredCounts {
    pub fn nr(&self, r: usize) -> i64 {
        4 * r as i64 + self.nr_offset
    }

    pub fn ne(&self, r: usize) -> i64 {
        4 * r as i64 + self.ne_offset
    }
}

pub fn window_epsilon(np: &NormalizedPlant) -> f64 {
    if (np.n() - np.m().min(np.n())).is_multiple_of(2) {
        0.0
    } else {
        0.5 * PI
    }
}

pub fn required_counts(np: &NormalizedPlant) -> Result<RequiredCounts> {
    let (n, m, mp) = (np.n() as i64, np.m() as i64, np.m_p() as i64);
    let unn = np.u(np.n());
    let (_, phi2) = crate::harmonic::eval_phi(np);
    if unn.abs() < ZERO_TOL || phi2.abs() < ZERO_TOL {
        return Err(Error::Degenerate("U(n,n) * Phi2 is numerically zero".into()));
    }
    let nr_offset = n + 1 - m + 2 * mp;
    // the root at y = 0 is never an intersection; when G1 leaves -1 towards
    // the admissible side of h, two more roots sit next to it
    let ne_offset = if unn * phi2 > 0.0 { nr_offset - 3 } else { nr_offset - 1 };
    Ok(RequiredCounts {
        epsilon: window_epsilon(np),
        ne_per_period: 4,
        nr_offset,
        ne_offset,
    })
}

/// Number of nonzero roots of `G1(y) = level` in the window
/// `[-2 r pi + eps, 2 r pi + eps]`, given the ascending positive roots.
pub fn window_count(positive_roots: &[f64], r: usize, epsilon: f64) -> usize {
    let top = 2.0 * r as f64 * PI + epsilon;
    let bottom = 2.0 * r as f64 * PI - epsilon;
    positive_roots.iter().filter(|y| **y <= top).count()
        + positive_roots.iter().filter(|y| **y <= bottom).count()
}

/// Windows used to decide "sufficiently large r": three consecutive periods
/// starting two past the transient region.
pub fn reference_windows(ctx: &HarmonicContext, shift: usize) -> [usize; 3] {
    let r0 = ((ctx.transient_bound() / (2.0 * PI)).ceil() as usize).max(1);
    let first = r0 + 2 + shift;
    [first, first + 1, first + 2]
}

/// Largest window shift tried before giving up.
pub const MAX_WINDOW_SHIFT: usize = 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowCount {
    pub r: usize,
    pub required: i64,
    pub achieved: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AchievedCounts {
    /// `N_e1` from the `Phi1`/`Phi2` sign table.
    pub ne1: usize,
    /// Intersections with `0 < |y| < pi`, counted directly.
    pub ne1_direct: usize,
    /// Intersections outside `|y| < pi` in the first reference window.
    pub ne2: i64,
    pub windows: Vec<WindowCount>,
    pub pole_count: PoleCount,
    pub tangencies: Vec<Tangency>,
    /// Table-based estimate for the first reference window (`m = 0` only).
    pub advisory_ne: Option<i64>,
    pub diagnostics: Vec<String>,
}

impl AchievedCounts {
    pub fn matches_required(&self) -> bool {
        self.windows.iter().all(|w| w.required == w.achieved)
    }

    pub fn per_period(&self) -> Option<i64> {
        match self.windows.as_slice() {
            [a, b, ..] => Some(b.achieved - a.achieved),
            _ => None,
        }
    }
}

/// `N_e1` from the slope table at the origin.
pub fn ne1_from_table(phi1: f64, phi2: f64) -> Result<usize> {
    if phi2.abs() < ZERO_TOL {
        return Err(Error::Degenerate("Phi2 is numerically zero".into()));
    }
    if phi2 < 0.0 {
        return Ok(2);
    }
    if phi1.abs() < ZERO_TOL {
        return Err(Error::Degenerate("Phi1 is numerically zero".into()));
    }
    Ok(if phi1 > 0.0 { 0 } else { 4 })
}

/// Base `N_e2` of a pole-free `E` in window `r` (plants without zeros).
pub fn ne2_base(np: &NormalizedPlant, r: usize) -> i64 {
    let n = np.n();
    let r4 = 4 * r as i64;
    if n.is_multiple_of(2) {
        return r4 - 2;
    }
    let parity = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let ab_sign = -parity * np.u(n - 1) * np.u(n);
    if ab_sign > 0.0 {
        r4 - 1
    } else {
        r4 - 3
    }
}

pub fn achieved_counts(ctx: &HarmonicContext) -> Result<AchievedCounts> {
    let np = ctx.plant();
    let required = required_counts(np)?;
    let (phi1, phi2) = ctx.phi();
    let ne1 = ne1_from_table(phi1, phi2)?;
    let eps = required.epsilon;

    let mut shift = 0;
    let (roots, windows) = loop {
        let rs = reference_windows(ctx, shift);
        let top = 2.0 * rs[2] as f64 * PI + eps + 1e-9;
        let roots = ctx.level_roots(-1.0, top)?;
        let windows: Vec<WindowCount> = rs
            .iter()
            .map(|&r| WindowCount {
                r,
                required: required.ne(r),
                achieved: window_count(&roots, r, eps) as i64,
            })
            .collect();
        let offsets: Vec<i64> = windows.iter().map(|w| w.achieved - 4 * w.r as i64).collect();
        if offsets.windows(2).all(|o| o[0] == o[1]) {
            break (roots, windows);
        }
        shift += 3;
        if shift > MAX_WINDOW_SHIFT {
            return Err(Error::Degenerate(
                "intersection count per period does not settle".into(),
            ));
        }
    };

    let ne1_direct = 2 * roots.iter().filter(|y| **y < PI).count();
    let ne2 = windows[0].achieved - ne1_direct as i64;
    let pole_count = pole_count_of_e(np)?;
    let tangencies = ctx.tangency_points(ctx.default_scan_max());

    let mut diagnostics = Vec::new();
    if !pole_count.certified {
        diagnostics.push("pole count is NonCertified (Sturm chain fell back to grid)".into());
    }
    let advisory_ne = (np.m() == 0).then(|| {
        ne1 as i64 + ne2_base(np, windows[0].r) + 2 * pole_count.count as i64
    });
    if let Some(adv) = advisory_ne {
        if adv != windows[0].achieved {
            diagnostics.push(format!(
                "table estimate N_e = {adv} differs from direct count {} at r = {}; \
                 not every pole of E adds an intersection (see E_d values)",
                windows[0].achieved, windows[0].r
            ));
        }
    }
    if ne1 != ne1_direct {
        diagnostics.push(format!(
            "N_e1 table value {ne1} differs from direct count {ne1_direct}"
        ));
    }
    Ok(AchievedCounts {
        ne1,
        ne1_direct,
        ne2,
        windows,
        pole_count,
        tangencies,
        advisory_ne,
        diagnostics,
    })
}

/// Named zones of the two-pole, zero-free plant family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Zone {
    Z1,
    Z2,
    Z3,
}

/// Sign features that separate process-parameter zones for any plant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneFeatures {
    pub unn: i8,
    pub phi1: i8,
    pub phi2: i8,
    pub ed: Vec<i8>,
    pub psi_at_zero: Vec<i8>,
    pub psi_at_infinity: Vec<i8>,
}

impl ZoneFeatures {
    pub fn label(&self) -> String {
        fn s(v: i8) -> char {
            match v {
                1 => '+',
                -1 => '-',
                _ => '0',
            }
        }
        let seq = |v: &[i8]| v.iter().map(|x| s(*x)).collect::<String>();
        format!(
            "U{}P1{}P2{}|Ed:{}|Psi0:{}|PsiInf:{}",
            s(self.unn),
            s(self.phi1),
            s(self.phi2),
            seq(&self.ed),
            seq(&self.psi_at_zero),
            seq(&self.psi_at_infinity)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneLabel {
    /// Only assigned for `n = 2`, `m = 0`.
    pub named: Option<Zone>,
    pub features: ZoneFeatures,
}

impl ZoneLabel {
    /// `Z1`/`Z2`/`Z3`, `none` for unnamed two-pole cells, otherwise the
    /// feature string.
    pub fn as_text(&self, np: &NormalizedPlant) -> String {
        match (self.named, np.n() == 2 && np.m() == 0) {
            (Some(z), _) => format!("{z:?}"),
            (None, true) => "none".into(),
            (None, false) => self.features.label(),
        }
    }
}

fn sign_i8(x: f64) -> i8 {
    if x > ZERO_TOL {
        1
    } else if x < -ZERO_TOL {
        -1
    } else {
        0
    }
}

pub fn classify_zone(ctx: &HarmonicContext) -> ZoneLabel {
    let np = ctx.plant();
    let unn = np.u(np.n());
    let (phi1, phi2) = ctx.phi();
    let (psi_at_zero, psi_at_infinity) = match SturmChain::build(&pole_polynomial(np)) {
        Ok(chain) => {
            let t = chain.sign_table();
            (t.at_zero, t.at_infinity)
        }
        Err(_) => (Vec::new(), Vec::new()),
    };
    let features = ZoneFeatures {
        unn: sign_i8(unn),
        phi1: sign_i8(phi1),
        phi2: sign_i8(phi2),
        ed: ctx
            .tangency_points(ctx.default_scan_max())
            .iter()
            .map(|t| sign_i8(t.ed))
            .collect(),
        psi_at_zero,
        psi_at_infinity,
    };
    let named = if np.n() == 2 && np.m() == 0 {
        match (features.unn, features.phi1, features.phi2) {
            (1, 1, 1) => Some(Zone::Z1),
            (1, -1, 1) => Some(Zone::Z2),
            (-1, _, -1) => Some(Zone::Z3),
            _ => None,
        }
    } else {
        None
    };
    ZoneLabel { named, features }
}

/// Outcome of the stabilizability analysis. Failures of individual steps are
/// folded into `verdict` and `diagnostics`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizabilityReport {
    pub n: usize,
    pub m: usize,
    pub principal_term_ok: bool,
    pub principal_term_reason: String,
    pub hd_bound: Option<f64>,
    pub case: Option<Case>,
    pub m_p: usize,
    pub epsilon: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub required_ne_per_period: usize,
    pub achieved_ne_per_period: Option<i64>,
    pub reference_r: Option<usize>,
    pub required_ne: Option<i64>,
    pub achieved_ne: Option<i64>,
    pub ne1: Option<usize>,
    pub ne1_direct: Option<usize>,
    pub ne2: Option<i64>,
    pub advisory_ne: Option<i64>,
    pub pole_count: Option<usize>,
    pub pole_count_certified: bool,
    pub ed: Vec<Tangency>,
    pub zone: Option<String>,
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
}

impl StabilizabilityReport {
    pub fn is_stabilizable(&self) -> bool {
        self.verdict == Verdict::Stabilizable
    }
}

/// Full stabilizability analysis of a dimensionless plant.
pub fn analyze(ctx: &HarmonicContext) -> StabilizabilityReport {
    let np = ctx.plant();
    let (phi1, phi2) = ctx.phi();
    let mut report = StabilizabilityReport {
        n: np.n(),
        m: np.m(),
        principal_term_ok: false,
        principal_term_reason: String::new(),
        hd_bound: None,
        case: None,
        m_p: np.m_p(),
        epsilon: window_epsilon(np),
        phi1,
        phi2,
        required_ne_per_period: 4,
        achieved_ne_per_period: None,
        reference_r: None,
        required_ne: None,
        achieved_ne: None,
        ne1: None,
        ne1_direct: None,
        ne2: None,
        advisory_ne: None,
        pole_count: None,
        pole_count_certified: false,
        ed: Vec::new(),
        zone: None,
        verdict: Verdict::NotStabilizable,
        diagnostics: Vec::new(),
    };

    match check_principal_term(np, None) {
        Ok(pt) => {
            report.principal_term_ok = pt.ok;
            report.principal_term_reason = pt.reason;
            report.hd_bound = pt.hd_bound;
        }
        Err(e) => {
            report.principal_term_reason = e.to_string();
            report.diagnostics.push(e.to_string());
            return report;
        }
    }

    let label = classify_zone(ctx);
    report.zone = Some(label.as_text(np));

    match case_of(np) {
        Ok(c) => report.case = Some(c),
        Err(e) => {
            report.verdict = Verdict::Degenerate;
            report.diagnostics.push(e.to_string());
            return report;
        }
    }

    match achieved_counts(ctx) {
        Ok(ac) => {
            let w = ac.windows[0];
            report.reference_r = Some(w.r);
            report.required_ne = Some(w.required);
            report.achieved_ne = Some(w.achieved);
            report.achieved_ne_per_period = ac.per_period();
            report.ne1 = Some(ac.ne1);
            report.ne1_direct = Some(ac.ne1_direct);
            report.ne2 = Some(ac.ne2);
            report.advisory_ne = ac.advisory_ne;
            report.pole_count = Some(ac.pole_count.count);
            report.pole_count_certified = ac.pole_count.certified;
            report.ed = ac.tangencies.clone();
            report.diagnostics.extend(ac.diagnostics.iter().cloned());
            report.verdict = if ac.matches_required() && report.principal_term_ok {
                Verdict::Stabilizable
            } else {
                Verdict::NotStabilizable
            };
        }
        Err(Error::Degenerate(msg)) => {
            report.verdict = Verdict::Degenerate;
            report.diagnostics.push(msg);
        }
        Err(e) => {
            report.verdict = Verdict::Degenerate;
            report.diagnostics.push(e.to_string());
        }
    }
    report
}

/// Analysis of a physical plant. Invalid plants are an error; everything
/// else is reported through the verdict.
pub fn analyze_plant(plant: &PlantSpec) -> Result<StabilizabilityReport> {
    let np = plant.normalize()?;
    Ok(analyze(&HarmonicContext::new(np)))
}

/// A scanned plant parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlantParam {
    /// `T_i`, 1-based.
    TimeConstant(usize),
    /// `Z_i`, 1-based.
    ZeroConstant(usize),
    Delay,
}

impl PlantParam {
    pub fn parse(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        if lower == "l" || lower == "delay" {
            return Ok(PlantParam::Delay);
        }
        let (kind, idx) = lower.split_at(1.min(lower.len()));
        let idx: usize = idx
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("unknown plant parameter '{name}'")))?;
        if idx == 0 {
            return Err(Error::InvalidArgument(format!("parameter indices are 1-based: '{name}'")));
        }
        match kind {
            "t" => Ok(PlantParam::TimeConstant(idx)),
            "z" => Ok(PlantParam::ZeroConstant(idx)),
            _ => Err(Error::InvalidArgument(format!("unknown plant parameter '{name}'"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            PlantParam::TimeConstant(i) => format!("T{i}"),
            PlantParam::ZeroConstant(i) => format!("Z{i}"),
            PlantParam::Delay => "L".into(),
        }
    }

    pub fn apply(&self, plant: &mut PlantSpec, value: f64) -> Result<()> {
        let slot = match self {
            PlantParam::TimeConstant(i) => plant.time_constants.get_mut(i - 1),
            PlantParam::ZeroConstant(i) => plant.zero_constants.get_mut(i - 1),
            PlantParam::Delay => Some(&mut plant.delay),
        };
        match slot {
            Some(s) => {
                *s = value;
                Ok(())
            }
            None => Err(Error::InvalidArgument(format!(
                "plant has no parameter {}",
                self.name()
            ))),
        }
    }
}

/// One axis of a parameter grid: `steps` values from `min` to `max`
/// inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub param: PlantParam,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridAxis {
    /// Parses `NAME:min:max:steps`, e.g. `T1:-3:3:60`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::InvalidArgument(format!(
                "grid axis '{spec}' must look like NAME:min:max:steps"
            )));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number '{s}' in '{spec}'")))
        };
        let steps: usize = parts[3]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad step count in '{spec}'")))?;
        let axis = GridAxis {
            param: PlantParam::parse(parts[0])?,
            min: num(parts[1])?,
            max: num(parts[2])?,
            steps,
        };
        if axis.steps == 0 || axis.max.is_nan() || axis.min.is_nan() || axis.max < axis.min {
            return Err(Error::InvalidArgument(format!("empty grid axis '{spec}'")));
        }
        Ok(axis)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![0.5 * (self.min + self.max)];
        }
        (0..self.steps)
            .map(|k| self.min + (self.max - self.min) * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Parses `P1:min:max:steps[,P2:min:max:steps]`.
pub fn parse_grid(spec: &str) -> Result<(GridAxis, Option<GridAxis>)> {
    let mut it = spec.split(',');
    let first = GridAxis::parse(it.next().unwrap_or(""))?;
    let second = it.next().map(GridAxis::parse).transpose()?;
    if it.next().is_some() {
        return Err(Error::InvalidArgument("at most two grid axes are supported".into()));
    }
    Ok((first, second))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneCell {
    pub param1: f64,
    pub param2: Option<f64>,
    /// `Stabilizable`, `NotStabilizable`, `Degenerate` or `Invalid`.
    pub verdict: String,
    pub zone: Option<String>,
    pub phi1: Option<f64>,
    pub phi2: Option<f64>,
    pub poles: Option<usize>,
    pub ne_required: Option<i64>,
    pub ne_achieved: Option<i64>,
    /// Every window checked, for cells that got that far.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub windows: Vec<WindowCount>,
    /// Classifier values used for boundary extraction.
    #[serde(skip)]
    pub classifiers: Vec<(String, f64)>,
}

/// A classifier's zero level set as a list of line segments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub classifier: String,
    pub segments: Vec<[[f64; 2]; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneScan {
    pub param1: String,
    pub param2: Option<String>,
    pub cells: Vec<ZoneCell>,
    pub boundaries: Vec<Boundary>,
}

fn scan_cell(base: &PlantSpec, a1: &GridAxis, v1: f64, a2: Option<(&GridAxis, f64)>) -> ZoneCell {
    let mut cell = ZoneCell {
        param1: v1,
        param2: a2.map(|(_, v)| v),
        verdict: "Invalid".into(),
        zone: None,
        phi1: None,
        phi2: None,
        poles: None,
        ne_required: None,
        ne_achieved: None,
        windows: Vec::new(),
        classifiers: Vec::new(),
    };
    let mut plant = base.clone();
    if a1.param.apply(&mut plant, v1).is_err() {
        return cell;
    }
    if let Some((ax, v)) = a2 {
        if ax.param.apply(&mut plant, v).is_err() {
            return cell;
        }
    }
    let Ok(np) = plant.normalize() else { return cell };
    let ctx = HarmonicContext::new(np);
    let report = analyze(&ctx);
    let np = ctx.plant();

    cell.verdict = format!("{:?}", report.verdict);
    cell.zone = report.zone.clone();
    cell.phi1 = Some(report.phi1);
    cell.phi2 = Some(report.phi2);
    cell.poles = report.pole_count;
    cell.ne_required = report.required_ne;
    cell.ne_achieved = report.achieved_ne;
    if report.verdict != Verdict::Degenerate && report.principal_term_ok {
        if let Ok(ac) = achieved_counts(&ctx) {
            cell.windows = ac.windows;
        }
    }

    let mut cls = vec![
        ("Phi1".to_string(), report.phi1),
        ("Phi2".to_string(), report.phi2),
        ("Unn".to_string(), np.u(np.n())),
    ];
    if let Ok(chain) = SturmChain::build(&pole_polynomial(np)) {
        for i in 0..chain.len() {
            let lead = chain.members()[i].degree();
            cls.push((format!("Psi{i},0"), chain.psi(i, 0)));
            cls.push((format!("Psi{i},{lead}"), chain.psi(i, lead)));
        }
    }
    if let Some(t) = report.ed.first() {
        cls.push(("Ed".to_string(), t.ed));
    }
    cell.classifiers = cls;
    cell
}

/// Marching-squares zero contours of every classifier present on all four
/// corners of a grid cell.
fn extract_boundaries(cells: &[ZoneCell], xs: &[f64], ys: &[f64]) -> Vec<Boundary> {
    let nx = xs.len();
    let mut names: Vec<String> = Vec::new();
    for c in cells {
        for (n, _) in &c.classifiers {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
    }
    let value = |i: usize, j: usize, name: &str| -> Option<f64> {
        cells[j * nx + i]
            .classifiers
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    };
    let mut out = Vec::new();
    for name in names {
        let mut segments = Vec::new();
        for j in 0..ys.len().saturating_sub(1) {
            for i in 0..nx.saturating_sub(1) {
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let vals: Option<Vec<f64>> =
                    corners.iter().map(|&(a, b)| value(a, b, &name)).collect();
                let Some(vals) = vals else { continue };
                let mut pts = Vec::new();
                for k in 0..4 {
                    let (a, b) = (k, (k + 1) % 4);
                    let (va, vb) = (vals[a], vals[b]);
                    if (va > 0.0) != (vb > 0.0) {
                        let s = va / (va - vb);
                        let (pa, pb) = (corners[a], corners[b]);
                        let x = xs[pa.0] + s * (xs[pb.0] - xs[pa.0]);
                        let y = ys[pa.1] + s * (ys[pb.1] - ys[pa.1]);
                        pts.push([x, y]);
                    }
                }
                if pts.len() == 2 {
                    segments.push([pts[0], pts[1]]);
                } else if pts.len() == 4 {
                    segments.push([pts[0], pts[1]]);
                    segments.push([pts[2], pts[3]]);
                }
            }
        }
        if !segments.is_empty() {
            out.push(Boundary {
                classifier: name,
                segments,
            });
        }
    }
    out
}

/// Verdict over a grid of one or two plant parameters (others fixed), with
/// classifier boundaries for two-dimensional grids.
pub fn scan_parameter_plane(
    base: &PlantSpec,
    a1: &GridAxis,
    a2: Option<&GridAxis>,
    exec: Execution,
) -> ZoneScan {
    let xs = a1.values();
    let ys = a2.map(|a| a.values()).unwrap_or_default();
    let jobs: Vec<(f64, Option<f64>)> = match a2 {
        None => xs.iter().map(|&x| (x, None)).collect(),
        Some(_) => ys
            .iter()
            .flat_map(|&y| xs.iter().map(move |&x| (x, Some(y))))
            .collect(),
    };
    let cells = exec.map(&jobs, |&(x, y)| {
        scan_cell(base, a1, x, a2.zip(y))
    });
    let boundaries = if a2.is_some() {
        extract_boundaries(&cells, &xs, &ys)
    } else {
        Vec::new()
    };
    ZoneScan {
        param1: a1.param.name(),
        param2: a2.map(|a| a.param.name()),
        cells,
        boundaries,
    }
}
