//! Stability region of `(h_i, h_d)` for a fixed proportional gain `h`.
//!
//! Every positive root `y0` of `G(y) = y (h - G1(y))` contributes one
//! half-plane `h_i - h_d y0^2 < F1(y0)` (or `>` when `G1'(y0) < 0`).
//! Consecutive roots are paired into triangles with the `h_d` axis as third
//! side; the region is the intersection of all half-planes, the axis
//! constraint `(h + 1) h_i > 0` and, for `m = n - 1`, the strip
//! `|h_d| < |U(n,n) / V(m,m)|`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::harmonic::{Extremum, HarmonicContext, ZERO_TOL};
use crate::plant::ControllerPoint;
use crate::roots::{has_close_pair, scan_roots, SCAN_STEP};
use crate::stabilizability::{case_of, check_principal_term, required_counts, Case};

/// Half-width of the seed box that unbounded regions are clipped to.
pub const DEFAULT_BOX: f64 = 1e3;

/// Vertex merge distance and constraint satisfaction tolerance.
pub const GEOM_TOL: f64 = 1e-9;

/// Environment variable overriding the frequency scan ceiling.
pub const SCAN_MAX_ENV: &str = "DELAYSTAB_SCAN_MAX";

/// Scan ceiling from `DELAYSTAB_SCAN_MAX`, if set to a positive number.
pub fn scan_max_from_env() -> Option<f64> {
    std::env::var(SCAN_MAX_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v > 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HInterval {
    pub lower: f64,
    pub upper: f64,
    pub case: Case,
    /// Extrema examined when looking for the one nearest to `-1`.
    pub extrema: Vec<Extremum>,
    pub y_r1: Option<f64>,
}

impl HInterval {
    pub fn contains(&self, h: f64) -> bool {
        h > self.lower && h < self.upper
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// `steps` values equally spaced strictly inside the interval.
    pub fn interior_points(&self, steps: usize) -> Vec<f64> {
        (1..=steps)
            .map(|k| self.lower + (self.upper - self.lower) * k as f64 / (steps + 1) as f64)
            .collect()
    }
}

/// Number of real roots of `G` in `[-2 r pi + eps, 2 r pi + eps]`,
/// using the evenness of `G1` and the root at the origin.
pub fn nr_in_window(positive_roots: &[f64], r: usize, epsilon: f64) -> usize {
    1 + crate::stabilizability::window_count(positive_roots, r, epsilon)
}

/// The open interval of `h` for which `G` has the required number of real
/// roots: from `-1` to the extremum of `G1` nearest to it on the side
/// selected by the case.
pub fn admissible_h(ctx: &HarmonicContext, case: Case, scan_max: Option<f64>) -> Result<HInterval> {
    let y_max = scan_max.unwrap_or_else(|| ctx.default_scan_max());
    let env = ctx.hm_envelope(y_max)?;
    let side = case.side();
    let nearest = env
        .extrema
        .iter()
        .filter(|e| side * (e.g1 + 1.0) > ZERO_TOL)
        .min_by(|a, b| (a.g1 + 1.0).abs().total_cmp(&(b.g1 + 1.0).abs()))
        .ok_or_else(|| {
            Error::EmptyInterval(format!(
                "no extremum of G1 on the {} side of -1",
                if side > 0.0 { "upper" } else { "lower" }
            ))
        })?;
    let (lower, upper) = match case {
        Case::Case1 => (-1.0, nearest.g1),
        Case::Case2 => (nearest.g1, -1.0),
    };
    let interval = HInterval {
        lower,
        upper,
        case,
        extrema: env.extrema.clone(),
        y_r1: env.y_r1,
    };

    // the interval must actually deliver the required root count
    let required = required_counts(ctx.plant())?;
    let h = interval.midpoint();
    let rs = crate::stabilizability::reference_windows(ctx, 0);
    let top = 2.0 * rs[2] as f64 * PI + required.epsilon + 1e-9;
    let roots = ctx.level_roots(h, top)?;
    for r in rs {
        let got = nr_in_window(&roots, r, required.epsilon) as i64;
        if got != required.nr(r) {
            return Err(Error::EmptyInterval(format!(
                "h = {h} between -1 and the nearest extremum gives N_r = {got}, \
                 required {} at r = {r}",
                required.nr(r)
            )));
        }
    }
    Ok(interval)
}

/// A positive root of `G(y)` for a fixed `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GRoot {
    pub y: f64,
    /// `h_e = F1(y)`.
    pub he: f64,
    /// `G1'(y)`.
    pub slope: f64,
}

/// Positive roots of `G(y)` in `(0, y_max]`, ascending.
pub fn g_roots(ctx: &HarmonicContext, h: f64, y_max: f64) -> Result<Vec<GRoot>> {
    let ys = ctx.level_roots(h, y_max)?;
    if has_close_pair(&ys) {
        return Err(Error::Degenerate(format!("near-double root of G at h = {h}")));
    }
    ys.into_iter()
        .map(|y| {
            let (slope, _) = ctx.g1_derivatives(y)?;
            if slope.abs() < ZERO_TOL {
                return Err(Error::Degenerate(format!("G1'({y}) vanishes")));
            }
            Ok(GRoot {
                y,
                he: ctx.f1(y)?,
                slope,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Lt,
    Gt,
}

/// `h_i - h_d y0^2 < rhs` (`Lt`) or `> rhs` (`Gt`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub y0: f64,
    pub rhs: f64,
    pub dir: Direction,
}

impl Constraint {
    pub fn from_root(root: &GRoot) -> Self {
        Constraint {
            y0: root.y,
            rhs: root.he,
            dir: if root.slope > 0.0 {
                Direction::Lt
            } else {
                Direction::Gt
            },
        }
    }

    /// Signed slack, positive inside.
    pub fn slack(&self, hi: f64, hd: f64) -> f64 {
        let lhs = hi - hd * self.y0 * self.y0;
        match self.dir {
            Direction::Lt => self.rhs - lhs,
            Direction::Gt => lhs - self.rhs,
        }
    }

    fn half_plane(&self) -> HalfPlane {
        let y2 = self.y0 * self.y0;
        match self.dir {
            Direction::Lt => HalfPlane::new(1.0, -y2, self.rhs),
            Direction::Gt => HalfPlane::new(-1.0, y2, -self.rhs),
        }
    }
}

/// `a h_i + b h_d < c`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct HalfPlane {
    a: f64,
    b: f64,
    c: f64,
}

impl HalfPlane {
    fn new(a: f64, b: f64, c: f64) -> Self {
        HalfPlane { a, b, c }
    }

    fn slack(&self, p: [f64; 2]) -> f64 {
        self.c - self.a * p[0] - self.b * p[1]
    }

    fn norm(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPair {
    pub index: usize,
    pub a: GRoot,
    pub b: GRoot,
}

/// Pairs consecutive roots (1st with 2nd, 3rd with 4th, ...).
pub fn pair_roots(roots: &[GRoot]) -> Vec<RootPair> {
    roots
        .chunks_exact(2)
        .enumerate()
        .map(|(i, c)| RootPair {
            index: i + 1,
            a: c[0],
            b: c[1],
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub index: usize,
    pub ya: f64,
    pub yb: f64,
    pub hea: f64,
    pub heb: f64,
    #[serde(rename = "V")]
    pub v: [f64; 2],
    #[serde(rename = "U")]
    pub u: [f64; 2],
    #[serde(rename = "W")]
    pub w: [f64; 2],
    /// `h_d` of the points on the two sides at `h_i = h_i(V_1)`.
    pub hd_r: f64,
    pub hd_s: f64,
}

/// `sqrt(P^2 + Q^2 - h^2)`, zero where the radicand is negative.
fn radical(ctx: &HarmonicContext, h: f64, y: f64) -> Result<f64> {
    let (p, q) = ctx.pq(y)?;
    Ok((p * p + q * q - h * h).max(0.0).sqrt())
}

fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Vertices and probe ordinates of the triangle of one root pair.
/// `hi_v1` is `h_i(V_1)`; pass `None` for the first pair.
pub fn triangle_geometry(
    ctx: &HarmonicContext,
    h: f64,
    pair: &RootPair,
    hi_v1: Option<f64>,
) -> Result<Triangle> {
    let (ya, yb) = (pair.a.y, pair.b.y);
    let (hea, heb) = (pair.a.he, pair.b.he);
    let (ya2, yb2) = (ya * ya, yb * yb);
    let den = yb2 - ya2;
    if den.abs() < f64::EPSILON * yb2 {
        return Err(Error::Degenerate("coincident roots in a pair".into()));
    }
    let v = [(yb2 * hea - ya2 * heb) / den, (hea - heb) / den];
    let hi_v1 = hi_v1.unwrap_or(v[0]);
    let hd_r = hi_v1 / yb2 - sign(heb) * radical(ctx, h, yb)? / yb;
    let hd_s = hi_v1 / ya2 - sign(hea) * radical(ctx, h, ya)? / ya;
    Ok(Triangle {
        index: pair.index,
        ya,
        yb,
        hea,
        heb,
        v,
        u: [0.0, -heb / yb2],
        w: [0.0, -hea / ya2],
        hd_r,
        hd_s,
    })
}

/// `|h_e| - y sqrt(P^2 + Q^2 - h^2)` at a root of `G`; vanishes identically.
pub fn elimination_residual(ctx: &HarmonicContext, h: f64, y0: f64) -> Result<f64> {
    Ok(ctx.f1(y0)?.abs() - y0 * radical(ctx, h, y0)?)
}

/// Frequency beyond which further triangles contain the first one.
pub fn termination_bound(ctx: &HarmonicContext, h: f64, first: &Triangle, y_max: f64) -> f64 {
    // h_d(U) and h_d(R) as continuous functions of the root abscissa, for
    // both signs of h_e: -s sqrt(M)/y and hi_v1/y^2 - s sqrt(M)/y with
    // M = P^2 + Q^2 - h^2.
    let jet_terms = |y: f64| -> Option<(f64, f64)> {
        let j = ctx.jet(y).ok()?;
        let m = j.p * j.p + j.q * j.q - h * h;
        if m <= 0.0 {
            return None;
        }
        Some((m, 2.0 * (j.p * j.dp + j.q * j.dq)))
    };
    let u_slope = |y: f64| jet_terms(y).map(|(m, dm)| y * dm - 2.0 * m);
    let hi_v1 = first.v[0];
    let r_slope = |s: f64| {
        move |y: f64| {
            jet_terms(y).map(|(m, dm)| {
                let root = m.sqrt();
                -2.0 * hi_v1 / (y * y * y) - s * (0.5 * y * dm / root - root) / (y * y)
            })
        }
    };
    let lo = 1e-6;
    let mut y_r2 = first.yb;
    for roots in [
        scan_roots(u_slope, lo, y_max, SCAN_STEP, None),
        scan_roots(r_slope(1.0), lo, y_max, SCAN_STEP, None),
        scan_roots(r_slope(-1.0), lo, y_max, SCAN_STEP, None),
    ] {
        if let Some(last) = roots.last() {
            y_r2 = y_r2.max(*last);
        }
    }
    y_r2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointClass {
    Inside,
    Marginal,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityRegion {
    pub h: f64,
    pub case: Case,
    pub interval: [f64; 2],
    pub constraints: Vec<Constraint>,
    pub triangles: Vec<Triangle>,
    /// `|h_d|` bound for `m = n - 1`.
    pub hd_bound: Option<f64>,
    pub y_r2: Option<f64>,
    /// Roots of `G` were collected up to this frequency.
    pub horizon: f64,
    /// Counterclockwise, possibly empty.
    pub polygon: Vec<[f64; 2]>,
    pub flags: Vec<String>,
}

impl StabilityRegion {
    fn half_planes(&self) -> Vec<HalfPlane> {
        let side = self.case.side();
        let mut out = vec![HalfPlane::new(-side, 0.0, 0.0)];
        if let Some(b) = self.hd_bound {
            out.push(HalfPlane::new(0.0, 1.0, b));
            out.push(HalfPlane::new(0.0, -1.0, b));
        }
        out.extend(self.constraints.iter().map(Constraint::half_plane));
        out
    }

    /// Whether `(h_i, h_d)` is strictly inside, on the boundary (within
    /// [`GEOM_TOL`] relative), or outside.
    pub fn classify(&self, hi: f64, hd: f64) -> PointClass {
        let mut marginal = false;
        for hp in self.half_planes() {
            let scale = hp.norm() * (1.0 + hi.abs().max(hd.abs())) + hp.c.abs();
            let s = hp.slack([hi, hd]);
            if s < -GEOM_TOL * scale {
                return PointClass::Outside;
            }
            if s <= GEOM_TOL * scale {
                marginal = true;
            }
        }
        if marginal {
            PointClass::Marginal
        } else {
            PointClass::Inside
        }
    }

    /// Polygon cut out by the fixed bounds and the roots with `y0 <= y_limit`
    /// only, clipped to `[-bound, bound]^2`.
    pub fn polygon_up_to(&self, y_limit: f64, bound: f64) -> Vec<[f64; 2]> {
        let truncated = StabilityRegion {
            constraints: self
                .constraints
                .iter()
                .filter(|c| c.y0 <= y_limit)
                .copied()
                .collect(),
            ..self.clone()
        };
        intersect(&truncated.half_planes(), bound).0
    }

    pub fn is_empty(&self) -> bool {
        self.polygon.len() < 3
    }

    pub fn is_unbounded(&self) -> bool {
        self.flags.iter().any(|f| f == "Unbounded")
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.polygon)
    }

    /// Mean of the polygon vertices (inside for a nonempty convex polygon).
    pub fn centroid(&self) -> Option<[f64; 2]> {
        if self.is_empty() {
            return None;
        }
        let n = self.polygon.len() as f64;
        let (sx, sy) = self
            .polygon
            .iter()
            .fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
        Some([sx / n, sy / n])
    }

    pub fn point(&self, hi: f64, hd: f64) -> ControllerPoint {
        ControllerPoint::new(self.h, hi, hd)
    }
}

pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

fn clip(poly: &[[f64; 2]], hp: &HalfPlane) -> Vec<[f64; 2]> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let (sp, sq) = (hp.slack(p), hp.slack(q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn dedup(poly: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(poly.len());
    for p in poly {
        let near = |q: &[f64; 2]| (p[0] - q[0]).abs() <= GEOM_TOL && (p[1] - q[1]).abs() <= GEOM_TOL;
        if !out.last().is_some_and(near) {
            out.push(p);
        }
    }
    while out.len() > 1 && {
        let (f, l) = (out[0], out[out.len() - 1]);
        (f[0] - l[0]).abs() <= GEOM_TOL && (f[1] - l[1]).abs() <= GEOM_TOL
    } {
        out.pop();
    }
    out
}

/// Intersection of half-planes with the box `[-bound, bound]^2`.
fn intersect(half_planes: &[HalfPlane], bound: f64) -> (Vec<[f64; 2]>, bool) {
    let mut poly = vec![[-bound, -bound], [bound, -bound], [bound, bound], [-bound, bound]];
    for hp in half_planes {
        if poly.is_empty() {
            break;
        }
        poly = dedup(clip(&poly, hp));
    }
    if poly.len() < 3 || polygon_area(&poly) <= 0.0 {
        return (Vec::new(), false);
    }
    let touches = poly
        .iter()
        .any(|p| p[0].abs() >= bound * (1.0 - 1e-12) || p[1].abs() >= bound * (1.0 - 1e-12));
    (poly, touches)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionOptions {
    /// Frequency ceiling for roots of `G`; by default twice `y_r2` or the
    /// context's default scan ceiling, whichever is larger.
    pub scan_max: Option<f64>,
    pub bound: f64,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions {
            scan_max: scan_max_from_env(),
            bound: DEFAULT_BOX,
        }
    }
}

/// Region at `h`, which must lie strictly inside `interval`.
pub fn region_in_interval(
    ctx: &HarmonicContext,
    h: f64,
    interval: &HInterval,
    opts: &RegionOptions,
) -> Result<StabilityRegion> {
    if !interval.contains(h) || !h.is_finite() {
        return Err(Error::HOutsideInterval {
            h,
            lower: interval.lower,
            upper: interval.upper,
        });
    }
    let np = ctx.plant();
    let pt = check_principal_term(np, None)?;
    let base = opts.scan_max.unwrap_or_else(|| ctx.default_scan_max());

    let roots = g_roots(ctx, h, base)?;
    let pairs = pair_roots(&roots);
    let mut flags = Vec::new();
    let mut y_r2 = None;
    let horizon = match pairs.first() {
        Some(p) => {
            let first = triangle_geometry(ctx, h, p, None)?;
            let yr = termination_bound(ctx, h, &first, base);
            y_r2 = Some(yr);
            match opts.scan_max {
                Some(s) => s,
                None => base.max(2.0 * yr + 2.0 * PI),
            }
        }
        None => {
            flags.push("NoTriangle".to_string());
            base
        }
    };
    let roots = if horizon > base {
        g_roots(ctx, h, horizon)?
    } else {
        roots
    };
    let pairs = pair_roots(&roots);
    let mut triangles = Vec::with_capacity(pairs.len());
    let mut hi_v1 = None;
    for p in &pairs {
        let t = triangle_geometry(ctx, h, p, hi_v1)?;
        hi_v1.get_or_insert(t.v[0]);
        triangles.push(t);
    }

    let mut region = StabilityRegion {
        h,
        case: interval.case,
        interval: [interval.lower, interval.upper],
        constraints: roots.iter().map(Constraint::from_root).collect(),
        triangles,
        hd_bound: pt.hd_bound,
        y_r2,
        horizon,
        polygon: Vec::new(),
        flags,
    };
    let (polygon, unbounded) = intersect(&region.half_planes(), opts.bound);
    if unbounded {
        region.flags.push("Unbounded".to_string());
    }
    if polygon.is_empty() {
        region.flags.push("Empty".to_string());
    }
    region.polygon = polygon;
    Ok(region)
}

/// Admissible interval and region at `h` in one call.
pub fn stability_region(ctx: &HarmonicContext, h: f64, opts: &RegionOptions) -> Result<StabilityRegion> {
    check_principal_term(ctx.plant(), None)?;
    let case = case_of(ctx.plant())?;
    let interval = admissible_h(ctx, case, opts.scan_max)?;
    region_in_interval(ctx, h, &interval, opts)
}

/// Regions at `steps` values of `h` equally spaced strictly inside the
/// interval, in ascending `h`.
pub fn sweep_h(
    ctx: &HarmonicContext,
    interval: &HInterval,
    steps: usize,
    opts: &RegionOptions,
    exec: Execution,
) -> Vec<Result<StabilityRegion>> {
    let hs = interval.interior_points(steps);
    exec.map(&hs, |&h| region_in_interval(ctx, h, interval, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::NormalizedPlant;

    fn example() -> HarmonicContext {
        HarmonicContext::new(NormalizedPlant::new(vec![0.6, 0.8], vec![]).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn example_interval() {
        let ctx = example();
        let iv = admissible_h(&ctx, Case::Case1, None).unwrap();
        assert_eq!(iv.lower, -1.0);
        assert!(close(iv.upper, 2.330, 2e-3), "{}", iv.upper);
        assert!(iv.contains(0.5));
        assert!(!iv.contains(-1.0));
        assert!(!iv.contains(3.0));
    }

    #[test]
    fn example_roots_and_constraints() {
        let ctx = example();
        let roots = g_roots(&ctx, 0.5, 3.0 * PI).unwrap();
        let ys: Vec<f64> = roots.iter().map(|r| r.y).collect();
        for (y, e) in ys.iter().zip([0.863, 2.498, 5.285, 8.191]) {
            assert!(close(*y, e, 2e-3), "{ys:?}");
        }
        assert_eq!(ys.len(), 4);
        let c = Constraint::from_root(&roots[0]);
        assert_eq!(c.dir, Direction::Lt);
        assert!(close(c.rhs, 1.099, 2e-3));
        assert!(close(c.y0 * c.y0, 0.745, 1e-3));
        let c = Constraint::from_root(&roots[1]);
        assert_eq!(c.dir, Direction::Gt);
        assert!(close(c.rhs, -9.985, 5e-3));
        for r in &roots {
            assert!((ctx.g1(r.y).unwrap() - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn example_triangles() {
        let ctx = example();
        let region = stability_region(&ctx, 0.5, &RegionOptions::default()).unwrap();
        let t1 = region.triangles[0];
        assert!(close(t1.v[0], 2.600, 2e-3));
        assert!(close(t1.v[1], 2.016, 2e-3));
        assert!(close(t1.u[1], 1.600, 2e-3));
        assert!(close(t1.w[1], -1.476, 2e-3));
        let t2 = region.triangles[1];
        assert!(close(t2.hea, 76.290, 5e-3));
        assert!(close(t2.heb, -272.288, 5e-3));
        assert!(close(t2.u[1], 4.058, 2e-3));
        assert!(close(t2.w[1], -2.732, 2e-3));
        assert!(close(t2.hd_r, 4.097, 2e-3));
        assert!(close(t2.hd_s, -2.638, 2e-3));

        // the polygon is triangle U1 V1 W1
        assert_eq!(region.polygon.len(), 3, "{:?}", region.polygon);
        for v in [t1.u, t1.v, t1.w] {
            assert!(region
                .polygon
                .iter()
                .any(|p| close(p[0], v[0], 1e-9) && close(p[1], v[1], 1e-9)));
        }
        assert!(region.area() > 0.0);
        assert!(!region.is_unbounded() && !region.is_empty(), "{:?}", region.flags);
        assert_eq!(region.classify(1.0, 0.5), PointClass::Inside);
        assert_eq!(region.classify(5.0, 0.0), PointClass::Outside);
        assert_eq!(region.classify(t1.v[0], t1.v[1]), PointClass::Marginal);
    }

    #[test]
    fn h_outside_interval() {
        let ctx = example();
        for h in [3.0, -1.0, f64::NAN] {
            assert!(matches!(
                stability_region(&ctx, h, &RegionOptions::default()),
                Err(Error::HOutsideInterval { .. })
            ));
        }
    }

    #[test]
    fn rectangle_for_m_equal_n_minus_1() {
        let ctx = HarmonicContext::new(NormalizedPlant::new(vec![1.0, 2.0], vec![0.5]).unwrap());
        let case = case_of(ctx.plant()).unwrap();
        let iv = admissible_h(&ctx, case, None).unwrap();
        let region = region_in_interval(&ctx, iv.midpoint(), &iv, &RegionOptions::default()).unwrap();
        assert!((region.hd_bound.unwrap() - 4.0).abs() < 1e-9);
        assert!(region.polygon.iter().all(|p| p[1].abs() <= 4.0 + 1e-9));
        for hi in [0.01, 0.1, 1.0] {
            assert_ne!(region.classify(hi, 4.0), PointClass::Inside);
            assert_eq!(region.classify(hi, -4.5), PointClass::Outside);
        }
    }

    #[test]
    fn single_half_plane_is_unbounded() {
        let (poly, unbounded) = intersect(&[HalfPlane::new(1.0, 0.0, 0.0)], 10.0);
        assert!(unbounded);
        assert!(close(polygon_area(&poly), 200.0, 1e-9));
        let (poly, _) = intersect(
            &[HalfPlane::new(1.0, 0.0, 0.0), HalfPlane::new(-1.0, 0.0, -1.0)],
            10.0,
        );
        assert!(poly.is_empty());
    }

    #[test]
    fn sweep_slices() {
        let ctx = example();
        let iv = admissible_h(&ctx, Case::Case1, None).unwrap();
        let slices = sweep_h(&ctx, &iv, 5, &RegionOptions::default(), Execution::Sequential);
        assert_eq!(slices.len(), 5);
        let areas: Vec<f64> = slices.iter().map(|r| r.as_ref().unwrap().area()).collect();
        assert!(areas.iter().all(|a| *a > 0.0), "{areas:?}");
        let one = sweep_h(&ctx, &iv, 1, &RegionOptions::default(), Execution::Sequential);
        assert!(close(one[0].as_ref().unwrap().h, iv.midpoint(), 1e-15));
    }

    #[test]
    fn case2_interval_lies_below_minus_one() {
        // two negative time constants with U(2,2) < 0 would need exactly one;
        // t = (-0.6, 0.8) gives U(2,2) = -0.48
        let ctx = HarmonicContext::new(NormalizedPlant::new(vec![-0.6, 0.8], vec![]).unwrap());
        assert_eq!(case_of(ctx.plant()).unwrap(), Case::Case2);
        if let Ok(iv) = admissible_h(&ctx, Case::Case2, None) {
            assert_eq!(iv.upper, -1.0);
            assert!(iv.lower < -1.0);
        }
    }
}
