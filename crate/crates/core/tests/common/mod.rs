#![allow(dead_code)]

use delaystab_core::harmonic::HarmonicContext;
use delaystab_core::oracle::{count_rhp_zeros, ContourSpec};
use delaystab_core::region::{admissible_h, region_in_interval, RegionOptions, StabilityRegion};
use delaystab_core::stabilizability::{analyze, Verdict};
use delaystab_core::{ControllerPoint, Execution, NormalizedPlant};
use rand::prelude::*;

fn constant(rng: &mut StdRng, pos_prob: f64) -> f64 {
    let mag = rng.gen_range(0.1..3.0);
    if rng.gen_bool(pos_prob) {
        mag
    } else {
        -rng.gen_range(0.05..1.0)
    }
}

/// `n` in 1..=4, `m < n`, mostly stable poles and minimum-phase zeros.
pub fn random_plant(rng: &mut StdRng) -> Option<NormalizedPlant> {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(0..n);
    let t = (0..n).map(|_| constant(rng, 0.85)).collect();
    let z = (0..m).map(|_| constant(rng, 0.8)).collect();
    NormalizedPlant::new(t, z).ok()
}

/// Nonempty region at a random interior `h`, or `None` with the reason.
pub fn random_region(rng: &mut StdRng, ctx: &HarmonicContext) -> Result<StabilityRegion, &'static str> {
    let report = analyze(ctx);
    if report.verdict != Verdict::Stabilizable {
        return Err("not stabilizable");
    }
    let iv = admissible_h(ctx, report.case.ok_or("no case")?, None).map_err(|_| "no interval")?;
    let h = iv.lower + (iv.upper - iv.lower) * rng.gen_range(0.1..0.9);
    let region = region_in_interval(ctx, h, &iv, &RegionOptions::default()).map_err(|_| "region failed")?;
    if region.is_empty() {
        return Err("empty region");
    }
    Ok(region)
}

/// A point strictly inside (pulled toward the centroid by up to `shrink`)
/// or just outside an edge (by `offset` times the edge length).
pub fn probe(rng: &mut StdRng, region: &StabilityRegion, inside: bool, shrink: f64, offset: f64) -> Option<[f64; 2]> {
    let c = region.centroid()?;
    let poly = &region.polygon;
    let k = rng.gen_range(0..poly.len());
    let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
    if inside {
        let s: f64 = rng.gen_range(0.0..1.0);
        let q = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
        let f = rng.gen_range(0.0..shrink);
        return Some([c[0] + f * (q[0] - c[0]), c[1] + f * (q[1] - c[1])]);
    }
    // edges on the clipping box are not real boundaries
    let on_box = |p: [f64; 2]| p[0].abs() >= 0.999 * 1e3 || p[1].abs() >= 0.999 * 1e3;
    if on_box(a) && on_box(b) {
        return None;
    }
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let len = ex.hypot(ey);
    let d = offset * len.max(1e-3);
    Some([0.5 * (a[0] + b[0]) + d * ey / len, 0.5 * (a[1] + b[1]) - d * ex / len])
}

#[derive(Debug, Default)]
pub struct Agreement {
    pub agree: usize,
    pub failures: Vec<String>,
    pub skipped: usize,
}

/// Alternating inside/outside probes on random plants, each checked by
/// contour winding: inside must have no RHP zeros, outside at least one.
pub fn oracle_agreement(seed: u64, samples: usize, shrink: f64, offset: f64, exec: Execution) -> Agreement {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Agreement::default();
    let mut tries = 0;
    while out.agree + out.failures.len() < samples && tries < 50 * samples {
        tries += 1;
        let Some(np) = random_plant(&mut rng) else { continue };
        let ctx = HarmonicContext::new(np);
        let Ok(region) = random_region(&mut rng, &ctx) else {
            out.skipped += 1;
            continue;
        };
        let inside = (out.agree + out.failures.len()) % 2 == 0;
        let Some(p) = probe(&mut rng, &region, inside, shrink, offset) else { continue };
        let point = ControllerPoint::new(region.h, p[0], p[1]);
        let count = count_rhp_zeros(ctx.plant(), &point, &ContourSpec::default(), exec);
        match count {
            Ok(c) if (c.rhp_zeros == 0) == inside => out.agree += 1,
            other => out.failures.push(format!(
                "t={:?} z={:?} h={} point={p:?} inside={inside} got {other:?}",
                ctx.plant().t(),
                ctx.plant().z(),
                region.h
            )),
        }
    }
    out
}
