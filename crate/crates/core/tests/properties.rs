use delaystab_core::harmonic::HarmonicContext;
use delaystab_core::region::{admissible_h, elimination_residual, region_in_interval, Direction, PointClass, RegionOptions, StabilityRegion};
use delaystab_core::stabilizability::{achieved_counts, analyze, case_of, required_counts, Verdict};
use delaystab_core::{NormalizedPlant, PlantSpec};
use proptest::prelude::*;

fn time_constant(pos_weight: u32) -> impl Strategy<Value = f64> {
    prop_oneof![pos_weight => 0.1f64..3.0, 1 => -1.0f64..-0.05]
}

/// Dimensionless plants with `n <= 4`, `m <= n - 1`.
fn plant() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..=4).prop_flat_map(|n| {
        (0..n).prop_flat_map(move |m| {
            (
                proptest::collection::vec(time_constant(5), n),
                proptest::collection::vec(time_constant(4), m),
            )
        })
    })
}

fn context(t: &[f64], z: &[f64]) -> Option<HarmonicContext> {
    NormalizedPlant::new(t.to_vec(), z.to_vec()).ok().map(HarmonicContext::new)
}

/// Region at a fraction of the admissible interval for stabilizable plants.
fn region_for(ctx: &HarmonicContext, frac: f64) -> Option<StabilityRegion> {
    if analyze(ctx).verdict != Verdict::Stabilizable {
        return None;
    }
    let iv = admissible_h(ctx, case_of(ctx.plant()).ok()?, None).ok()?;
    let h = iv.lower + frac * (iv.upper - iv.lower);
    let r = region_in_interval(ctx, h, &iv, &RegionOptions::default()).ok()?;
    (!r.is_empty()).then_some(r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn origin_jet_of_g1((t, z) in plant()) {
        let Some(ctx) = context(&t, &z) else { return Ok(()) };
        let (_, phi2) = ctx.phi();
        let g0 = ctx.g1(0.0).unwrap();
        let (d1, d2) = ctx.g1_derivatives(0.0).unwrap();
        prop_assert!((g0 + 1.0).abs() < 1e-8);
        prop_assert!(d1.abs() < 1e-8);
        prop_assert!((d2 - phi2).abs() < 1e-8 * (1.0 + phi2.abs()));
    }

    #[test]
    fn achieved_counts_ignore_ordering((t, z) in plant(), rot in 0usize..4) {
        let Some(ctx) = context(&t, &z) else { return Ok(()) };
        let mut t2 = t.clone();
        t2.rotate_left(rot % t.len());
        t2.reverse();
        let mut z2 = z.clone();
        z2.reverse();
        let Some(other) = context(&t2, &z2) else { return Ok(()) };
        match (achieved_counts(&ctx), achieved_counts(&other)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.windows, b.windows);
                prop_assert_eq!(a.ne1, b.ne1);
                prop_assert_eq!(a.pole_count.count, b.pole_count.count);
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a.is_ok(), b.is_ok()),
        }
    }

    #[test]
    fn verdict_ignores_time_scale((t, z) in plant(), c in 0.2f64..5.0, l in 0.3f64..3.0) {
        let scaled = |s: f64, v: &[f64]| v.iter().map(|x| x * l * s).collect::<Vec<_>>();
        let a = PlantSpec::new(1.0, l, scaled(1.0, &t), scaled(1.0, &z));
        let b = PlantSpec::new(1.0, l * c, scaled(c, &t), scaled(c, &z));
        let (Ok(ra), Ok(rb)) = (delaystab_core::analyze_plant(&a), delaystab_core::analyze_plant(&b)) else {
            return Ok(());
        };
        prop_assert_eq!(ra.verdict, rb.verdict);
        prop_assert_eq!(ra.achieved_ne, rb.achieved_ne);
    }

    #[test]
    fn required_counts_follow_case_formula((t, z) in plant()) {
        let Some(ctx) = context(&t, &z) else { return Ok(()) };
        let np = ctx.plant();
        let Ok(req) = required_counts(np) else { return Ok(()) };
        let (n, m, mp) = (np.n() as i64, np.m() as i64, np.m_p() as i64);
        for r in 1..6 {
            prop_assert_eq!(req.nr(r), 4 * r as i64 + n + 1 - m + 2 * mp);
            let gap = req.nr(r) - req.ne(r);
            let (_, phi2) = ctx.phi();
            prop_assert_eq!(gap, if np.u(np.n()) * phi2 < 0.0 { 1 } else { 3 });
        }
    }

    #[test]
    fn region_geometry((t, z) in plant(), frac in 0.1f64..0.9) {
        let Some(ctx) = context(&t, &z) else { return Ok(()) };
        let Some(region) = region_for(&ctx, frac) else { return Ok(()) };
        let poly = &region.polygon;
        // convex, counterclockwise
        for i in 0..poly.len() {
            let (a, b, c) = (poly[i], poly[(i + 1) % poly.len()], poly[(i + 2) % poly.len()]);
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            let scale = 1.0 + a[0].abs().max(a[1].abs()).max(c[0].abs()).max(c[1].abs());
            prop_assert!(cross >= -1e-9 * scale * scale);
        }
        for p in poly {
            prop_assert_ne!(region.classify(p[0], p[1]), PointClass::Outside);
        }
        // inside the first triangle
        if let Some(t1) = region.triangles.first() {
            let side = region.case.side();
            for p in poly {
                prop_assert!(side * p[0] >= -1e-9);
                for c in &region.constraints[..2] {
                    prop_assert!(c.slack(p[0], p[1]) >= -1e-9 * (1.0 + c.rhs.abs() + p[1].abs() * c.y0 * c.y0));
                }
            }
            prop_assert!(t1.ya < t1.yb);
        }
    }

    #[test]
    fn constraint_directions_match_g_prime_f((t, z) in plant(), frac in 0.1f64..0.9) {
        let Some(ctx) = context(&t, &z) else { return Ok(()) };
        let Some(region) = region_for(&ctx, frac) else { return Ok(()) };
        let [hi, hd] = region.centroid().unwrap();
        let point = region.point(hi, hd);
        for c in &region.constraints {
            let (f, _) = ctx.fg(&point, c.y0).unwrap();
            let (slope, _) = ctx.g1_derivatives(c.y0).unwrap();
            let g_prime = -c.y0 * slope;
            prop_assert!(g_prime * f > 0.0);
            prop_assert_eq!(c.dir == Direction::Lt, slope > 0.0);
        }
    }

    #[test]
    fn elimination_identity_at_roots((t, z) in plant(), frac in 0.1f64..0.9) {
        let Some(ctx) = context(&t, &z) else { return Ok(()) };
        let Some(region) = region_for(&ctx, frac) else { return Ok(()) };
        for c in region.constraints.iter().take(12) {
            let res = elimination_residual(&ctx, region.h, c.y0).unwrap();
            prop_assert!(res.abs() < 1e-6 * (1.0 + c.rhs.abs()), "residual {res} at {}", c.y0);
            // boundary line of this constraint is the locus F(y0) = 0
            let hd = 0.37;
            let hi = c.rhs + hd * c.y0 * c.y0;
            let (f, g) = ctx.fg(&region.point(hi, hd), c.y0).unwrap();
            let tol = 1e-8 * (1.0 + c.rhs.abs());
            prop_assert!(f.abs() < tol && g.abs() < tol, "f {f} g {g} at {}", c.y0);
        }
    }

    #[test]
    fn later_triangles_do_not_cut_the_region((t, z) in plant(), frac in 0.1f64..0.9) {
        // with m = n - 1 the region hugs the h_d strip and late roots shave its corners
        if z.len() + 1 == t.len() {
            return Ok(());
        }
        let Some(ctx) = context(&t, &z) else { return Ok(()) };
        let Some(region) = region_for(&ctx, frac) else { return Ok(()) };
        let Some(y_r2) = region.y_r2 else { return Ok(()) };
        if region.is_unbounded() {
            return Ok(());
        }
        // the triangle straddling y_r2 may still bind; everything after it may not
        let Some(limit) = region.triangles.iter().map(|t| t.yb).find(|&yb| yb > y_r2) else {
            return Ok(());
        };
        let early = region.polygon_up_to(limit, delaystab_core::region::DEFAULT_BOX);
        let (a, b) = (delaystab_core::region::polygon_area(&early), region.area());
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{} vs {}", a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triangle_vertices_move_outward_beyond_y_r2(
        t in proptest::collection::vec(0.1f64..3.0, 2..=4),
        frac in 0.1f64..0.9,
    ) {
        // strictly proper by two or more: |h_d(U_i)|, |h_d(W_i)| grow
        let Some(ctx) = context(&t, &[]) else { return Ok(()) };
        let Some(region) = region_for(&ctx, frac) else { return Ok(()) };
        let y_r2 = region.y_r2.unwrap();
        let late: Vec<_> = region.triangles.iter().filter(|t| t.yb > y_r2).collect();
        for w in late.windows(2) {
            prop_assert!(w[1].u[1] >= w[0].u[1] - 1e-9);
            prop_assert!(w[1].w[1] <= w[0].w[1] + 1e-9);
        }
    }
}

#[test]
fn triangle_straddling_y_r2_can_bind() {
    let ctx = context(&[0.1, 0.1], &[]).unwrap();
    let iv = admissible_h(&ctx, case_of(ctx.plant()).unwrap(), None).unwrap();
    let h = iv.lower + 0.15438502367533846 * (iv.upper - iv.lower);
    let region = region_in_interval(&ctx, h, &iv, &RegionOptions::default()).unwrap();
    let y_r2 = region.y_r2.unwrap();
    let t2 = region.triangles[1];
    assert!(t2.ya < y_r2 && y_r2 < t2.yb);
    assert!(t2.u[1] < region.triangles[0].u[1]);
    let cut = delaystab_core::region::polygon_area(&region.polygon_up_to(y_r2, 1e3));
    assert!(cut > region.area() + 1e-3);
}

#[test]
fn late_roots_cut_strip_corners_when_m_is_n_minus_1() {
    let ctx = context(&[0.8744111668121538, 1.3904362278842028], &[-0.7651792444720187]).unwrap();
    let iv = admissible_h(&ctx, case_of(ctx.plant()).unwrap(), None).unwrap();
    let h = iv.lower + 0.2702590470348126 * (iv.upper - iv.lower);
    let region = region_in_interval(&ctx, h, &iv, &RegionOptions::default()).unwrap();
    let y_r2 = region.y_r2.unwrap();
    let limit = region.triangles.iter().map(|t| t.yb).find(|&yb| yb > y_r2).unwrap();
    let early = delaystab_core::region::polygon_area(&region.polygon_up_to(limit, delaystab_core::region::DEFAULT_BOX));
    assert!(early > region.area() + 1e-7);
    // the cut sits at the strip corner
    let bound = region.hd_bound.unwrap();
    assert!(region.polygon.iter().any(|v| v[1] < 0.0 && (v[1] + bound).abs() < 1e-3 && (v[1] + bound).abs() > 1e-6));
}

#[test]
fn small_h_pushes_first_root_to_zero() {
    let ctx = context(&[0.6, 0.8], &[]).unwrap();
    let mut last = f64::INFINITY;
    for h in [-0.5, -0.9, -0.99, -0.999] {
        let y = ctx.level_roots(h, 3.0).unwrap()[0];
        assert!(y < last);
        last = y;
    }
    assert!(last < 0.1);
}
