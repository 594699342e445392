use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::blocks::Layer;
use crate::potential::PotentialParams;

const PHI: f64 = 1.0 / 6.0;

fn spec(kind: CompositeKind, sigma: f64, length: f64, h1_m: f64, h_m: f64) -> CompositeSpec {
    CompositeSpec::new(kind, sigma, length, PHI, h1_m, h_m)
}

fn c(sol: &LeadingOrderSolution, name: &str) -> f64 {
    sol.constant(name)
        .unwrap_or_else(|| panic!("missing constant {name}"))
}

fn violation(result: Result<LeadingOrderSolution>) -> ConstraintReport {
    match result {
        Err(Error::ConstraintViolation { report }) => report,
        other => panic!("expected a constraint violation, got {other:?}"),
    }
}

/// Positions of the sessile zigzags from the explicit chain of formulas
/// (pressures, C2/C4 roots, slopes C3/C5, then positions inductively).
struct SessileOracle {
    l1: f64,
    l2: f64,
    c2: f64,
    c3: f64,
    c4: f64,
    c5: f64,
}

impl SessileOracle {
    fn new(sigma: f64, phi: f64, a: f64, b: f64) -> Self {
        let hb = b / a;
        let (l1, l2) = (phi / b, phi / a);
        let g4 = (hb - sigma - 1.0).powi(2);
        let c4 = (-2.0 * sigma * hb + (4.0 * sigma * sigma * hb * hb + 4.0 * sigma * g4).sqrt())
            / g4
            * b;
        let g2 = (hb - 1.0).powi(2);
        let c2 = (-2.0 * sigma + (4.0 * sigma * sigma + 4.0 * sigma * g2).sqrt()) / g2 * b;
        let c5 = c4 * (l2 - (sigma + 1.0) * l1) / (2.0 * sigma * (sigma + 1.0) * phi).sqrt();
        let c3 = c2 * (l2 - l1) / (2.0 * sigma * phi).sqrt();
        SessileOracle {
            l1,
            l2,
            c2,
            c3,
            c4,
            c5,
        }
    }
}

// ---------------------------------------------------------------- one-CL

#[test]
fn lens_example() {
    let sol = build(&spec(CompositeKind::Lens, 0.2, 2.0, 0.4, 0.2)).unwrap();
    assert_relative_eq!(sol.lambda1_0.unwrap(), 0.833333, epsilon = 1e-6);
    assert_eq!(sol.lambda2_0, Some(0.0));
    assert_relative_eq!(c(&sol, "s"), 0.282843, epsilon = 1e-6);
    assert_relative_eq!(
        sol.report.margin("length_exceeds_radius").unwrap(),
        1.717157,
        epsilon = 1e-6
    );
    assert!(sol.report.all_satisfied());
}

#[test]
fn lens_without_lower_layer_is_rejected() {
    let report = violation(build(&spec(CompositeKind::Lens, 0.2, 2.0, 0.4, 0.6)));
    assert_relative_eq!(
        report.margin("lower_layer_under_lens").unwrap(),
        -0.1,
        epsilon = 1e-12
    );
}

#[test]
fn internal_drop_example() {
    let sol = build(&spec(CompositeKind::InternalDrop, 0.2, 2.0, 0.5, 0.8)).unwrap();
    assert_relative_eq!(sol.lambda2_0.unwrap(), 0.333333, epsilon = 1e-6);
    assert_relative_eq!(c(&sol, "s"), 0.774597, epsilon = 1e-6);
    for i in 0..=200 {
        let x = -2.0 * i as f64 / 200.0;
        let total = sol.eval(Layer::H1, x) + sol.eval(Layer::H, x);
        assert_relative_eq!(total, 0.8, epsilon = 1e-12);
    }
}

#[test]
fn drops_leave_one_pressure_undetermined() {
    let hd = build(&spec(CompositeKind::HDrop, 0.2, 2.0, 0.3, 0.2)).unwrap();
    assert_relative_eq!(hd.lambda1_0.unwrap(), 0.833333, epsilon = 1e-6);
    assert_relative_eq!(c(&hd, "s"), 1.307180, epsilon = 1e-6);
    assert_eq!(hd.lambda2_0, None);
    let h1d = build(&spec(CompositeKind::H1Drop, 0.2, 2.0, 0.3, 0.2)).unwrap();
    assert_eq!(h1d.lambda1_0, None);
    assert_relative_eq!(
        c(&h1d, "s"),
        2.0 - 0.3 * (2.0 * 1.2 / PHI).sqrt(),
        epsilon = 1e-14
    );
}

#[test]
fn zero_height_is_a_domain_error() {
    assert!(matches!(
        build(&spec(CompositeKind::Lens, 0.2, 2.0, 0.4, 0.0)),
        Err(Error::Domain(_))
    ));
}

// ---------------------------------------------------------------- zigzag

#[test]
fn zigzag_example_matches_position_formulas() {
    let (sg, l, a, b) = (0.2, 2.0, 0.3, 0.45);
    let sol = build(&spec(CompositeKind::ZigZag, sg, l, a, b)).unwrap();
    let (l1, l2) = (sol.lambda1_0.unwrap(), sol.lambda2_0.unwrap());
    assert_relative_eq!(l2, 0.169764, epsilon = 1e-6);
    assert_relative_eq!(l1, 0.113176, epsilon = 1e-6);
    assert_relative_eq!(l2 / l1, b / a, max_relative = 1e-14);
    // Pressure quadratic L^2 x^2 - 2 a (hb-1)(hb-s-1) x - 2 s phi hb = 0.
    let hb = b / a;
    let q = l * l * l2 * l2 - 2.0 * a * (hb - 1.0) * (hb - sg - 1.0) * l2 - 2.0 * sg * PHI * hb;
    assert!(q.abs() < 1e-14);
    let x_c = l1 * l * (sg + 1.0) / (l2 - (sg + 1.0) * l1);
    let x_c1 = l1 * l / (l2 - l1);
    let s = (2.0 * sg * (sg + 1.0) * PHI).sqrt() / (l2 - (sg + 1.0) * l1) - x_c;
    let s1 = (2.0 * sg * PHI).sqrt() / (l2 - l1) - x_c1;
    assert_relative_eq!(c(&sol, "s"), s, max_relative = 1e-9);
    assert_relative_eq!(c(&sol, "s1"), s1, max_relative = 1e-10);
    assert_relative_eq!(c(&sol, "x_c"), x_c, max_relative = 1e-10);
    assert_relative_eq!(c(&sol, "x_c1"), x_c1, max_relative = 1e-10);
    let r = matching_residual(
        CompositeKind::ZigZag,
        &closed_form_unknowns(&sol).unwrap(),
        &sol.spec,
    )
    .unwrap();
    assert!(r.iter().all(|v| v.abs() <= 1e-9));
}

#[test]
fn zigzag_linear_limit() {
    let sol = build(&spec(CompositeKind::ZigZag, 0.2, 2.0, 0.3, 0.3)).unwrap();
    assert_relative_eq!(sol.lambda1_0.unwrap(), 0.129099, epsilon = 1e-6);
    assert_relative_eq!(sol.lambda2_0.unwrap(), 0.129099, epsilon = 1e-6);
    assert!(sol.flags.contains(&SolutionFlag::LinearBulk(Layer::H1)));
    assert!(sol.continuity_defect() < 1e-10);
    let sol = build(&spec(CompositeKind::ZigZag, 0.2, 2.0, 0.3, 0.36)).unwrap();
    assert!(sol.flags.contains(&SolutionFlag::LinearBulk(Layer::H)));
    assert_relative_eq!(
        sol.lambda1_0.unwrap(),
        (2.0 * 0.2 * PHI / 1.2).sqrt() / 2.0,
        max_relative = 1e-12
    );
}

#[test]
fn zigzag_too_short_names_the_merge() {
    let report = violation(build(&spec(CompositeKind::ZigZag, 0.2, 1.0, 0.3, 0.45)));
    let bound = 2f64.sqrt() * 0.3 * 1.2f64.sqrt() * 0.5 / (0.2 * PHI).sqrt();
    assert_relative_eq!(bound, 1.2727, epsilon = 1e-4);
    assert_relative_eq!(
        report.margin("merge_s_reaches_0").unwrap(),
        1.0 - bound,
        epsilon = 1e-12
    );
    assert_eq!(report.violated().count(), 1);
}

/// The three zigzag length bounds: at each the associated merge happens.
pub(crate) fn zigzag_merge_defects(sigma: f64, h1_m: f64) -> Vec<(&'static str, f64)> {
    let f = 2f64.sqrt() * h1_m / (sigma * PHI).sqrt();
    let r = (sigma + 1.0).sqrt();
    let mut out = Vec::new();
    let hb = 0.5 * (sigma + 1.0);
    let l = f * (sigma + 1.0 - hb);
    let sol = build_unchecked(&spec(CompositeKind::ZigZag, sigma, l, h1_m, hb * h1_m)).unwrap();
    out.push(("s1 - L", c(&sol, "s1") - l));
    let hb = 1.5 * (sigma + 1.0);
    let l = f * r * (hb - 1.0);
    let sol = build_unchecked(&spec(CompositeKind::ZigZag, sigma, l, h1_m, hb * h1_m)).unwrap();
    out.push(("s", c(&sol, "s")));
    let hb = 1.3;
    let l = f * (r + 1.0) * (hb + r);
    let sol = build_unchecked(&spec(CompositeKind::ZigZag, sigma, l, h1_m, hb * h1_m)).unwrap();
    out.push(("s1 - s", c(&sol, "s1") - c(&sol, "s")));
    out
}

#[test]
fn zigzag_bounds_are_merges() {
    for sigma in [0.2, 1.0, 9.0] {
        for (name, defect) in zigzag_merge_defects(sigma, 0.3) {
            assert!(defect.abs() <= 1e-8, "sigma={sigma}: {name} = {defect}");
        }
    }
}

// ---------------------------------------------------------------- two-CL sessile

#[test]
fn sessile_lens_example() {
    let sol = build(&spec(CompositeKind::SessileLens, 0.2, 2.0, 0.15, 0.25)).unwrap();
    assert_relative_eq!(sol.lambda2_0.unwrap(), 0.465116, epsilon = 1e-6);
    assert_relative_eq!(sol.lambda1_0.unwrap(), 1.054264, epsilon = 1e-6);
    assert_relative_eq!(c(&sol, "s1"), 1.646447, epsilon = 1e-6);
    assert_relative_eq!(c(&sol, "s"), 0.640220, epsilon = 1e-6);
    assert_relative_eq!(c(&sol, "C4"), 0.334109, epsilon = 1e-6);
    assert_relative_eq!(sol.maxima.0, 0.334109, epsilon = 1e-6);
}

#[test]
fn sessile_lens_too_short() {
    let report = violation(build(&spec(CompositeKind::SessileLens, 0.2, 2.0, 0.3, 0.5)));
    assert_relative_eq!(
        report.margin("length_fits_chain").unwrap(),
        2.0 - 2.719559,
        epsilon = 1e-6
    );
}

#[test]
fn sessile_lens_flat_critical_case() {
    let sigma = 1.2;
    let a = 0.05;
    let sol = build(&spec(
        CompositeKind::SessileLens,
        sigma,
        10.0,
        a,
        a * (sigma + 1.0) / (sigma - 1.0),
    ))
    .unwrap();
    assert_relative_eq!(
        sol.lambda1_0.unwrap(),
        sol.lambda2_0.unwrap(),
        max_relative = 1e-12
    );
    assert!(sol.flags.contains(&SolutionFlag::FlatBulk(Layer::H1)));
}

#[test]
fn sessile_internal_drop_example() {
    let sol = build(&spec(
        CompositeKind::SessileInternalDrop,
        0.2,
        2.0,
        0.2,
        0.3,
    ))
    .unwrap();
    assert_relative_eq!(sol.lambda1_0.unwrap(), 0.333333, epsilon = 1e-6);
    assert_relative_eq!(sol.lambda2_0.unwrap(), 1.166667, epsilon = 1e-6);
    assert_relative_eq!(c(&sol, "s1"), 1.690161, epsilon = 1e-6);
    assert_relative_eq!(c(&sol, "s"), 0.267949, epsilon = 1e-6);
    assert_relative_eq!(2.0 - c(&sol, "s"), 1.732051, epsilon = 1e-6);
}

#[test]
fn sessile_internal_drop_flat_critical_case() {
    let sigma = 1.2;
    let sol = build(&spec(
        CompositeKind::SessileInternalDrop,
        sigma,
        10.0,
        0.5,
        0.5 * (sigma - 1.0),
    ))
    .unwrap();
    assert_relative_eq!(
        sol.lambda2_0.unwrap(),
        (sigma + 1.0) * sol.lambda1_0.unwrap(),
        max_relative = 1e-12
    );
    assert!(sol.flags.contains(&SolutionFlag::FlatBulk(Layer::H)));
}

#[test]
fn two_drops_example_and_bounds() {
    let sol = build(&spec(CompositeKind::TwoDrops, 0.2, 2.0, 0.2, 0.3)).unwrap();
    assert_relative_eq!(sol.lambda1_0.unwrap(), 0.555556, epsilon = 1e-6);
    assert_relative_eq!(sol.lambda2_0.unwrap(), 0.833333, epsilon = 1e-6);
    assert_relative_eq!(c(&sol, "s1"), 0.960769, epsilon = 1e-6);
    assert_relative_eq!(c(&sol, "s"), 0.758947, epsilon = 1e-6);
    let need = (2.0 / PHI).sqrt() * (0.3 + 1.2f64.sqrt() * 0.2);
    assert_relative_eq!(need, 1.798177, epsilon = 1e-6);
    violation(build(&spec(CompositeKind::TwoDrops, 0.2, 1.5, 0.2, 0.3)));
    let report = existence_report(&spec(CompositeKind::TwoDrops, 0.2, need, 0.2, 0.3)).unwrap();
    let m = report.margin("drops_separated").unwrap();
    assert!(m.abs() < 1e-14);
    assert!(!report.all_satisfied() || m > 0.0);
}

// ---------------------------------------------------------------- sessile zigzags

#[test]
fn two_side_example() {
    let (sg, l, a, b, shift) = (0.2, 6.0, 0.3, 0.45, -3.0);
    let sol =
        build(&spec(CompositeKind::TwoSideSessileZigZag, sg, l, a, b).with_shift(shift)).unwrap();
    assert_relative_eq!(sol.lambda1_0.unwrap(), 0.370370, epsilon = 1e-6);
    assert_relative_eq!(sol.lambda2_0.unwrap(), 0.555556, epsilon = 1e-6);
    assert_relative_eq!(c(&sol, "C4"), 0.286335, epsilon = 1e-6);
    assert_relative_eq!(c(&sol, "C2"), 0.36, epsilon = 1e-12);
    assert_relative_eq!(c(&sol, "s"), 1.441154, epsilon = 1e-6);
    assert_relative_eq!(c(&sol, "s1"), 3.697137, epsilon = 1e-6);
    let o = SessileOracle::new(sg, PHI, a, b);
    let k = (2.0 * sg * PHI).sqrt();
    let s = -(2.0 * PHI).sqrt() / o.l1 - shift;
    let s1 = o.c3 / o.l1 - shift;
    let x_c = -(k + sg * o.c3) / (o.l2 - (sg + 1.0) * o.l1) - s1;
    let x_c1 = k / (o.l1 - o.l2) - s1;
    let s2 = -(2.0 * (sg + 1.0) * sg * PHI).sqrt() / (o.l2 - (sg + 1.0) * o.l1) - x_c;
    let s2_alt = ((2.0 * sg * PHI / (sg + 1.0)).sqrt() - sg * o.c5) / (o.l1 - o.l2) - x_c1;
    let xt_c1 = (sg + 1.0) * o.c5 / o.l2 - s2;
    let s3 = (2.0 * (sg + 1.0) * PHI).sqrt() / o.l2 - xt_c1;
    assert_relative_eq!(s2, s2_alt, max_relative = 1e-10);
    for (name, want) in [
        ("s", s),
        ("s1", s1),
        ("s2", s2),
        ("s3", s3),
        ("C3", o.c3),
        ("C5", o.c5),
        ("C4", o.c4),
    ] {
        assert_relative_eq!(c(&sol, name), want, max_relative = 1e-10);
    }
    assert_relative_eq!(sol.maxima.0, o.c4, max_relative = 1e-12);
    assert_eq!(sol.maxima.1, b);
}

#[test]
fn two_side_shift_bound() {
    let base = spec(CompositeKind::TwoSideSessileZigZag, 0.2, 6.0, 0.3, 0.45);
    let (_, hi) = two_side_shift_range(&base);
    assert_relative_eq!(hi, -1.558846, epsilon = 1e-6);
    let report = violation(build(&base.with_shift(-1.0)));
    assert!(report.margin("shift_keeps_s_positive").unwrap() < 0.0);
}

#[test]
fn h1_sessile_example() {
    let (sg, l, a, b) = (0.2, 6.0, 0.5, 0.55);
    let sol = build(&spec(CompositeKind::H1SessileZigZag, sg, l, a, b)).unwrap();
    assert_relative_eq!(sol.lambda1_0.unwrap(), 0.303030, epsilon = 1e-6);
    assert_relative_eq!(sol.lambda2_0.unwrap(), 0.333333, epsilon = 1e-6);
    let o = SessileOracle::new(sg, PHI, a, b);
    let s2 = (sg + 1.0) * o.c5 / o.l2 + l;
    let x_c1 = sg / (o.l1 - o.l2) * ((2.0 * PHI / (sg * (sg + 1.0))).sqrt() - o.c5) - s2;
    let x_c = -(2.0 * (sg + 1.0) * sg * PHI).sqrt() / (o.l2 - (sg + 1.0) * o.l1) - s2;
    let s1 = (2.0 * sg * PHI).sqrt() / (o.l1 - o.l2) - x_c1;
    let s1_alt = -sg / (o.l2 - (sg + 1.0) * o.l1) * ((2.0 * PHI / sg).sqrt() + o.c3) - x_c;
    let xt_c = o.c3 / o.l1 - s1;
    let s = -(2.0 * PHI).sqrt() / o.l1 - xt_c;
    assert_relative_eq!(s1, s1_alt, max_relative = 1e-10);
    for (name, want) in [
        ("s", s),
        ("s1", s1),
        ("s2", s2),
        ("xt_c", xt_c),
        ("C2", o.c2),
        ("C5", o.c5),
    ] {
        assert_relative_eq!(c(&sol, name), want, max_relative = 1e-10);
    }
    assert!(o.c5 < 0.0);
    let min_l = (2.0 * PHI * (sg * o.l1 + sg.sqrt() * o.l2) + o.c2 * (o.l1 - o.l2).powi(2))
        / ((2.0 * sg * PHI).sqrt() * o.l1 * o.l2);
    assert_relative_eq!(min_l, 2.699, epsilon = 1e-3);
    assert_relative_eq!(
        sol.report.margin("length_above_minimum").unwrap(),
        l - min_l,
        max_relative = 1e-10
    );
    // Leading order of the boundary identity: lambda2 h1_m = |phi(1)|.
    assert_relative_eq!(sol.lambda2_0.unwrap() * a, PHI, max_relative = 1e-14);
}

#[test]
fn h1_sessile_rejects_large_ratio() {
    let report = violation(build(&spec(
        CompositeKind::H1SessileZigZag,
        0.2,
        6.0,
        0.5,
        0.65,
    )));
    assert!(report.margin("hbar_below_sigma_plus_one").unwrap() < 0.0);
}

#[test]
fn h_sessile_example() {
    let sol = build(&spec(CompositeKind::HSessileZigZag, 0.2, 6.0, 0.3, 0.45)).unwrap();
    let x = sol.cl_positions();
    assert_eq!(x.len(), 3);
    assert!(-6.0 < x[0] && x[0] < x[1] && x[1] < x[2] && x[2] < 0.0);
    let report = violation(build(&spec(
        CompositeKind::HSessileZigZag,
        0.2,
        6.0,
        0.3,
        0.27,
    )));
    assert!(report.margin("hbar_above_one").unwrap() < 0.0);
}

#[test]
fn lens_on_zigzag_builds_at_run_parameters() {
    let sol = build(&spec(CompositeKind::LensOnZigZag, 0.7, 5.7, 0.9, 0.3)).unwrap();
    assert_eq!(sol.cls.len(), 3);
    assert!(c(&sol, "h_lens_top") > 0.0);
    let (l1, l2) = (sol.lambda1_0.unwrap(), sol.lambda2_0.unwrap());
    let d = l2 - 1.7 * l1;
    assert!(d < 0.0);
    assert_relative_eq!(
        c(&sol, "s"),
        -(2.0 * 1.7 * 0.7 * PHI).sqrt() / d,
        max_relative = 1e-12
    );
    assert_relative_eq!(c(&sol, "h_lens_top"), -1.7 * PHI / d, max_relative = 1e-12);
    assert_relative_eq!(c(&sol, "h1_lens_top"), 0.9 + PHI / d, max_relative = 1e-12);
    let report = violation(build(&spec(
        CompositeKind::LensOnZigZag,
        0.7,
        5.7,
        0.5,
        0.9,
    )));
    assert!(report.margin("lens_radius_positive").unwrap() < 0.0);
}

// ---------------------------------------------------------------- oracle

#[test]
fn closed_forms_are_roots_of_matching_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for kind in CompositeKind::ALL {
        for _ in 0..5 {
            let spec = sample_interior_spec(kind, &mut rng, 100_000).expect("interior spec");
            let check = oracle_check(&spec, 0.01).unwrap();
            assert!(
                check.closed_form_residual <= 1e-10,
                "{kind}: residual {}",
                check.closed_form_residual
            );
            assert!(check.passed(1e-8), "{kind}: {check:?}");
        }
    }
}

#[test]
fn residual_dimension_mismatch_is_usage_error() {
    let s = spec(CompositeKind::Lens, 0.2, 2.0, 0.4, 0.2);
    assert!(matches!(
        matching_residual(CompositeKind::Lens, &[1.0, 2.0], &s),
        Err(Error::Usage(_))
    ));
}

// ---------------------------------------------------------------- sampling and identities

#[test]
fn internal_drop_profile_has_flat_top() {
    let sol = build(&spec(CompositeKind::InternalDrop, 0.2, 2.0, 0.5, 0.8)).unwrap();
    let p = PotentialParams::new(2, 3, 0.01).unwrap();
    let prof = sample_profile(&sol, &p, 4001, true).unwrap();
    let s = c(&sol, "s");
    for i in 0..prof.len() {
        if (prof.x[i] + s).abs() > 10.0 * p.eps {
            assert!((prof.h1[i] + prof.h[i] - 0.8).abs() <= 1e-12 || prof.x[i] < -s);
        }
    }
    assert!(!prof.resolution_warning);
}

#[test]
fn lens_profile_at_center() {
    let sol = build(&spec(CompositeKind::Lens, 0.2, 2.0, 0.4, 0.2)).unwrap();
    let p = PotentialParams::new(2, 3, 0.01).unwrap();
    let prof = sample_profile(&sol, &p, 3201, true).unwrap();
    let n = prof.len() - 1;
    assert_eq!(prof.x[n], 0.0);
    assert_relative_eq!(prof.h[n], 0.2, epsilon = 1e-14);
    assert_relative_eq!(prof.h1[n], 0.4 - 0.2 / 1.2, epsilon = 1e-14);
    assert!(prof.h1.iter().chain(&prof.h).all(|v| *v > 0.0));
}

#[test]
fn lens_mass_converges_at_second_order() {
    // Zero end slopes make the trapezoid rule superconvergent here, so each
    // halving must shrink the increment by at least the second-order factor.
    let sol = build(&spec(CompositeKind::Lens, 0.2, 2.0, 0.4, 0.2)).unwrap();
    let p = PotentialParams::new(2, 3, 0.01).unwrap();
    let m: Vec<f64> = [201, 401, 801, 1601, 3201]
        .iter()
        .map(|&n| sample_profile(&sol, &p, n, true).unwrap().mass(Layer::H))
        .collect();
    for w in m.windows(3) {
        let ratio = (w[0] - w[1]).abs() / (w[1] - w[2]).abs();
        assert!(ratio >= 3.0, "ratio {ratio} for masses {m:?}");
    }
}

#[test]
fn coarse_mollified_grid_sets_warning() {
    let sol = build(&spec(CompositeKind::Lens, 0.2, 2.0, 0.4, 0.2)).unwrap();
    let p = PotentialParams::new(2, 3, 0.01).unwrap();
    assert!(
        sample_profile(&sol, &p, 101, true)
            .unwrap()
            .resolution_warning
    );
    assert!(
        !sample_profile(&sol, &p, 101, false)
            .unwrap()
            .resolution_warning
    );
}

#[test]
fn profile_csv_round_trip() {
    let sol = build(&spec(CompositeKind::ZigZag, 0.2, 2.0, 0.3, 0.45)).unwrap();
    let p = PotentialParams::new(2, 3, 0.01).unwrap();
    let prof = sample_profile(&sol, &p, 501, false).unwrap();
    let back = Profile::from_csv(&prof.to_csv()).unwrap();
    assert_eq!(back.x, prof.x);
    assert_eq!(back.h1, prof.h1);
    assert_eq!(back.h, prof.h);
}

#[test]
fn lens_pressure_identities() {
    let sol = build(&spec(CompositeKind::Lens, 0.2, 2.0, 0.4, 0.2)).unwrap();
    let p = PotentialParams::new(2, 3, 0.01).unwrap();
    let rel = lambda_relation_check(&sol, &p).unwrap();
    assert!(rel.boundary_residual.unwrap().abs() < 10.0 * p.eps);
    let (e1, _) = rel.average_errors();
    assert!(e1.unwrap() < 0.10, "{rel:?}");
}

#[test]
fn drop_pressure_identity_is_partial() {
    let sol = build(&spec(CompositeKind::HDrop, 0.2, 2.0, 0.3, 0.2)).unwrap();
    let p = PotentialParams::new(2, 3, 0.01).unwrap();
    let rel = lambda_relation_check(&sol, &p).unwrap();
    assert!(rel.boundary_residual.is_none());
    assert!(rel.average_errors().1.is_none());
}

// ---------------------------------------------------------------- chains

#[test]
fn chain_parsing() {
    let z = parse_chain("(1-0)").unwrap();
    assert_eq!(z.blocks.len(), 2);
    assert_eq!(
        (z.blocks[0].digit, z.blocks[0].orientation),
        (1, BlockOrientation::Inverted)
    );
    assert_eq!(
        (z.blocks[1].digit, z.blocks[1].orientation),
        (0, BlockOrientation::Standard)
    );
    assert_eq!(parse_chain("(2-0-13)").unwrap().blocks.len(), 4);
    match parse_chain("(4)") {
        Err(Error::Parse { pos, .. }) => assert_eq!(pos, 1),
        other => panic!("{other:?}"),
    }
    for bad in ["", "()", "(1", "1-0)", "(1-0))", "(1x)"] {
        assert!(
            matches!(parse_chain(bad), Err(Error::Parse { .. })),
            "{bad}"
        );
    }
    assert_eq!(parse_chain("(1-0+0-)").unwrap().to_string(), "(1-0+0-)");
}

#[test]
fn chain_recognition() {
    let k = |t: &str| chain_composite(&parse_chain(t).unwrap());
    assert_eq!(k("(1-0)"), Some((CompositeKind::ZigZag, false)));
    assert_eq!(k("(0-1)"), Some((CompositeKind::ZigZag, true)));
    assert_eq!(k("(0)"), Some((CompositeKind::Lens, true)));
    assert_eq!(k("(1-0+0-)"), Some((CompositeKind::LensOnZigZag, false)));
    assert_eq!(
        k("(2-0-13)"),
        Some((CompositeKind::TwoSideSessileZigZag, false))
    );
    assert_eq!(k("(2-0-11-02)"), None);
}

#[test]
fn single_lens_chain_is_the_mirrored_lens() {
    let p = PotentialParams::new(2, 3, 0.01).unwrap();
    let chain = parse_chain("(0)").unwrap();
    let heights = ChainHeights::Uniform {
        h1_m: 0.4,
        h_m: 0.2,
    };
    let prof = assemble_chain(&chain, &p, 0.2, 2.0, &heights, 801, false).unwrap();
    let sol = build(&spec(CompositeKind::Lens, 0.2, 2.0, 0.4, 0.2)).unwrap();
    let direct = sample_profile(&sol, &p, 801, false).unwrap();
    for i in 0..801 {
        assert_relative_eq!(prof.h[i], direct.h[800 - i], epsilon = 1e-12);
        assert_relative_eq!(prof.h1[i], direct.h1[800 - i], epsilon = 1e-12);
    }
    assert_relative_eq!(prof.h[0], 0.2, epsilon = 1e-14);
}

fn assert_symmetric(prof: &Profile) {
    let n = prof.len();
    for i in 0..n {
        assert!((prof.h[i] - prof.h[n - 1 - i]).abs() <= 1e-10);
        assert!((prof.h1[i] - prof.h1[n - 1 - i]).abs() <= 1e-10);
    }
}

#[test]
fn symmetric_chains_give_symmetric_profiles() {
    let p = PotentialParams::new(2, 3, 0.005).unwrap();
    let h = ChainHeights::Uniform {
        h1_m: 0.1,
        h_m: 0.1,
    };
    let prof = assemble_chain(
        &parse_chain("(2-0-02)").unwrap(),
        &p,
        1.2,
        2.0,
        &h,
        6401,
        true,
    )
    .unwrap();
    assert_symmetric(&prof);
    let p = PotentialParams::new(2, 3, 0.01).unwrap();
    let h = ChainHeights::Uniform {
        h1_m: 0.3,
        h_m: 0.45,
    };
    let prof = assemble_chain(
        &parse_chain("(2-0-11-02)").unwrap(),
        &p,
        0.2,
        12.0,
        &h,
        2400,
        true,
    )
    .unwrap();
    assert_symmetric(&prof);
    assert_eq!(prof.len(), 2400);
}

#[test]
fn generic_chain_concatenates_blocks() {
    let p = PotentialParams::new(2, 3, 0.01).unwrap();
    let chain = parse_chain("(32)").unwrap();
    let h = ChainHeights::PerBlock(vec![(0.3, 0.2), (0.25, 0.2)]);
    let prof = assemble_chain(&chain, &p, 0.2, 4.0, &h, 2001, false).unwrap();
    // An h-drop centered at -L and a lower-layer drop centered mid-domain.
    assert_relative_eq!(prof.h[0], 0.2, epsilon = 1e-14);
    let h1_peak = prof.h1.iter().cloned().fold(0.0, f64::max);
    assert_relative_eq!(h1_peak, 0.25, epsilon = 1e-3);
}

#[test]
fn overfull_chain_is_a_layout_error() {
    let p = PotentialParams::new(2, 3, 0.01).unwrap();
    let h = ChainHeights::Uniform {
        h1_m: 0.5,
        h_m: 0.5,
    };
    let err = assemble_chain(
        &parse_chain("(3232)").unwrap(),
        &p,
        0.2,
        1.0,
        &h,
        101,
        false,
    )
    .unwrap_err();
    match err {
        Error::Layout(msg) => assert!(msg.contains("widths")),
        other => panic!("{other:?}"),
    }
}

// ---------------------------------------------------------------- properties

fn interior(kind: CompositeKind, seed: u64) -> CompositeSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_interior_spec(kind, &mut rng, 100_000).expect("interior spec")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn interior_specs_are_well_formed(kind_idx in 0usize..12, seed in any::<u64>()) {
        let kind = CompositeKind::ALL[kind_idx];
        let spec = interior(kind, seed);
        let sol = build(&spec).unwrap();
        let x = sol.cl_positions();
        prop_assert!(x.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(x.iter().all(|v| -spec.length < *v && *v < 0.0));
        prop_assert!(sol.continuity_defect() <= 1e-10);
        for l in [sol.lambda1_0, sol.lambda2_0].into_iter().flatten() {
            let one_cl_zero = matches!(kind, CompositeKind::Lens | CompositeKind::InternalDrop) && l == 0.0;
            prop_assert!(l > 0.0 || one_cl_zero);
        }
        let inv = build(&spec.inverted(true)).unwrap();
        for i in 0..=50 {
            let xi = -spec.length * i as f64 / 50.0;
            let mirror = -spec.length - xi;
            prop_assert!((inv.eval(Layer::H, xi) - sol.eval(Layer::H, mirror)).abs() <= 1e-12);
            prop_assert!((inv.eval(Layer::H1, xi) - sol.eval(Layer::H1, mirror)).abs() <= 1e-12);
        }
    }

    #[test]
    fn zigzag_pressure_ratio(seed in any::<u64>()) {
        let sol = build(&interior(CompositeKind::ZigZag, seed)).unwrap();
        let ratio = sol.lambda2_0.unwrap() / sol.lambda1_0.unwrap();
        prop_assert!((ratio - sol.spec.hbar()).abs() <= 1e-12 * ratio);
    }

    #[test]
    fn two_side_orderings_hold_for_all_ratios(log_hb in (0.05f64).ln()..(20f64).ln(), sigma in 0.1f64..10.0) {
        let a = 0.3;
        let b = a * log_hb.exp();
        let base = spec(CompositeKind::TwoSideSessileZigZag, sigma, 1e3, a, b);
        let (lo, hi) = two_side_shift_range(&base);
        let sol = build_unchecked(&base.with_shift(0.5 * (lo + hi))).unwrap();
        let (s, s1, s2, s3) = (c(&sol, "s"), c(&sol, "s1"), c(&sol, "s2"), c(&sol, "s3"));
        prop_assert!(s < s1 && s1 < s2 && s2 < s3);
        let hb = b / a;
        if (hb - 1.0).abs() > 1e-3 && (hb - sigma - 1.0).abs() > 1e-3 {
            let o = SessileOracle::new(sigma, PHI, a, b);
            let (l1, l2) = (o.l1, o.l2);
            let (x_c, x_c1, xt_c, xt_c1) = (c(&sol, "x_c"), c(&sol, "x_c1"), c(&sol, "xt_c"), c(&sol, "xt_c1"));
            let lhs1 = (l1 - l2) / (2.0 * sigma) * ((s2 + x_c1).powi(2) - (s1 + x_c1).powi(2));
            let rhs1 = a - l2 / (2.0 * (sigma + 1.0)) * (s2 + xt_c1).powi(2);
            prop_assert!((lhs1 - rhs1).abs() <= 1e-10 * (1.0 + lhs1.abs()));
            let lhs2 = (l2 - (sigma + 1.0) * l1) / (2.0 * sigma) * ((s1 + x_c).powi(2) - (s2 + x_c).powi(2));
            let rhs2 = b - l1 / 2.0 * (s1 + xt_c).powi(2);
            prop_assert!((lhs2 - rhs2).abs() <= 1e-10 * (1.0 + lhs2.abs()));
            let k = (2.0 * sigma * PHI).sqrt();
            let left = (k * (1.0 - 1.0 / (sigma + 1.0).sqrt()) + sigma * o.c5) / (l1 - l2);
            let right = (k * ((sigma + 1.0).sqrt() - 1.0) - sigma * o.c3) / (l2 - (sigma + 1.0) * l1);
            prop_assert!((left - right).abs() <= 1e-10 * (1.0 + left.abs()));
        }
    }

    #[test]
    fn maxima_round_trip(kind_idx in 0usize..12, sigma in 0.1f64..10.0, a in 0.05f64..1.0, log_hb in -2.0f64..2.0) {
        let kind = CompositeKind::ALL[kind_idx];
        let b = a * log_hb.exp();
        let (m1, m) = maxima_from_params(kind, sigma, a, b);
        let (a2, b2) = params_from_maxima(kind, sigma, m1, m).unwrap();
        prop_assert!((a2 - a).abs() <= 1e-9 * a && (b2 - b).abs() <= 1e-9 * b);
    }

    #[test]
    fn chain_format_round_trip(blocks in proptest::collection::vec((0u8..4, 0u8..3), 1..8)) {
        let mut text = String::from("(");
        for (d, o) in &blocks {
            text.push(char::from(b'0' + d));
            match o { 1 => text.push('-'), 2 => text.push('+'), _ => {} }
        }
        text.push(')');
        let chain = parse_chain(&text).unwrap();
        prop_assert_eq!(chain.to_string(), text);
        prop_assert!(chain.mirrored().mirrored().same_shape(&chain));
    }

    #[test]
    fn margins_are_continuous(kind_idx in 0usize..12, seed in any::<u64>()) {
        let kind = CompositeKind::ALL[kind_idx];
        let spec = interior(kind, seed);
        let mut nudged = spec;
        nudged.length *= 1.0 + 1e-9;
        let r0 = existence_report(&spec).unwrap();
        let r1 = existence_report(&nudged).unwrap();
        for (a, b) in r0.constraints.iter().zip(&r1.constraints) {
            prop_assert_eq!(&a.id, &b.id);
            prop_assert!((a.margin - b.margin).abs() <= 1e-6 * (1.0 + a.margin.abs()));
        }
    }
}
