// Expected literals may coincide with named constants.
#![allow(clippy::approx_constant)]

use proptest::prelude::*;

use super::*;

const PHI: f64 = 1.0 / 6.0;

fn cfg(sigma: f64) -> DiagramConfig {
    DiagramConfig::new(sigma, 2.0, PHI)
}

fn member(id: u8, h: f64, h1: f64, c: &DiagramConfig) -> bool {
    ed_membership(CompositeKind::from_solution_id(id).unwrap(), h, h1, c)
}

/// Distance from `p` to the nearest boundary point of `id`.
fn distance_to_boundary(bs: &[EdBoundary], id: u8, p: (f64, f64)) -> f64 {
    bs.iter()
        .filter(|b| b.solution_id == id)
        .flat_map(|b| b.points.iter())
        .map(|q| (q.0 - p.0).hypot(q.1 - p.1))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn symmetric_point_anchors() {
    let (i, ii) = symmetric_points(&cfg(0.2));
    let oracle_i = 2.0 * (PHI / (2.0 * 1.2)).sqrt();
    let oracle_ii = 2.0 * (PHI / 2.0).sqrt();
    assert_eq!(i.0, 0.0);
    assert_eq!(ii.1, 0.0);
    assert!(
        (i.1 - oracle_i).abs() < 1e-12 && (i.1 - 0.527046).abs() < 1e-6,
        "{i:?}"
    );
    assert!(
        (ii.0 - oracle_ii).abs() < 1e-12 && (ii.0 - 0.577350).abs() < 1e-6,
        "{ii:?}"
    );
}

#[test]
fn symmetric_points_scale_with_length_and_vanish_for_large_sigma() {
    let (i1, ii1) = symmetric_points(&cfg(0.7));
    let (i2, ii2) = symmetric_points(&DiagramConfig::new(0.7, 4.0, PHI));
    assert!((i2.1 - 2.0 * i1.1).abs() < 1e-14 && (ii2.0 - 2.0 * ii1.0).abs() < 1e-14);
    let (far, _) = symmetric_points(&cfg(1e12));
    assert!(far.1 < 1e-6);
}

#[test]
fn reflection_maps_point_one_to_point_two() {
    for sigma in [0.2, 1.0, 9.0] {
        let (i, ii) = symmetric_points(&cfg(sigma));
        let r = reflect(sigma, i.0, i.1);
        assert!(
            (r.0 - ii.0).abs() < 1e-12 && r.1.abs() < 1e-12,
            "sigma {sigma}: {r:?}"
        );
    }
}

#[test]
fn lens_stripe_membership() {
    let c = cfg(0.2);
    assert!(member(1, 0.2, 0.4, &c));
    let edge = 2.0 * (1.2 * PHI / 0.4).sqrt();
    assert!((edge - 1.414214).abs() < 1e-6);
    assert!(member(1, edge * 0.999, 1.2, &c));
    assert!(!member(1, edge * 1.001, 1.2, &c));
    // hbar = sigma + 1 edge of the stripe.
    assert!(member(1, 1.19 * 0.5, 0.5, &c));
    assert!(!member(1, 1.21 * 0.5, 0.5, &c));
}

#[test]
fn zigzag_peak_line_point_is_excluded() {
    let c = cfg(0.2);
    let s = 1.2f64.sqrt();
    let lt = 2.0 * (0.2 * PHI / 2.0).sqrt();
    assert!((lt - 0.258199).abs() < 1e-6);
    // First pentagon line intersected with hbar = sqrt(sigma+1).
    let h1 = lt / ((s + 1.0) * 2.0 * s);
    let v = (s * h1, h1);
    assert!(
        (v.0 - 0.061610).abs() < 1e-6 && (v.1 - 0.056241).abs() < 1e-6,
        "{v:?}"
    );
    assert!(!member(5, v.0, v.1, &c));
    assert!(member(5, 1.01 * v.0, 1.01 * v.1, &c));
    assert!(!member(5, 0.99 * v.0, 0.99 * v.1, &c));
}

#[test]
fn pentagon_line_constant() {
    let c = cfg(0.2);
    let bs = ed_boundaries(&c).unwrap();
    let s = 1.2f64.sqrt();
    let on_line3 = bs
        .iter()
        .filter(|b| b.solution_id == 5)
        .find(|b| {
            b.points
                .iter()
                .all(|p| (s * (p.0 - p.1) - 0.258199).abs() < 1e-6)
        })
        .expect("third pentagon line is an active boundary");
    assert!(on_line3.points.len() > 100);
}

#[test]
fn two_drops_hypotenuse() {
    let c = cfg(0.2);
    let (i, ii) = symmetric_points(&c);
    let mid = (0.5 * ii.0, 0.5 * i.1);
    assert!(!member(8, mid.0, mid.1, &c));
    assert!(member(8, 0.9 * mid.0, 0.9 * mid.1, &c));
    assert!(!member(8, 1.1 * mid.0, 1.1 * mid.1, &c));
}

#[test]
fn reflection_symmetry_holds_for_all_regimes() {
    for sigma in [0.2, 1.0, 9.0] {
        let r = reflect_check(&cfg(sigma).with_resolution(60)).unwrap();
        assert!(r.compared > 500, "{r:?}");
        assert_eq!(r.violations, 0, "{r:?}");
    }
}

#[test]
fn reflect_check_rejects_low_resolution() {
    assert!(reflect_check(&cfg(1.0).with_resolution(20)).is_err());
}

#[test]
fn every_membership_flip_lies_on_a_boundary() {
    for sigma in [0.2, 1.0, 9.0] {
        let c = cfg(sigma).with_resolution(60);
        let bs = ed_boundaries(&c).unwrap();
        let (hs, h1s) = (c.axis(c.h_max_range), c.axis(c.h1_max_range));
        let cell = c.cell();
        for j in 0..h1s.len() - 1 {
            for i in 0..hs.len() - 1 {
                let m0 = membership_mask(hs[i], h1s[j], &c);
                for (ii, jj) in [(i + 1, j), (i, j + 1)] {
                    let flips = m0 ^ membership_mask(hs[ii], h1s[jj], &c);
                    for id in SOLUTION_IDS.filter(|id| flips & (1 << (id - 1)) != 0) {
                        let mid = (0.5 * (hs[i] + hs[ii]), 0.5 * (h1s[j] + h1s[jj]));
                        let d = distance_to_boundary(&bs, id, mid);
                        assert!(
                            d <= 1.5 * cell.0.hypot(cell.1),
                            "sigma {sigma} id {id} flip at {mid:?}, d {d}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn boundary_points_separate_inside_from_outside() {
    let c = cfg(0.2);
    let probe = 1e-4;
    for b in ed_boundaries(&c).unwrap() {
        let n = b.points.len();
        for k in [n / 4, n / 2, 3 * n / 4] {
            let (p, q) = (b.points[k.saturating_sub(1)], b.points[(k + 1).min(n - 1)]);
            let norm = (q.0 - p.0).hypot(q.1 - p.1);
            let (nx, ny) = (-(q.1 - p.1) / norm * probe, (q.0 - p.0) / norm * probe);
            let x = b.points[k];
            assert_ne!(
                member(b.solution_id, x.0 + nx, x.1 + ny, &c),
                member(b.solution_id, x.0 - nx, x.1 - ny, &c),
                "id {} segment {} at {x:?}",
                b.solution_id,
                b.segment
            );
            assert!(x.0 > 0.0 && x.1 > 0.0);
        }
    }
}

#[test]
fn two_side_curve_meets_axes_at_half_the_symmetric_points() {
    // The parametric curve tends to L sqrt(|phi|/2) / (2 sqrt(sigma+1)) as
    // hbar -> 0 and to half of point II as hbar -> infinity.
    for sigma in [0.2, 1.0, 9.0] {
        let c = cfg(sigma);
        let bs = ed_boundaries(&c).unwrap();
        let (i, ii) = symmetric_points(&c);
        let tol = 0.02 * ii.0;
        assert!(
            distance_to_boundary(&bs, 9, (0.0, 0.5 * i.1)) < tol,
            "sigma {sigma}"
        );
        assert!(
            distance_to_boundary(&bs, 9, (0.5 * ii.0, 0.0)) < tol,
            "sigma {sigma}"
        );
        assert!(member(9, 0.2 * ii.0, 0.2 * i.1, &c));
        assert!(!member(9, 0.6 * ii.0, 0.6 * i.1, &c));
    }
}

#[test]
fn unit_sigma_joint_points() {
    let c = cfg(1.0);
    let bs = ed_boundaries(&c).unwrap();
    let t = 2.0 * (PHI / 2.0).sqrt();
    let tol = 5e-3;
    // Boundaries of 2, 8 and 11 meet on hbar = 1 at the hypotenuse of 8.
    let p = (t / (1.0 + 2f64.sqrt()), t / (1.0 + 2f64.sqrt()));
    for id in [2, 8, 11] {
        assert!(distance_to_boundary(&bs, id, p) < tol, "id {id}");
    }
    // Boundaries of 2, 4 and 5 meet at (T, T).
    for id in [2, 4, 5] {
        assert!(distance_to_boundary(&bs, id, (t, t)) < tol, "id {id}");
    }
}

#[test]
fn csv_layouts() {
    let c = cfg(0.2).with_resolution(4);
    let csv = membership_csv(&c).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("h_max,h1_max,solution_id,member"));
    assert_eq!(lines.count(), 4 * 4 * 11);
    let bs = ed_boundaries(&c).unwrap();
    let bcsv = boundaries_csv(&bs);
    assert!(bcsv.starts_with("solution_id,segment,idx,h_max,h1_max\n"));
    assert_eq!(
        bcsv.lines().count(),
        1 + bs.iter().map(|b| b.points.len()).sum::<usize>()
    );
}

#[test]
fn invalid_config_is_rejected() {
    let mut c = cfg(0.2);
    c.h_max_range = (1.0, 0.5);
    assert!(ed_boundaries(&c).is_err());
    assert!(membership_csv(&cfg(0.2).with_resolution(1)).is_err());
}

/// Membership is constant within `rel` of `(h, h1)` along both axes.
fn stable(id: u8, h: f64, h1: f64, c: &DiagramConfig, rel: f64) -> bool {
    let m = member(id, h, h1, c);
    [
        (1.0 + rel, 1.0),
        (1.0 - rel, 1.0),
        (1.0, 1.0 + rel),
        (1.0, 1.0 - rel),
    ]
    .iter()
    .all(|(a, b)| member(id, a * h, b * h1, c) == m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_is_an_involution_fixing_the_axis_line(
        sigma in 0.05f64..20.0, h in 0.0f64..3.0, h1 in 0.0f64..3.0
    ) {
        let (a, b) = reflect(sigma, h, h1);
        let (x, y) = reflect(sigma, a, b);
        prop_assert!((x - h).abs() < 1e-12 && (y - h1).abs() < 1e-12);
        let s = (sigma + 1.0).sqrt();
        let fixed = reflect(sigma, s * h1, h1);
        prop_assert!((fixed.0 - s * h1).abs() < 1e-12 && (fixed.1 - h1).abs() < 1e-12);
    }

    #[test]
    fn pentagon_side_lines_swap_under_reflection(sigma in 0.05f64..20.0, h in 0.0f64..3.0) {
        // Second pentagon line maps onto the third one.
        let (l, phi) = (2.0, PHI);
        let lt = l * (sigma * phi / 2.0).sqrt();
        let s = (sigma + 1.0).sqrt();
        let p = (h, (lt + h) / (sigma + 1.0));
        let r = reflect(sigma, p.0, p.1);
        prop_assert!((s * (r.0 - r.1) - lt).abs() < 1e-10 * (1.0 + h));
    }

    #[test]
    fn membership_scales_with_length_and_well_depth(
        id in 1u8..=11, sigma in 0.1f64..5.0, h in 0.02f64..1.0, h1 in 0.02f64..1.0,
        alpha in 0.5f64..3.0, beta in 0.3f64..3.0
    ) {
        let base = DiagramConfig::new(sigma, 2.0, PHI);
        prop_assume!(stable(id, h, h1, &base, 1e-3));
        let longer = DiagramConfig::new(sigma, 2.0 * alpha, PHI);
        prop_assert_eq!(member(id, h, h1, &base), member(id, alpha * h, alpha * h1, &longer));
        let deeper = DiagramConfig::new(sigma, 2.0, PHI * beta);
        let k = beta.sqrt();
        prop_assert_eq!(member(id, h, h1, &base), member(id, k * h, k * h1, &deeper));
    }
}
