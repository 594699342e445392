//! Closed form versus root-solve of the matching system, on specs sampled
//! inside the existence domains.

use rand::Rng;

use super::oracle::{gauss_newton, NewtonOptions};
use super::residual::{closed_form_unknowns, matching_residual, unknown_names};
use super::{build, existence_report, two_side_shift_range, CompositeKind, CompositeSpec};
use crate::error::Result;

/// Relative band around the linear limits `hbar = 1` and `hbar = sigma + 1`
/// (and the flat-bulk critical ratios) excluded from sampling; the matching
/// systems are ill-conditioned there.
pub const LIMIT_BAND: f64 = 0.05;

/// Smallest existence margin accepted for a sampled spec.
pub const MIN_MARGIN: f64 = 1e-3;

/// Smallest gap between consecutive contact lines (and the interval ends),
/// as a fraction of the length, accepted for a sampled spec. A perturbed
/// start must keep the contact-line ordering of the closed form.
pub const MIN_GAP_FRACTION: f64 = 0.05;

/// Outcome of one oracle comparison.
#[derive(Debug, Clone)]
pub struct OracleCheck {
    pub spec: CompositeSpec,
    /// Largest relative deviation over all unknowns; unknowns that vanish in
    /// closed form contribute their absolute deviation.
    pub max_rel_error: f64,
    /// Name of the unknown attaining `max_rel_error`.
    pub worst_unknown: &'static str,
    pub closed_form_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl OracleCheck {
    pub fn passed(&self, rel_tol: f64) -> bool {
        self.converged && self.max_rel_error <= rel_tol
    }
}

/// Solves the matching system from the closed form scaled by `1 + perturbation`
/// and compares the root with the closed form.
pub fn oracle_check(spec: &CompositeSpec, perturbation: f64) -> Result<OracleCheck> {
    let sol = build(spec)?;
    let exact = closed_form_unknowns(&sol)?;
    let f = |x: &[f64]| matching_residual(spec.kind, x, spec);
    let closed_form_residual = f(&exact)?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let start: Vec<f64> = exact.iter().map(|v| v * (1.0 + perturbation)).collect();
    let out = gauss_newton(f, &start, &NewtonOptions::default())?;
    let names = unknown_names(spec.kind);
    let (mut worst, mut worst_name) = (0.0f64, names[0]);
    for (i, (x, y)) in out.x.iter().zip(&exact).enumerate() {
        let err = if *y == 0.0 {
            x.abs()
        } else {
            (x - y).abs() / y.abs()
        };
        if !(err <= worst) {
            worst = err;
            worst_name = names[i];
        }
    }
    Ok(OracleCheck {
        spec: *spec,
        max_rel_error: worst,
        worst_unknown: worst_name,
        closed_form_residual,
        iterations: out.iterations,
        converged: out.converged,
    })
}

fn far_from(value: f64, target: f64) -> bool {
    (value - target).abs() > LIMIT_BAND * target.abs()
}

/// Draws a spec with every existence margin above [`MIN_MARGIN`], contact
/// lines separated by at least [`MIN_GAP_FRACTION`] of the length, and `hbar`
/// outside the [`LIMIT_BAND`] neighborhoods of the kind's limiting ratios.
/// Returns `None` if no such spec was found within `max_tries` draws.
pub fn sample_interior_spec<R: Rng>(
    kind: CompositeKind,
    rng: &mut R,
    max_tries: usize,
) -> Option<CompositeSpec> {
    for _ in 0..max_tries {
        let sigma = 10f64.powf(rng.gen_range(-0.7..0.7));
        let well_depth = rng.gen_range(0.1..0.3);
        let h1_m = rng.gen_range(0.05..1.0);
        let hbar = 10f64.powf(rng.gen_range(-1.0..1.0));
        let h_m = hbar * h1_m;
        let length = 10f64.powf(rng.gen_range(-0.5..1.5));
        let mut critical = vec![1.0, sigma + 1.0];
        if sigma > 1.0 {
            critical.push((sigma + 1.0) / (sigma - 1.0));
            critical.push(sigma - 1.0);
        }
        if !critical.iter().all(|&c| far_from(hbar, c)) {
            continue;
        }
        let mut spec = CompositeSpec::new(kind, sigma, length, well_depth, h1_m, h_m);
        if kind == CompositeKind::TwoSideSessileZigZag {
            let (lo, hi) = two_side_shift_range(&spec);
            if !(lo < hi) {
                continue;
            }
            spec = spec.with_shift(rng.gen_range(lo..hi));
        }
        let Ok(report) = existence_report(&spec) else {
            continue;
        };
        if !report.constraints.iter().all(|c| c.margin > MIN_MARGIN) {
            continue;
        }
        let Ok(sol) = build(&spec) else {
            continue;
        };
        let mut marks = vec![-length];
        marks.extend(sol.cl_positions());
        marks.push(0.0);
        if marks
            .windows(2)
            .all(|w| w[1] - w[0] >= MIN_GAP_FRACTION * length)
        {
            return Some(spec);
        }
    }
    None
}
