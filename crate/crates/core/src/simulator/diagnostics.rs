//! Run diagnostics: contact-line detection, symmetry metric, stationary
//! residual, state classification and CSV output.

use std::fmt::Write as _;

use super::scheme::{masses, pressures, weight};
use super::{SimParams, SimState};
use crate::blocks::{ClType, Layer};
use crate::composites::Profile;
use crate::error::{Error, Result};
use crate::potential::PotentialParams;

pub const TRAJECTORY_HEADER: &str =
    "t,dt,energy,mass1,mass,min_h1,min_h,newton_iters,symmetry_metric";

/// Contact line found as a crossing of the level `2 eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectedCl {
    pub position: f64,
    pub cl_type: ClType,
}

/// Diagnostics of one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub dt: f64,
    pub energy: f64,
    pub mass1: f64,
    pub mass: f64,
    pub min_h1: f64,
    pub min_h: f64,
    pub newton_iters: usize,
    pub symmetry_metric: f64,
    pub cls: Vec<DetectedCl>,
}

impl Diagnostics {
    pub fn cl_positions(&self) -> Vec<f64> {
        self.cls.iter().map(|c| c.position).collect()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.t,
            self.dt,
            self.energy,
            self.mass1,
            self.mass,
            self.min_h1,
            self.min_h,
            self.newton_iters,
            self.symmetry_metric
        )
    }
}

fn interp(a: f64, b: f64, xa: f64, xb: f64, level: f64) -> f64 {
    xa + (level - a) / (b - a) * (xb - xa)
}

/// Crossings of `2 eps` in either layer, sorted by position. A crossing in
/// `h1` is type I when `h` is thick there and type III otherwise; a crossing
/// in `h` is type II over thick `h1` and type IV otherwise.
pub fn detect_contact_lines(x: &[f64], h1: &[f64], h: &[f64], eps: f64) -> Vec<DetectedCl> {
    let level = 2.0 * eps;
    let mut out = Vec::new();
    for (layer, own, other) in [(Layer::H1, h1, h), (Layer::H, h, h1)] {
        for i in 0..x.len().saturating_sub(1) {
            let (a, b) = (own[i] - level, own[i + 1] - level);
            if a * b < 0.0 || (a == 0.0 && b != 0.0) {
                let position = interp(own[i], own[i + 1], x[i], x[i + 1], level);
                let t = (position - x[i]) / (x[i + 1] - x[i]);
                let thick_other = other[i] + t * (other[i + 1] - other[i]) > level;
                let cl_type = match (layer, thick_other) {
                    (Layer::H1, true) => ClType::I,
                    (Layer::H1, false) => ClType::III,
                    (Layer::H, true) => ClType::II,
                    (Layer::H, false) => ClType::IV,
                };
                out.push(DetectedCl { position, cl_type });
            }
        }
    }
    out.sort_by(|a, b| a.position.total_cmp(&b.position));
    out
}

/// `L2` distance between the state and its reflection about the center.
pub fn symmetry_metric(state: &SimState, params: &SimParams) -> f64 {
    let n = state.len();
    let dx = params.dx();
    (0..n)
        .map(|i| {
            let j = n - 1 - i;
            let (a, b) = (state.h1[i] - state.h1[j], state.h[i] - state.h[j]);
            weight(i, n, dx) * (a * a + b * b)
        })
        .sum::<f64>()
        .sqrt()
}

pub fn diagnostics(
    state: &SimState,
    params: &SimParams,
    dt: f64,
    newton_iters: usize,
    energy: f64,
) -> Result<Diagnostics> {
    let (mass1, mass) = masses(state, params);
    let x = params.grid();
    Ok(Diagnostics {
        t: state.t,
        dt,
        energy,
        mass1,
        mass,
        min_h1: state.h1.iter().copied().fold(f64::INFINITY, f64::min),
        min_h: state.h.iter().copied().fold(f64::INFINITY, f64::min),
        newton_iters,
        symmetry_metric: symmetry_metric(state, params),
        cls: detect_contact_lines(&x, &state.h1, &state.h, params.potential.eps),
    })
}

pub fn trajectory_csv(trajectory: &[Diagnostics]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for d in trajectory {
        out.push_str(&d.csv_row());
        out.push('\n');
    }
    out
}

/// Profile CSV plus the pointwise pressures: `lambda1` from the h-equation
/// and `lambda2` from the h1-equation.
pub fn snapshot_csv(state: &SimState, params: &SimParams) -> Result<String> {
    let (p1, p2) = pressures(state, params)?;
    let mut out = String::from("x,h1,h,lambda1,lambda2\n");
    for i in 0..state.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            params.x(i),
            state.h1[i],
            state.h[i],
            p2[i],
            p1[i]
        );
    }
    Ok(out)
}

/// Sup norm of the discrete stationary equations
/// `sigma h1'' - Pi(h1) + Pi(h) + lambda2 - lambda1` and
/// `sigma h'' + Pi(h1) - (sigma+1) Pi(h) - lambda2 + (sigma+1) lambda1`
/// over nodes farther than `10 eps` from every detected contact line.
pub fn stationary_residual(
    profile: &Profile,
    lambda1: f64,
    lambda2: f64,
    sigma: f64,
    potential: &PotentialParams,
) -> Result<f64> {
    stationary_residual_excluding(
        profile,
        lambda1,
        lambda2,
        sigma,
        potential,
        10.0 * potential.eps,
    )
}

/// As [`stationary_residual`] with an explicit exclusion radius. The
/// disjoining-pressure tail of a contact line decays like `eps / d^2`, so
/// the residual is `O(eps)` only at a fixed distance `d`.
pub fn stationary_residual_excluding(
    profile: &Profile,
    lambda1: f64,
    lambda2: f64,
    sigma: f64,
    potential: &PotentialParams,
    radius: f64,
) -> Result<f64> {
    let n = profile.len();
    if n < 3 {
        return Err(Error::Usage(
            "stationary residual needs at least 3 nodes".into(),
        ));
    }
    let dx = profile.x[1] - profile.x[0];
    let dx2 = dx * dx;
    let eps = potential.eps;
    let cls = detect_contact_lines(&profile.x, &profile.h1, &profile.h, eps);
    let d2 = |u: &[f64], i: usize| {
        let left = if i == 0 { u[1] } else { u[i - 1] };
        let right = if i + 1 == n { u[n - 2] } else { u[i + 1] };
        (left - 2.0 * u[i] + right) / dx2
    };
    let mut worst = 0.0f64;
    for i in 0..n {
        if cls
            .iter()
            .any(|c| (profile.x[i] - c.position).abs() < radius)
        {
            continue;
        }
        let (pi1, pi) = (
            potential.pi_eps(profile.h1[i])?,
            potential.pi_eps(profile.h[i])?,
        );
        let r1 = sigma * d2(&profile.h1, i) - pi1 + pi + lambda2 - lambda1;
        let r2 = sigma * d2(&profile.h, i) + pi1 - (sigma + 1.0) * pi - lambda2
            + (sigma + 1.0) * lambda1;
        worst = worst.max(r1.abs()).max(r2.abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Motion {
    /// Sup-norm change below the drift tolerance.
    Stationary,
    /// Contact lines moved rigidly at this velocity.
    Translating {
        velocity: f64,
    },
    Evolving,
}

/// Shape and motion of a state compared with an earlier one.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub cl_count: usize,
    /// Contact-line types from left to right, e.g. `III,II,I`.
    pub signature: String,
    pub motion: Motion,
    /// Sup-norm change between the two states.
    pub drift: f64,
}

impl Classification {
    pub fn label(&self) -> String {
        let motion = match self.motion {
            Motion::Stationary => "stationary".to_string(),
            Motion::Translating { velocity } => format!("translating(v={velocity:e})"),
            Motion::Evolving => "evolving".to_string(),
        };
        format!(
            "{motion} with {} contact lines [{}]",
            self.cl_count, self.signature
        )
    }
}

fn type_name(t: ClType) -> &'static str {
    match t {
        ClType::I => "I",
        ClType::II => "II",
        ClType::III => "III",
        ClType::IV => "IV",
    }
}

/// Compares `later` with `earlier`: stationary when the sup drift is at most
/// `drift_tol`; translating when the contact-line pattern is unchanged and
/// every line moved by the same displacement (within 10%).
pub fn classify(
    earlier: &SimState,
    later: &SimState,
    params: &SimParams,
    drift_tol: f64,
) -> Classification {
    let x = params.grid();
    let eps = params.potential.eps;
    let (c0, c1) = (
        detect_contact_lines(&x, &earlier.h1, &earlier.h, eps),
        detect_contact_lines(&x, &later.h1, &later.h, eps),
    );
    let drift = earlier
        .h1
        .iter()
        .zip(&later.h1)
        .chain(earlier.h.iter().zip(&later.h))
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let signature = c1
        .iter()
        .map(|c| type_name(c.cl_type))
        .collect::<Vec<_>>()
        .join(",");
    let motion = if drift <= drift_tol {
        Motion::Stationary
    } else {
        let same_pattern = !c0.is_empty()
            && c0.len() == c1.len()
            && c0.iter().zip(&c1).all(|(a, b)| a.cl_type == b.cl_type);
        let shifts: Vec<f64> = c0
            .iter()
            .zip(&c1)
            .map(|(a, b)| b.position - a.position)
            .collect();
        let mean = shifts.iter().sum::<f64>() / shifts.len().max(1) as f64;
        let rigid = same_pattern
            && mean.abs() > 0.0
            && shifts.iter().all(|s| (s - mean).abs() <= 0.1 * mean.abs());
        let elapsed = later.t - earlier.t;
        if rigid && elapsed > 0.0 {
            Motion::Translating {
                velocity: mean / elapsed,
            }
        } else {
            Motion::Evolving
        }
    };
    Classification {
        cl_count: c1.len(),
        signature,
        motion,
        drift,
    }
}
