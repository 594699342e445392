//! Fully implicit finite-difference integrator for the two-layer thin-film
//! gradient flow with no-flux boundaries.

mod banded;
mod diagnostics;
mod scheme;

use std::fmt;

pub use banded::{BandLu, BandMatrix};
pub use diagnostics::{
    classify, detect_contact_lines, diagnostics, snapshot_csv, stationary_residual,
    stationary_residual_excluding, symmetry_metric, trajectory_csv, Classification, DetectedCl,
    Diagnostics, Motion, TRAJECTORY_HEADER,
};
pub use scheme::{energy, masses, mobility, pressures, residual, residual_jacobian, BAND};

use crate::composites::Profile;
use crate::error::{Error, Result};
use crate::potential::PotentialParams;

/// Grid nodes per unit length per `1/eps` needed to resolve contact lines.
pub const NODES_PER_EPS: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub sigma: f64,
    /// Viscosity ratio.
    pub mu: f64,
    pub potential: PotentialParams,
    pub length: f64,
    /// Grid nodes on `[-L, 0]`.
    pub nodes: usize,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Sup-norm tolerance of the Newton residual scaled by `dt` (height units),
    /// also accepted as a bound on the Newton update once the residual stagnates.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub t_end: f64,
    /// Diagnostics cadence in accepted steps.
    pub output_every: usize,
    /// Hard cap on accepted steps.
    pub max_steps: usize,
    /// Reject steps that raise the energy by more than this relative amount.
    /// `None` disables the guard.
    pub energy_guard: Option<f64>,
}

impl SimParams {
    /// Defaults: `mu = 1`, exponents (2, 3), `dt` in `[1e-14, 1]` starting at
    /// `1e-6`, Newton tolerance `1e-10`, at most 12 Newton iterations.
    pub fn new(sigma: f64, length: f64, eps: f64, nodes: usize) -> Result<Self> {
        let p = SimParams {
            sigma,
            mu: 1.0,
            potential: PotentialParams::with_eps(eps)?,
            length,
            nodes,
            dt_init: 1e-6,
            dt_min: 1e-14,
            dt_max: 1.0,
            newton_tol: 1e-10,
            newton_max_iter: 12,
            t_end: 1.0,
            output_every: 100,
            max_steps: usize::MAX,
            energy_guard: Some(1e-12),
        };
        p.validate()?;
        Ok(p)
    }

    /// Node count that resolves contact lines for the given length and eps.
    pub fn resolved_nodes(length: f64, eps: f64) -> usize {
        (NODES_PER_EPS * length / eps).ceil() as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.sigma) || !positive(self.mu) || !positive(self.length) {
            return Err(Error::Usage("sigma, mu and L must be positive".into()));
        }
        if self.nodes < 4 {
            return Err(Error::Usage(format!(
                "need at least 4 nodes, got {}",
                self.nodes
            )));
        }
        if !(positive(self.dt_min) && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return Err(Error::Usage(format!(
                "need 0 < dt_min <= dt_init <= dt_max, got {} {} {}",
                self.dt_min, self.dt_init, self.dt_max
            )));
        }
        if !positive(self.newton_tol) || self.newton_max_iter == 0 {
            return Err(Error::Usage(
                "newton_tol and newton_max_iter must be positive".into(),
            ));
        }
        if !(self.t_end >= 0.0) || self.output_every == 0 {
            return Err(Error::Usage(
                "t_end must be non-negative and output_every positive".into(),
            ));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.length / (self.nodes - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nodes {
            0.0
        } else {
            -self.length + i as f64 * self.dx()
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.x(i)).collect()
    }

    /// Set when the grid is too coarse to resolve contact lines.
    pub fn resolution_warning(&self) -> bool {
        ((self.nodes - 1) as f64) < NODES_PER_EPS * self.length / self.potential.eps
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub h1: Vec<f64>,
    pub h: Vec<f64>,
}

impl SimState {
    pub fn len(&self) -> usize {
        self.h1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h1.is_empty()
    }

    pub fn constant(h1: f64, h: f64, params: &SimParams) -> Self {
        SimState {
            t: 0.0,
            h1: vec![h1; params.nodes],
            h: vec![h; params.nodes],
        }
    }

    /// Takes heights from a profile on the simulator grid.
    pub fn from_profile(profile: &Profile, params: &SimParams) -> Result<Self> {
        if profile.len() != params.nodes {
            return Err(Error::Usage(format!(
                "profile has {} nodes, simulator expects {}",
                profile.len(),
                params.nodes
            )));
        }
        let tol = 1e-9 * params.length;
        if profile
            .x
            .iter()
            .enumerate()
            .any(|(i, &x)| (x - params.x(i)).abs() > tol)
        {
            return Err(Error::Usage(
                "profile grid differs from the uniform simulator grid on [-L, 0]".into(),
            ));
        }
        let state = SimState {
            t: 0.0,
            h1: profile.h1.clone(),
            h: profile.h.clone(),
        };
        state.check_positive()?;
        Ok(state)
    }

    pub fn to_profile(&self, params: &SimParams) -> Profile {
        Profile {
            x: params.grid(),
            h1: self.h1.clone(),
            h: self.h.clone(),
            resolution_warning: params.resolution_warning(),
        }
    }

    /// Image under reflection about the interval center.
    pub fn mirrored(&self) -> Self {
        SimState {
            t: self.t,
            h1: self.h1.iter().rev().copied().collect(),
            h: self.h.iter().rev().copied().collect(),
        }
    }

    /// Adds `amplitude * cos(pi (x + L) / L)` to both layers: antisymmetric
    /// about the center, mass-neutral and compatible with no-flux ends.
    /// Seeds symmetry-breaking instabilities of symmetric states.
    pub fn perturbed(&self, amplitude: f64, params: &SimParams) -> Result<Self> {
        let mut out = self.clone();
        for (i, x) in params.grid().into_iter().enumerate() {
            let d = amplitude * (std::f64::consts::PI * (x + params.length) / params.length).cos();
            out.h1[i] += d;
            out.h[i] += d;
        }
        out.check_positive()?;
        Ok(out)
    }

    fn check_positive(&self) -> Result<()> {
        match self
            .h1
            .iter()
            .zip(&self.h)
            .position(|(&a, &b)| !(a > 0.0 && b > 0.0))
        {
            Some(i) => Err(Error::Domain(format!("non-positive height at node {i}"))),
            None => Ok(()),
        }
    }

    fn from_interleaved(t: f64, u: &[f64]) -> Self {
        SimState {
            t,
            h1: u.iter().step_by(2).copied().collect(),
            h: u.iter().skip(1).step_by(2).copied().collect(),
        }
    }

    fn interleaved(&self) -> Vec<f64> {
        self.h1
            .iter()
            .zip(&self.h)
            .flat_map(|(&a, &b)| [a, b])
            .collect()
    }
}

/// Why a step was not accepted; the caller halves `dt`.
#[derive(Debug, Clone, PartialEq)]
pub enum StepRejected {
    NewtonNotConverged { iterations: usize, residual: f64 },
    NonPositive,
    Singular(String),
}

impl fmt::Display for StepRejected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepRejected::NewtonNotConverged {
                iterations,
                residual,
            } => {
                write!(
                    f,
                    "Newton not converged after {iterations} iterations (residual {residual:e})"
                )
            }
            StepRejected::NonPositive => f.write_str("height left the admissible range"),
            StepRejected::Singular(m) => write!(f, "singular Jacobian: {m}"),
        }
    }
}

/// One backward-Euler step by Newton's method. Returns the new state and
/// the number of residual evaluations (1 when the old state is already a root).
pub fn step(
    state: &SimState,
    dt: f64,
    params: &SimParams,
) -> std::result::Result<(SimState, usize), StepRejected> {
    let floor = 1e-3 * params.potential.eps;
    let mut u = state.clone();
    u.t = state.t + dt;
    let mut last = f64::INFINITY;
    for it in 1..=params.newton_max_iter {
        let (r, jac) =
            scheme::scaled_system(&u, state, dt, params).map_err(|_| StepRejected::NonPositive)?;
        last = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !last.is_finite() {
            return Err(StepRejected::NonPositive);
        }
        if last <= params.newton_tol {
            return Ok((u, it));
        }
        let lu = jac
            .factorize()
            .map_err(|e| StepRejected::Singular(e.to_string()))?;
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = lu.solve(&neg);
        let mut x = u.interleaved();
        for (xi, di) in x.iter_mut().zip(&delta) {
            *xi += di;
        }
        if x.iter().any(|&v| !(v > floor)) {
            return Err(StepRejected::NonPositive);
        }
        u = SimState::from_interleaved(u.t, &x);
        // Stiff contact-line fluxes put a roundoff floor on the residual;
        // an update below the tolerance means Newton has stagnated there.
        if delta.iter().fold(0.0f64, |m, v| m.max(v.abs())) <= params.newton_tol {
            return Ok((u, it));
        }
    }
    Err(StepRejected::NewtonNotConverged {
        iterations: params.newton_max_iter,
        residual: last,
    })
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trajectory: Vec<Diagnostics>,
    pub final_state: SimState,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Steps rejected by the energy guard (included in `rejected_steps`).
    pub energy_rejections: usize,
    /// Largest relative mass drift over both layers.
    pub max_mass_drift: f64,
    /// Accepted steps that raised the energy beyond `1e-12` relative.
    pub energy_increases: usize,
    /// Set when the run stopped before `t_end`.
    pub abort_reason: Option<String>,
}

/// Integrates from `initial` to `t_end` with the adaptive rule: grow `dt`
/// by 1.2 after a step converging in at most 5 iterations, halve it after a
/// rejection, abort below `dt_min`. `on_output` sees the state and
/// diagnostics at every output.
pub fn run<F>(params: &SimParams, initial: SimState, mut on_output: F) -> Result<RunOutcome>
where
    F: FnMut(&SimState, &Diagnostics),
{
    params.validate()?;
    if initial.len() != params.nodes {
        return Err(Error::Usage(format!(
            "initial state has {} nodes, expected {}",
            initial.len(),
            params.nodes
        )));
    }
    initial.check_positive()?;
    let (m1_0, m_0) = masses(&initial, params);
    let mut state = initial;
    let mut dt = params.dt_init;
    let mut e_old = energy(&state, params)?;
    let first = diagnostics(&state, params, 0.0, 0, e_old)?;
    on_output(&state, &first);
    let mut out = RunOutcome {
        trajectory: vec![first],
        final_state: state.clone(),
        accepted_steps: 0,
        rejected_steps: 0,
        energy_rejections: 0,
        max_mass_drift: 0.0,
        energy_increases: 0,
        abort_reason: None,
    };
    let t_tol = 1e-12 * params.t_end.max(1.0);
    let mut last_iters = 0;
    while state.t < params.t_end - t_tol {
        if out.accepted_steps >= params.max_steps {
            out.abort_reason = Some(format!("reached max_steps = {}", params.max_steps));
            break;
        }
        let dt_try = dt.min(params.t_end - state.t);
        match step(&state, dt_try, params) {
            Ok((next, iters)) => {
                let e_new = energy(&next, params)?;
                let rise = e_new - e_old;
                if let Some(tol) = params.energy_guard {
                    if rise > tol * e_old.abs() {
                        out.rejected_steps += 1;
                        out.energy_rejections += 1;
                        dt = dt_try / 2.0;
                        if dt < params.dt_min {
                            out.abort_reason = Some(format!(
                                "dt fell below dt_min = {:e} (energy guard)",
                                params.dt_min
                            ));
                            break;
                        }
                        continue;
                    }
                }
                if rise > 1e-12 * e_old.abs() {
                    out.energy_increases += 1;
                }
                state = next;
                e_old = e_new;
                last_iters = iters;
                out.accepted_steps += 1;
                let (m1, m) = masses(&state, params);
                let drift = ((m1 - m1_0).abs() / m1_0).max((m - m_0).abs() / m_0);
                out.max_mass_drift = out.max_mass_drift.max(drift);
                if out.accepted_steps.is_multiple_of(params.output_every) {
                    let d = diagnostics(&state, params, dt_try, iters, e_new)?;
                    on_output(&state, &d);
                    out.trajectory.push(d);
                }
                if iters <= 5 {
                    dt = (dt_try * 1.2).min(params.dt_max);
                }
            }
            Err(reason) => {
                out.rejected_steps += 1;
                dt = dt_try / 2.0;
                if dt < params.dt_min {
                    out.abort_reason = Some(format!(
                        "dt fell below dt_min = {:e}: {reason}",
                        params.dt_min
                    ));
                    break;
                }
            }
        }
    }
    let ends_on_output = out.trajectory.last().is_some_and(|d| d.t == state.t);
    if !ends_on_output {
        let d = diagnostics(&state, params, dt, last_iters, e_old)?;
        on_output(&state, &d);
        out.trajectory.push(d);
    }
    out.final_state = state;
    Ok(out)
}
