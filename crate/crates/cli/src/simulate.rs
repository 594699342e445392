//! `simulate`: implicit integration from a composite, a chain or a profile
//! file, with trajectory, snapshots and a final classification.

use std::fmt::Write;

use bilayer_core::composites::{
    assemble_chain, parse_chain, sample_profile, two_side_shift_range, ChainHeights,
};
use bilayer_core::simulator::{
    classify, run as integrate, snapshot_csv, trajectory_csv, Diagnostics, Motion, RunOutcome,
};
use bilayer_core::{build, CompositeKind, CompositeSpec, Profile, SimParams, SimState};

use crate::args::SimulateArgs;
use crate::construct::potential;
use crate::output::{plot_script, CmdError, CmdResult, OutDir, EXIT_ABORT};

/// Symmetry-metric growth that marks a symmetry-breaking instability.
const SYMMETRY_GROWTH: f64 = 10.0;

fn required(v: Option<f64>, flag: &str, init: &str) -> Result<f64, CmdError> {
    v.ok_or_else(|| CmdError::usage(format!("--{flag} is required for --init {init}")))
}

/// Initial profile and the `(L, nodes)` it lives on.
fn initial_profile(a: &SimulateArgs, sigma: f64) -> Result<(Profile, f64, usize), CmdError> {
    let init = a
        .init
        .as_deref()
        .ok_or_else(|| CmdError::usage("--init (or --preset) is required"))?;
    let (source, value) = init.split_once(':').ok_or_else(|| {
        CmdError::usage(format!(
            "--init must be kind:NAME, chain:EXPR or file:PATH, got `{init}`"
        ))
    })?;
    let pot = potential(&a.nl, a.eps)?;
    match source {
        "file" => {
            let text = std::fs::read_to_string(value)
                .map_err(|e| CmdError::usage(format!("cannot read {value}: {e}")))?;
            let profile = Profile::from_csv(&text)?;
            let length = a.length.unwrap_or(-profile.x[0]);
            let nodes = a.nodes.unwrap_or(profile.len());
            Ok((profile, length, nodes))
        }
        "kind" | "chain" => {
            let length = required(a.length, "L", init)?;
            let (h1m, hm) = (required(a.h1m, "h1m", init)?, required(a.hm, "hm", init)?);
            let nodes = a
                .nodes
                .unwrap_or_else(|| SimParams::resolved_nodes(length, a.eps));
            let profile = if source == "kind" {
                let kind = CompositeKind::parse(value)?;
                let mut spec = CompositeSpec::new(kind, sigma, length, pot.well_depth(), h1m, hm)
                    .inverted(a.inverted);
                if kind == CompositeKind::TwoSideSessileZigZag {
                    let (lo, hi) = two_side_shift_range(&spec);
                    spec = spec.with_shift(a.shift.unwrap_or(0.5 * (lo + hi)));
                }
                sample_profile(&build(&spec)?, &pot, nodes, !a.no_mollify)?
            } else {
                let chain = parse_chain(value)?;
                let heights = ChainHeights::Uniform { h1_m: h1m, h_m: hm };
                assemble_chain(&chain, &pot, sigma, length, &heights, nodes, !a.no_mollify)?
            };
            Ok((profile, length, nodes))
        }
        other => Err(CmdError::usage(format!(
            "unknown --init source `{other}`; use kind, chain or file"
        ))),
    }
}

fn params(a: &SimulateArgs, sigma: f64, length: f64, nodes: usize) -> Result<SimParams, CmdError> {
    let mut p = SimParams::new(sigma, length, a.eps, nodes)?;
    p.potential = potential(&a.nl, a.eps)?;
    p.mu = a.mu;
    p.dt_init = a.dt;
    p.dt_min = a.dt_min;
    p.dt_max = a.dt_max;
    p.t_end = a.t_end;
    p.output_every = a.output_every;
    p.newton_tol = a.newton_tol;
    p.newton_max_iter = a.newton_max_iter;
    p.max_steps = a.max_steps.unwrap_or(usize::MAX);
    p.energy_guard = if a.no_energy_guard { None } else { Some(1e-12) };
    p.validate()?;
    Ok(p)
}

/// Outcome label of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunClass {
    Stationary,
    Translating,
    Coarsening,
}

impl RunClass {
    pub fn name(self) -> &'static str {
        match self {
            RunClass::Stationary => "stationary",
            RunClass::Translating => "translating",
            RunClass::Coarsening => "coarsening",
        }
    }
}

/// Facts the classification is derived from.
#[derive(Debug, Clone, Copy)]
pub struct RunEvidence {
    pub cls_initial: usize,
    pub cls_final: usize,
    /// Motion from the initial to the final state.
    pub overall: Motion,
    /// Motion over the last output interval.
    pub final_window: Motion,
    /// First positive symmetry metric.
    pub symmetry_baseline: f64,
    pub symmetry_max: f64,
    pub drift_tol: f64,
}

/// Contact-line loss or a symmetry-breaking instability of an initially
/// symmetric state is coarsening. Otherwise the run is stationary or
/// translating if the whole run, or failing that its last output interval,
/// is; a state still changing shape is coarsening.
pub fn classify_run(e: &RunEvidence) -> RunClass {
    let motion_class = |m: Motion| match m {
        Motion::Stationary => Some(RunClass::Stationary),
        Motion::Translating { .. } => Some(RunClass::Translating),
        Motion::Evolving => None,
    };
    if e.cls_final < e.cls_initial {
        return RunClass::Coarsening;
    }
    if let Some(c) = motion_class(e.overall) {
        return c;
    }
    let symmetric_start = e.symmetry_baseline < e.drift_tol;
    if symmetric_start
        && e.symmetry_max >= SYMMETRY_GROWTH * e.symmetry_baseline
        && e.symmetry_baseline > 0.0
    {
        return RunClass::Coarsening;
    }
    motion_class(e.final_window).unwrap_or(RunClass::Coarsening)
}

fn symmetry_stats(trajectory: &[Diagnostics]) -> (f64, f64) {
    let baseline = trajectory
        .iter()
        .map(|d| d.symmetry_metric)
        .find(|&m| m > 0.0)
        .unwrap_or(0.0);
    let max = trajectory
        .iter()
        .map(|d| d.symmetry_metric)
        .fold(0.0, f64::max);
    (baseline, max)
}

fn motion_name(m: Motion) -> String {
    match m {
        Motion::Stationary => "stationary".into(),
        Motion::Translating { velocity } => format!("translating(v={velocity})"),
        Motion::Evolving => "evolving".into(),
    }
}

pub fn run(a: &SimulateArgs) -> CmdResult {
    let sigma = a
        .sigma
        .ok_or_else(|| CmdError::usage("--sigma is required"))?;
    let (profile, length, nodes) = initial_profile(a, sigma)?;
    let p = params(a, sigma, length, nodes)?;
    let mut initial = SimState::from_profile(&profile, &p)?;
    if a.perturb != 0.0 {
        initial = initial.perturbed(a.perturb, &p)?;
    }
    let out = OutDir::create(&a.common.out)?;
    out.write("snapshot_initial.csv", &snapshot_csv(&initial, &p)?)?;

    let mut previous: Option<SimState> = None;
    let mut latest: Option<SimState> = None;
    let mut outputs = 0usize;
    let mut write_error = None;
    let outcome: RunOutcome = integrate(&p, initial.clone(), |state, _| {
        if a.snapshot_every > 0
            && outputs > 0
            && outputs.is_multiple_of(a.snapshot_every)
            && write_error.is_none()
        {
            let name = format!("snapshot_{outputs:06}.csv");
            if let Err(e) = snapshot_csv(state, &p)
                .map_err(CmdError::from)
                .and_then(|csv| out.write(&name, &csv))
            {
                write_error = Some(e);
            }
        }
        outputs += 1;
        previous = latest.replace(state.clone());
    })?;
    if let Some(e) = write_error {
        return Err(e);
    }
    out.write("trajectory.csv", &trajectory_csv(&outcome.trajectory))?;
    out.write(
        "snapshot_final.csv",
        &snapshot_csv(&outcome.final_state, &p)?,
    )?;

    let drift_tol = a.drift_tol.unwrap_or(5.0 * a.eps);
    let last = &outcome.final_state;
    let overall = classify(&initial, last, &p, drift_tol);
    let window = classify(previous.as_ref().unwrap_or(&initial), last, &p, drift_tol);
    let first_cls = outcome.trajectory.first().map_or(0, |d| d.cls.len());
    let (symmetry_baseline, symmetry_max) = symmetry_stats(&outcome.trajectory);
    let evidence = RunEvidence {
        cls_initial: first_cls,
        cls_final: overall.cl_count,
        overall: overall.motion,
        final_window: window.motion,
        symmetry_baseline,
        symmetry_max,
        drift_tol,
    };
    let class = classify_run(&evidence);

    let (e0, e1) = (
        outcome.trajectory.first().map_or(f64::NAN, |d| d.energy),
        outcome.trajectory.last().map_or(f64::NAN, |d| d.energy),
    );
    let mut s = String::new();
    let _ = writeln!(s, "init={}", a.init.as_deref().unwrap_or(""));
    let _ = writeln!(s, "sigma={sigma}");
    let _ = writeln!(s, "L={length}");
    let _ = writeln!(s, "eps={}", a.eps);
    let _ = writeln!(s, "nodes={nodes}");
    let _ = writeln!(s, "resolution_warning={}", p.resolution_warning());
    let _ = writeln!(s, "t_final={}", last.t);
    let _ = writeln!(s, "accepted_steps={}", outcome.accepted_steps);
    let _ = writeln!(s, "rejected_steps={}", outcome.rejected_steps);
    let _ = writeln!(s, "energy_rejections={}", outcome.energy_rejections);
    let _ = writeln!(s, "energy_increases={}", outcome.energy_increases);
    let _ = writeln!(s, "max_mass_drift={}", outcome.max_mass_drift);
    let _ = writeln!(s, "energy_initial={e0}");
    let _ = writeln!(s, "energy_final={e1}");
    let _ = writeln!(s, "cl_count_initial={first_cls}");
    let _ = writeln!(s, "cl_count_final={}", overall.cl_count);
    let _ = writeln!(s, "cl_types_final={}", overall.signature);
    let _ = writeln!(s, "drift_tol={drift_tol}");
    let _ = writeln!(s, "drift_total={}", overall.drift);
    let _ = writeln!(s, "motion_total={}", motion_name(overall.motion));
    let _ = writeln!(s, "drift_final_window={}", window.drift);
    let _ = writeln!(s, "motion_final_window={}", motion_name(window.motion));
    let _ = writeln!(s, "symmetry_baseline={symmetry_baseline}");
    let _ = writeln!(s, "symmetry_max={symmetry_max}");
    let _ = writeln!(
        s,
        "abort_reason={}",
        outcome.abort_reason.as_deref().unwrap_or("none")
    );
    let _ = writeln!(s, "classification={}", class.name());
    out.write("summary.txt", &s)?;
    if a.common.emit_plotscript {
        let script = plot_script(
            "simulation",
            &[
                ("snapshot_initial.csv", "x", &["h1", "h"]),
                ("snapshot_final.csv", "x", &["h1", "h"]),
                ("trajectory.csv", "t", &["energy"]),
            ],
        );
        out.write("plot.py", &script)?;
    }
    print!("{s}");
    match &outcome.abort_reason {
        Some(reason) if reason.starts_with("dt fell below") => Err(CmdError {
            code: EXIT_ABORT,
            message: format!("run aborted: {reason}"),
        }),
        _ => Ok(()),
    }
}
