//! `construct`: leading-order composite solution, profile and constraint report.

use std::fmt::Write;

use bilayer_core::composites::{existence_report, sample_profile, two_side_shift_range};
use bilayer_core::simulator::SimParams;
use bilayer_core::{build, CompositeKind, CompositeSpec, PotentialParams};

use crate::args::ConstructArgs;
use crate::output::{parse_pair, plot_script, CmdError, CmdResult, OutDir, EXIT_CONSTRAINT};

pub fn potential(nl: &str, eps: f64) -> Result<PotentialParams, CmdError> {
    let (n, l) = parse_pair::<u32>(nl, "--nl")?;
    Ok(PotentialParams::new(n, l, eps)?)
}

fn optional(v: Option<f64>) -> String {
    v.map_or_else(|| "undetermined".to_string(), |v| v.to_string())
}

pub fn run(a: &ConstructArgs) -> CmdResult {
    let kind = CompositeKind::parse(&a.kind)?;
    let pot = potential(&a.nl, a.eps)?;
    let mut spec = CompositeSpec::new(kind, a.sigma, a.length, pot.well_depth(), a.h1m, a.hm)
        .inverted(a.inverted);
    if kind == CompositeKind::TwoSideSessileZigZag {
        let shift = a.shift.unwrap_or_else(|| {
            let (lo, hi) = two_side_shift_range(&spec);
            0.5 * (lo + hi)
        });
        spec = spec.with_shift(shift);
    } else if a.shift.is_some() {
        return Err(CmdError::usage(
            "--shift applies only to two_side_sessile_zigzag",
        ));
    }
    let out = OutDir::create(&a.common.out)?;
    let report = existence_report(&spec)?;
    out.write("constraints.txt", &report.to_key_value())?;
    if !report.all_satisfied() {
        let violated: Vec<&str> = report.violated().map(|c| c.id.as_str()).collect();
        let mut summary = format!(
            "kind={}\nstatus=constraint_violation\nviolated={}\n",
            kind.name(),
            violated.join(",")
        );
        summary.push_str(&report.to_key_value());
        out.write("summary.txt", &summary)?;
        return Err(CmdError {
            code: EXIT_CONSTRAINT,
            message: format!(
                "{} does not exist for these parameters; violated: {}\n{}",
                kind.name(),
                violated.join(", "),
                report.to_key_value()
            ),
        });
    }
    let sol = build(&spec)?;
    let nodes = a
        .nodes
        .unwrap_or_else(|| SimParams::resolved_nodes(a.length, a.eps).max(201));
    let profile = sample_profile(&sol, &pot, nodes, !a.no_mollify)?;
    out.write("profile.csv", &profile.to_csv())?;

    let mut s = String::new();
    let _ = writeln!(s, "kind={}", kind.name());
    let _ = writeln!(s, "status=ok");
    if let Some(id) = kind.solution_id() {
        let _ = writeln!(s, "solution_id={id}");
    }
    let _ = writeln!(s, "sigma={}", spec.sigma);
    let _ = writeln!(s, "L={}", spec.length);
    let _ = writeln!(s, "nl={}", a.nl);
    let _ = writeln!(s, "well_depth={}", spec.well_depth);
    let _ = writeln!(s, "eps={}", pot.eps);
    let _ = writeln!(s, "h1_m={}", spec.h1_m);
    let _ = writeln!(s, "h_m={}", spec.h_m);
    let _ = writeln!(s, "hbar={}", spec.hbar());
    if let Some(shift) = spec.shift {
        let _ = writeln!(s, "shift={shift}");
    }
    let _ = writeln!(s, "inverted={}", spec.inverted);
    let _ = writeln!(s, "lambda1_0={}", optional(sol.lambda1_0));
    let _ = writeln!(s, "lambda2_0={}", optional(sol.lambda2_0));
    let _ = writeln!(s, "h1_max={}", sol.maxima.0);
    let _ = writeln!(s, "h_max={}", sol.maxima.1);
    let _ = writeln!(s, "cl_count={}", sol.cls.len());
    for (i, cl) in sol.cls.iter().enumerate() {
        let _ = writeln!(
            s,
            "cl_{}={},{:?},{:?}",
            i + 1,
            cl.position,
            cl.cl_type,
            cl.orientation
        );
    }
    for (name, value) in &sol.constants {
        let _ = writeln!(s, "const_{name}={value}");
    }
    for flag in &sol.flags {
        let _ = writeln!(s, "flag={flag:?}");
    }
    let _ = writeln!(s, "continuity_defect={}", sol.continuity_defect());
    let _ = writeln!(s, "nodes={nodes}");
    let _ = writeln!(s, "mollified={}", !a.no_mollify);
    let _ = writeln!(s, "resolution_warning={}", profile.resolution_warning);
    out.write("summary.txt", &s)?;
    if a.common.emit_plotscript {
        out.write(
            "plot.py",
            &plot_script(kind.name(), &[("profile.csv", "x", &["h1", "h"])]),
        )?;
    }
    print!("{s}");
    Ok(())
}
