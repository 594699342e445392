//! `diagram`: existence-domain membership, boundaries, symmetric points and
//! the reflection symmetry report.

use std::fmt::Write;

use bilayer_core::diagrams::{
    boundaries_csv, ed_boundaries, membership_csv, reflect_check, symmetric_points,
};
use bilayer_core::DiagramConfig;

use crate::args::DiagramArgs;
use crate::construct::potential;
use crate::output::{parse_pair, CmdResult, OutDir};

const PLOT: &str = r#"import csv
import matplotlib.pyplot as plt

with open("boundaries.csv") as f:
    rows = list(csv.DictReader(f))
fig, ax = plt.subplots(figsize=(7, 7))
curves = {}
for r in rows:
    curves.setdefault((r["solution_id"], r["segment"]), []).append((float(r["h_max"]), float(r["h1_max"])))
for (sid, seg), pts in curves.items():
    ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"{sid}" if seg == "0" else None)
with open("symmetric_points.csv") as f:
    for r in csv.DictReader(f):
        ax.plot(float(r["h_max"]), float(r["h1_max"]), "ko")
ax.set_xlabel("h_max")
ax.set_ylabel("h1_max")
ax.legend(title="solution")
fig.savefig("diagram.png", dpi=150)
"#;

/// Coarsest diagram the reflection scan accepts.
const MIN_REFLECT_RESOLUTION: usize = 50;

pub fn run(a: &DiagramArgs) -> CmdResult {
    let pot = potential(&a.nl, 0.01)?;
    let mut cfg = DiagramConfig::new(a.sigma, a.length, pot.well_depth()).with_resolution(a.res);
    if let Some(r) = &a.h_max_range {
        cfg.h_max_range = parse_pair(r, "--h-max-range")?;
    }
    if let Some(r) = &a.h1_max_range {
        cfg.h1_max_range = parse_pair(r, "--h1-max-range")?;
    }
    cfg.validate()?;
    let out = OutDir::create(&a.common.out)?;
    out.write("membership.csv", &membership_csv(&cfg)?)?;
    let boundaries = ed_boundaries(&cfg)?;
    out.write("boundaries.csv", &boundaries_csv(&boundaries))?;
    let (p1, p2) = symmetric_points(&cfg);
    out.write(
        "symmetric_points.csv",
        &format!(
            "point,h_max,h1_max\nI,{},{}\nII,{},{}\n",
            p1.0, p1.1, p2.0, p2.1
        ),
    )?;
    let pentagon = cfg.length * (cfg.sigma * cfg.well_depth / 2.0).sqrt();
    let mut report = String::new();
    let _ = writeln!(report, "symmetric_point_I_h1_max={}", p1.1);
    let _ = writeln!(report, "symmetric_point_II_h_max={}", p2.0);
    let _ = writeln!(report, "pentagon_constant={pentagon}");
    let mut ids: Vec<u8> = boundaries.iter().map(|b| b.solution_id).collect();
    ids.dedup();
    let _ = writeln!(
        report,
        "boundary_solutions={}",
        ids.iter().map(u8::to_string).collect::<Vec<_>>().join(",")
    );
    if cfg.resolution >= MIN_REFLECT_RESOLUTION {
        report.push_str(&reflect_check(&cfg)?.to_key_value());
    } else {
        let _ = writeln!(
            report,
            "reflection=skipped (resolution below {MIN_REFLECT_RESOLUTION})"
        );
    }
    out.write("symmetry_report.txt", &report)?;
    if a.common.emit_plotscript {
        out.write("plot.py", PLOT)?;
    }
    print!("{report}");
    Ok(())
}
