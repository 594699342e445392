//! Command-line definitions and the preset < config < command-line merge.

use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::presets::Preset;

#[derive(Debug, Parser)]
#[command(
    name = "bilayer-lab",
    version,
    about = "Composite solutions, existence diagrams and simulations of two-layer thin films"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a leading-order composite solution and sample its profile.
    #[command(args_override_self = true)]
    Construct(ConstructArgs),
    /// Sample existence diagrams in the (h_max, h1_max) plane.
    #[command(args_override_self = true)]
    Diagram(DiagramArgs),
    /// Integrate the two-layer thin-film system from a composite, chain or file.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Run the verification suites.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Parameter file: JSON object or `key=value` lines; command-line flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write plot.py referencing the CSV outputs.
    #[arg(long)]
    pub emit_plotscript: bool,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Composite kind, e.g. lens, zigzag, h1_drop.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub sigma: f64,
    /// Interval length.
    #[arg(long = "L")]
    pub length: f64,
    /// Lower-layer height parameter (unused by kinds that do not need it).
    #[arg(long, default_value_t = 0.0)]
    pub h1m: f64,
    /// Upper-layer height parameter (unused by kinds that do not need it).
    #[arg(long, default_value_t = 0.0)]
    pub hm: f64,
    /// Potential exponents `n,l`.
    #[arg(long, default_value = "2,3")]
    pub nl: String,
    /// Shift of the two-side sessile zig-zag (default: midpoint of the admissible range).
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    /// Mirror the solution about the interval center.
    #[arg(long)]
    pub inverted: bool,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    /// Profile grid nodes (default resolves contact lines).
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Sample the leading-order profile without inner contact-line layers.
    #[arg(long)]
    pub no_mollify: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DiagramArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long = "L")]
    pub length: f64,
    #[arg(long, default_value = "2,3")]
    pub nl: String,
    /// Samples per axis.
    #[arg(long, default_value_t = 200)]
    pub res: usize,
    /// `lo,hi` window for h_max (default `[0, 2.5 L sqrt(|phi(1)|/2)]`).
    #[arg(long)]
    pub h_max_range: Option<String>,
    /// `lo,hi` window for h1_max.
    #[arg(long)]
    pub h1_max_range: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Initial data: `kind:NAME`, `chain:EXPR` or `file:PATH`.
    #[arg(long)]
    pub init: Option<String>,
    /// Scenario preset; explicit flags and config values override it.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Interval length (taken from the file for `file:` initial data).
    #[arg(long = "L")]
    pub length: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long, default_value = "2,3")]
    pub nl: String,
    #[arg(long)]
    pub h1m: Option<f64>,
    #[arg(long)]
    pub hm: Option<f64>,
    /// Shift of the two-side sessile zig-zag.
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    #[arg(long)]
    pub inverted: bool,
    /// Grid nodes (default resolves contact lines; taken from the file for `file:`).
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Viscosity ratio.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Initial time step.
    #[arg(long, default_value_t = 1e-6)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub dt_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub dt_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    /// Diagnostics cadence in accepted steps.
    #[arg(long, default_value_t = 100)]
    pub output_every: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub newton_tol: f64,
    #[arg(long, default_value_t = 12)]
    pub newton_max_iter: usize,
    /// Hard cap on accepted steps.
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Write a snapshot every this many outputs (0: initial and final only).
    #[arg(long, default_value_t = 0)]
    pub snapshot_every: usize,
    /// Amplitude of a mass-neutral antisymmetric seed added to the initial data.
    #[arg(long, default_value_t = 0.0)]
    pub perturb: f64,
    /// Sup-norm drift below which the run counts as stationary (default 5 eps).
    #[arg(long)]
    pub drift_tol: Option<f64>,
    /// Accept steps that raise the energy.
    #[arg(long)]
    pub no_energy_guard: bool,
    /// Use the leading-order initial profile without inner contact-line layers.
    #[arg(long)]
    pub no_mollify: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracle,
    Identities,
    SimulatorFast,
    Diagram,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Parameter samples per composite kind for the oracle suite.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

/// Failure before any command runs.
#[derive(Debug)]
pub enum ArgError {
    /// Help or version output; exit 0.
    Display(String),
    Usage(String),
}

/// Parses `argv` after merging preset and config values in front of the
/// explicit arguments, so that later (explicit) occurrences override them.
pub fn parse(argv: Vec<String>) -> Result<Cli, ArgError> {
    let mut command = Cli::command();
    let Some(sub_pos) = argv
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|p| p + 1)
    else {
        return clap_parse(argv);
    };
    let sub_name = argv[sub_pos].clone();
    let Some(sub) = command.find_subcommand_mut(&sub_name) else {
        return clap_parse(argv);
    };
    let rest = &argv[sub_pos + 1..];
    let mut injected = Vec::new();
    if let Some(name) = option_value(rest, "preset") {
        let preset =
            Preset::from_str(&name, true).map_err(|e| ArgError::Usage(format!("--preset: {e}")))?;
        injected.extend(pairs_to_tokens(sub, preset.values())?);
    }
    if let Some(path) = option_value(rest, "config") {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| ArgError::Usage(format!("cannot read config {path}: {e}")))?;
        let pairs = crate::config::parse_config(&text).map_err(ArgError::Usage)?;
        injected.extend(pairs_to_tokens(sub, pairs)?);
    }
    let mut merged = argv[..=sub_pos].to_vec();
    merged.extend(injected);
    merged.extend(rest.iter().cloned());
    clap_parse(merged)
}

fn clap_parse(argv: Vec<String>) -> Result<Cli, ArgError> {
    Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            ArgError::Display(e.to_string())
        }
        _ => ArgError::Usage(e.to_string()),
    })
}

/// Last value given for `--name` as `--name v` or `--name=v`.
fn option_value(args: &[String], name: &str) -> Option<String> {
    let flag = format!("--{name}");
    let prefix = format!("--{name}=");
    let mut found = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--" {
            break;
        }
        if *a == flag {
            found = args.get(i + 1).cloned();
        } else if let Some(v) = a.strip_prefix(&prefix) {
            found = Some(v.to_string());
        }
    }
    found
}

/// Turns `(key, value)` pairs into flag tokens of `sub`; keys may use `_` or
/// `-`. Boolean flags take `true`/`false`.
fn pairs_to_tokens(
    sub: &clap::Command,
    pairs: Vec<(String, String)>,
) -> Result<Vec<String>, ArgError> {
    let mut tokens = Vec::new();
    for (key, value) in pairs {
        let long = key.replace('_', "-");
        if matches!(long.as_str(), "config" | "preset" | "help" | "version") {
            return Err(ArgError::Usage(format!(
                "key `{key}` is not allowed in a config file"
            )));
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(long.as_str()))
            .ok_or_else(|| {
                ArgError::Usage(format!(
                    "unknown config key `{key}` for `{}`",
                    sub.get_name()
                ))
            })?;
        if arg.get_action().takes_values() {
            tokens.push(format!("--{long}={value}"));
        } else {
            match value.as_str() {
                "true" => tokens.push(format!("--{long}")),
                "false" => {}
                _ => {
                    return Err(ArgError::Usage(format!(
                        "config key `{key}` expects true or false, got `{value}`"
                    )))
                }
            }
        }
    }
    Ok(tokens)
}
