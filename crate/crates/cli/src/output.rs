//! Exit codes, errors and file output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use bilayer_core::Error;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONSTRAINT: i32 = 2;
pub const EXIT_ABORT: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug)]
pub struct CmdError {
    pub code: i32,
    pub message: String,
}

impl CmdError {
    pub fn usage(message: impl Into<String>) -> Self {
        CmdError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConstraintViolation { .. } => EXIT_CONSTRAINT,
            Error::SolverAbort(_) => EXIT_ABORT,
            _ => EXIT_USAGE,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

pub type CmdResult = Result<(), CmdError>;

/// Writes files into one output directory.
pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self, CmdError> {
        fs::create_dir_all(dir)
            .map_err(|e| CmdError::usage(format!("cannot create {}: {e}", dir.display())))?;
        Ok(OutDir {
            dir: dir.to_path_buf(),
        })
    }

    pub fn write(&self, name: &str, content: &str) -> CmdResult {
        let path = self.dir.join(name);
        fs::write(&path, content)
            .map_err(|e| CmdError::usage(format!("cannot write {}: {e}", path.display())))
    }
}

/// Parses `a,b` into two values.
pub fn parse_pair<T: std::str::FromStr>(text: &str, what: &str) -> Result<(T, T), CmdError> {
    let bad = || {
        CmdError::usage(format!(
            "{what} must be two comma-separated values, got `{text}`"
        ))
    };
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// Python script plotting every listed CSV with matplotlib.
pub fn plot_script(title: &str, csvs: &[(&str, &str, &[&str])]) -> String {
    let mut s = String::from("import csv\nimport matplotlib.pyplot as plt\n\n");
    s.push_str("def load(name):\n    with open(name) as f:\n        rows = list(csv.DictReader(f))\n    return {k: [float(r[k]) for r in rows] for k in rows[0]} if rows else {}\n\n");
    s.push_str(&format!(
        "fig, axes = plt.subplots({}, 1, figsize=(7, {}), squeeze=False)\n",
        csvs.len(),
        3 * csvs.len().max(1)
    ));
    for (i, (file, x, ys)) in csvs.iter().enumerate() {
        s.push_str(&format!("data = load({file:?})\nax = axes[{i}][0]\n"));
        for y in ys.iter() {
            s.push_str(&format!("ax.plot(data[{x:?}], data[{y:?}], label={y:?})\n"));
        }
        s.push_str(&format!(
            "ax.set_xlabel({x:?})\nax.set_title({file:?})\nax.legend()\n"
        ));
    }
    s.push_str(&format!(
        "fig.suptitle({title:?})\nfig.tight_layout()\nfig.savefig(\"plot.png\", dpi=150)\n"
    ));
    s
}
