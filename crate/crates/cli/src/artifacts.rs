//! Artifact writing: CSV files, the JSON manifest, and the output directory.
//!
//! Nothing here embeds a timestamp, host name, or path, so a command run
//! twice with the same configuration and seed produces byte-identical
//! files.

use redccr::checks::{Bound, CheckReport};
use redccr::config::KeyValues;
use redccr::{Error, Result};
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

/// Schema version stamped into every manifest.
pub const MANIFEST_SCHEMA: u32 = 1;

/// One sub-check as the manifest sees it: either a measured bound or a
/// check that could not run under this configuration, with the reason.
#[derive(Clone, Debug)]
pub enum CheckOutcome {
    Ran(CheckReport),
    Skipped { name: String, reason: String },
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        match self {
            CheckOutcome::Ran(r) => r.line(),
            CheckOutcome::Skipped { name, reason } => format!("SKIP {name}: {reason}"),
        }
    }
}

/// What a subcommand hands back to `main` for reporting and exit-code
/// resolution. Reporting commands record their certificates but never turn
/// them into a nonzero exit.
pub struct CommandOutcome {
    pub command: &'static str,
    pub checks: Vec<CheckOutcome>,
    /// Whether failed checks fail the process.
    pub enforce: bool,
}

impl CommandOutcome {
    pub fn passed(&self) -> bool {
        if !self.enforce {
            return true;
        }
        self.checks.iter().all(|c| match c {
            CheckOutcome::Ran(r) => r.passed,
            CheckOutcome::Skipped { .. } => true,
        })
    }

    /// Failing checks with their measured values, so a consumer never has
    /// to cross-reference the full check list to learn how far off a run was.
    pub fn failures(&self) -> Vec<&CheckReport> {
        self.checks
            .iter()
            .filter_map(|c| match c {
                CheckOutcome::Ran(r) if !r.passed => Some(r),
                _ => None,
            })
            .collect()
    }
}

/// Output directory with a record of everything written into it.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(path: &Path) -> Result<OutDir> {
        fs::create_dir_all(path)
            .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", path.display())))?;
        Ok(OutDir { root: path.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, contents)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn artifacts(&self) -> &[String] {
        &self.written
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}

/// Uniform per-command check table.
pub fn checks_csv(outcomes: &[CheckOutcome]) -> String {
    let mut out = String::from("name,status,observed,threshold,bound,reason\r\n");
    for c in outcomes {
        match c {
            CheckOutcome::Ran(r) => {
                let status = if r.passed { "pass" } else { "fail" };
                out.push_str(&format!(
                    "{},{},{:.12e},{:.12e},{},\r\n",
                    r.name,
                    status,
                    r.observed,
                    r.threshold,
                    r.bound.symbol()
                ));
            }
            CheckOutcome::Skipped { name, reason } => {
                out.push_str(&format!("{name},skipped,,,,\"{reason}\"\r\n"));
            }
        }
    }
    out
}

fn bound_value(b: Bound) -> Value {
    Value::String(b.symbol().to_string())
}

/// The manifest ties together configuration, checks, and artifact names.
/// Keys are serialized in sorted order and floats by their shortest
/// round-trip form, so the bytes are a pure function of the inputs.
pub fn manifest(
    outcome: &CommandOutcome,
    seed: Option<u64>,
    kv: &KeyValues,
    artifacts: &[String],
) -> String {
    let checks: Vec<Value> = outcome
        .checks
        .iter()
        .filter_map(|c| match c {
            CheckOutcome::Ran(r) => Some(json!({
                "name": r.name,
                "observed": r.observed,
                "threshold": r.threshold,
                "bound": bound_value(r.bound),
                "passed": r.passed,
            })),
            CheckOutcome::Skipped { .. } => None,
        })
        .collect();
    let skipped: Vec<Value> = outcome
        .checks
        .iter()
        .filter_map(|c| match c {
            CheckOutcome::Skipped { name, reason } => {
                Some(json!({ "name": name, "reason": reason }))
            }
            CheckOutcome::Ran(_) => None,
        })
        .collect();
    let failures: Vec<Value> = outcome
        .failures()
        .into_iter()
        .map(|r| {
            json!({
                "name": r.name,
                "observed": r.observed,
                "threshold": r.threshold,
                "bound": bound_value(r.bound),
            })
        })
        .collect();
    let config: Value = {
        let mut map = serde_json::Map::new();
        for key in kv.keys() {
            map.insert(key.to_string(), Value::String(kv.get(key).unwrap_or("").to_string()));
        }
        Value::Object(map)
    };
    let doc = json!({
        "schema": MANIFEST_SCHEMA,
        "command": outcome.command,
        "seed": seed,
        "enforced": outcome.enforce,
        "passed": outcome.passed(),
        "checks": checks,
        "skipped": skipped,
        "failures": failures,
        "artifacts": artifacts,
        "config": config,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("manifest serialization is infallible");
    text.push('\n');
    text
}
