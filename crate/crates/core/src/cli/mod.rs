//! Command-line scenarios: TOML config in, hashed CSV/JSONL files out.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{RunKind, ScenarioConfig, ENV_OVERRIDES};
pub use emit::{format_float, write_outputs, Provenance, Table};
pub use run::{run, RunOutput};

use crate::error::{Result, TfdError};
use std::path::{Path, PathBuf};

/// Exit status of a finished run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

pub fn exit_code(err: &TfdError) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

/// Result of [`execute`]: the run, its hash and the files written.
#[derive(Debug, Clone)]
pub struct Execution {
    pub output: RunOutput,
    pub config_hash: String,
    pub files: Vec<PathBuf>,
}

impl Execution {
    pub fn exit_code(&self) -> i32 {
        if self.output.passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

/// Loads the config, applies overrides from `env`, runs `kind` and writes
/// the outputs into `out`. A `seed` given here replaces the config seed.
pub fn execute(
    kind: RunKind,
    config: &Path,
    out: &Path,
    seed: Option<u64>,
    env: impl Fn(&str) -> Option<String>,
) -> Result<Execution> {
    let text = std::fs::read_to_string(config).map_err(|e| TfdError::Io(format!("{}: {e}", config.display())))?;
    let mut cfg = ScenarioConfig::parse(&text).map_err(|e| match e {
        TfdError::Config(m) => TfdError::Config(format!("{}: {m}", config.display())),
        other => other,
    })?;
    cfg.apply_overrides(env)?;
    let seed = seed.unwrap_or(cfg.seed);
    cfg.seed = seed;
    let config_hash = cfg.hash(seed);
    let output = run(kind, &cfg, seed)?;
    let prov = Provenance {
        config_hash: config_hash.clone(),
        kind: kind.name().into(),
        seed,
    };
    let json = serde_json::to_value(&cfg).expect("config serializes");
    let files = write_outputs(out, &prov, &json, &output.tables, &output.checks)?;
    Ok(Execution {
        output,
        config_hash,
        files,
    })
}
