//! Configuration-driven experiments.
//!
//! An [`ExperimentConfig`] names one experiment kind plus its parameters; [`run`]
//! executes it, writes CSV artifacts under `out/<name>/` and returns a
//! [`Report`] of asserted checks. A manifest lists several configs for [`suite`].
//! The config schema is documented in `docs/config.md`.

mod config;
mod kinds;
mod report;

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::partition::Beta;

pub use config::{ExperimentConfig, FieldSource, Fixture, Kind, LawKind};
pub use kinds::hand_fixture;
pub use report::{Check, Relation, Report, SuiteItem, SuiteReport};

/// Settings shared by every experiment of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    /// Artifact root.
    pub out: PathBuf,
    /// Worker threads; `None` uses the ambient pool.
    pub workers: Option<usize>,
    /// Overrides every config's `beta`.
    pub beta: Option<Beta>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            out: PathBuf::from("out"),
            workers: None,
            beta: None,
        }
    }
}

/// Largest number of lattice sites any one table may hold.
pub const SITE_GUARD: u64 = 60_000_000;

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::Config {
            field: "workers".into(),
            message: "must be positive".into(),
        }),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::param(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn effective(config: &ExperimentConfig, opts: &RunOptions) -> ExperimentConfig {
    let mut c = config.clone();
    if let Some(b) = opts.beta {
        c.beta = b;
    }
    c
}

/// Run one experiment, writing artifacts and `report.toml` to `out/<name>/`.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<Report> {
    config.validate()?;
    let config = effective(config, opts);
    with_workers(opts.workers, || run_inner(&config, &opts.out))?
}

fn run_inner(config: &ExperimentConfig, out: &Path) -> Result<Report> {
    let start = Instant::now();
    let dir = out.join(config.name());
    let outcome = kinds::execute(config, &dir)?;
    let report = Report {
        name: config.name(),
        pass: outcome.checks.iter().all(|c| c.pass),
        seconds: start.elapsed().as_secs_f64(),
        checks: outcome.checks,
        values: outcome.values,
        artifacts: outcome.artifacts.iter().map(|p| p.display().to_string()).collect(),
        config: config.clone(),
    };
    report.write(dir.join("report.toml"))?;
    Ok(report)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    /// Config files, relative to the manifest.
    #[serde(default)]
    configs: Vec<PathBuf>,
    /// Inline configs.
    #[serde(default)]
    experiment: Vec<ExperimentConfig>,
}

/// Parse a manifest: `configs = ["a.toml", …]` and/or `[[experiment]]` tables.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ExperimentConfig>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let m: Manifest = toml::from_str(&text).map_err(|e| config::toml_error(&text, &e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for c in &m.configs {
        let p = base.join(c);
        out.push(ExperimentConfig::from_file(&p).map_err(|e| match e {
            Error::Config { field, message } => Error::Config {
                field,
                message: format!("{message} in {}", p.display()),
            },
            other => other,
        })?);
    }
    for c in m.experiment {
        c.validate()?;
        out.push(c);
    }
    Ok(out)
}

/// Run every config, in parallel, and aggregate. Failures of single items,
/// including runtime errors, are recorded per item; only an invalid manifest
/// is an error.
pub fn suite(configs: &[ExperimentConfig], opts: &RunOptions) -> Result<SuiteReport> {
    let mut seen = HashSet::new();
    for c in configs {
        c.validate()?;
        if !seen.insert(c.name()) {
            return Err(Error::Config {
                field: "name".into(),
                message: format!("`{}` appears twice in the manifest", c.name()),
            });
        }
    }
    let start = Instant::now();
    let items: Vec<SuiteItem> = with_workers(opts.workers, || {
        configs
            .par_iter()
            .map(|c| {
                let c = effective(c, opts);
                match run_inner(&c, &opts.out) {
                    Ok(r) => SuiteItem {
                        name: r.name.clone(),
                        pass: r.pass,
                        error: None,
                        report: Some(r),
                    },
                    Err(e) => SuiteItem {
                        name: c.name(),
                        pass: false,
                        error: Some(e.to_string()),
                        report: None,
                    },
                }
            })
            .collect()
    })?;
    let report = SuiteReport {
        pass: items.iter().all(|i| i.pass),
        seconds: start.elapsed().as_secs_f64(),
        items,
    };
    report.write(opts.out.join("suite.toml"))?;
    Ok(report)
}
