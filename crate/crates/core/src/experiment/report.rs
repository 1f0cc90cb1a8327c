use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::ExperimentConfig;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One asserted invariant with its measured value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            measured,
            relation: Relation::AtMost,
            tolerance,
            pass: measured <= tolerance,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            measured,
            relation: Relation::AtLeast,
            tolerance,
            pass: measured >= tolerance,
        }
    }

    /// Signed distance to failure; nonnegative when the check passes.
    pub fn margin(&self) -> f64 {
        match self.relation {
            Relation::AtMost => self.tolerance - self.measured,
            Relation::AtLeast => self.measured - self.tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub pass: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
    /// Descriptive measurements that are reported but not asserted.
    pub values: BTreeMap<String, f64>,
    pub artifacts: Vec<String>,
    pub config: ExperimentConfig,
}

impl Report {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("reports always serialise")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path, &self.to_toml_string())
    }
}

/// Outcome of one manifest entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteItem {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Report>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub pass: bool,
    pub seconds: f64,
    pub items: Vec<SuiteItem>,
}

impl SuiteReport {
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("reports always serialise")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path, &self.to_toml_string())
    }
}

fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
