//! Point-to-point and tilted point-to-line free energies.
//!
//! All tables hold free energies `F = β⁻¹ log Z` (last-passage times at
//! `β = ∞`). Raw partition functions are never formed.

mod checks;
mod oracle;
mod p2l;
mod p2p;
mod stream;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{Grid, Site};
use crate::error::{Error, Result};

pub use checks::{beta_limit_check, comparison_check, BetaLimitReport, BetaLimitRow, ComparisonReport};
pub use oracle::{enumerate_oracle, OracleTarget, ORACLE_MAX_STEPS};
pub use p2l::{p2l_table, TiltedLineTable};
pub use p2p::{p2p_table, Mode, PartitionTable};
pub use stream::{p2l_value, p2p_levels, LevelProfile};

/// Inverse temperature in `(0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Beta(f64);

impl Beta {
    pub const INFINITE: Beta = Beta(f64::INFINITY);
    pub const ONE: Beta = Beta(1.0);

    pub fn new(beta: f64) -> Result<Self> {
        if beta > 0.0 {
            Ok(Beta(beta))
        } else {
            Err(Error::param(format!("beta must be positive, got {beta}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `β⁻¹ log(e^{βa} + e^{βb})`, or `max(a, b)` at `β = ∞`.
    #[inline]
    pub fn combine(self, a: f64, b: f64) -> f64 {
        let m = a.max(b);
        if self.is_infinite() || m == f64::NEG_INFINITY {
            return m;
        }
        let d = (a - b).abs();
        if d.is_infinite() {
            return m;
        }
        m + (-self.0 * d).exp().ln_1p() / self.0
    }

    /// `β⁻¹ log Σ e^{β x_i}` over a slice; `max` at `β = ∞`.
    pub fn combine_all(self, xs: &[f64]) -> f64 {
        let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if self.is_infinite() || m == f64::NEG_INFINITY {
            return m;
        }
        let s: f64 = xs.iter().map(|&x| (self.0 * (x - m)).exp()).sum();
        m + s.ln() / self.0
    }

    /// `e^{β x}`, read as a probability weight; at `β = ∞` this is the
    /// indicator of `x >= 0`.
    #[inline]
    pub fn boltzmann(self, x: f64) -> f64 {
        if self.is_infinite() {
            if x >= 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            (self.0 * x).exp()
        }
    }
}

impl TryFrom<f64> for Beta {
    type Error = Error;
    fn try_from(x: f64) -> Result<Self> {
        Beta::new(x)
    }
}

impl From<Beta> for f64 {
    fn from(b: Beta) -> f64 {
        b.0
    }
}

impl FromStr for Beta {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let x = match s.trim() {
            "inf" | "infinity" | "∞" => f64::INFINITY,
            t => t
                .parse::<f64>()
                .map_err(|_| Error::param(format!("cannot parse beta from `{s}`")))?,
        };
        Beta::new(x)
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// An extended-real free energy; `-∞` means no admissible path.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogValue(pub f64);

impl LogValue {
    pub const NO_PATH: LogValue = LogValue(f64::NEG_INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl From<LogValue> for f64 {
    fn from(v: LogValue) -> f64 {
        v.0
    }
}

/// Natural log of the number of admissible paths with displacement `(a, b)`.
pub fn ln_path_count(a: i64, b: i64) -> f64 {
    if a < 0 || b < 0 {
        return f64::NEG_INFINITY;
    }
    statrs::function::factorial::ln_binomial((a + b) as u64, a as u64)
}

const PAR_LEVEL_MIN: usize = 4096;

/// Fill `grid` level by level; `f` may read any cell not on the level being
/// written. Long levels are computed in parallel.
pub(crate) fn sweep_levels<F>(grid: &mut Grid<f64>, levels: impl Iterator<Item = i64>, f: F)
where
    F: Fn(&Grid<f64>, Site) -> f64 + Sync,
{
    let window = *grid.window();
    let mut buf: Vec<(Site, f64)> = Vec::new();
    for k in levels {
        buf.clear();
        let sites: Vec<Site> = window.level_sites(k).collect();
        if sites.len() >= PAR_LEVEL_MIN {
            let g = &*grid;
            buf.par_extend(sites.par_iter().map(|&s| (s, f(g, s))));
        } else {
            buf.extend(sites.iter().map(|&s| (s, f(grid, s))));
        }
        for &(s, x) in &buf {
            grid[s] = x;
        }
    }
}
