use std::path::Path;

use super::InterfaceResult;
use crate::cocycle::{direction_target, ScanProfile};
use crate::csv::{self, fmt_real};
use crate::env::WeightField;
use crate::error::{Error, Result};
use crate::stats::{median, wilson_interval};

/// Descriptive statistics of terminal interface directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectionSummary {
    pub replicas: usize,
    pub median: f64,
    /// Wilson interval of `P(ξ* < ½)`, at level `alpha`.
    pub below_half: (f64, f64),
    /// Wilson interval of `P(ξ* <= ½)`, at level `alpha`.
    pub at_or_below_half: (f64, f64),
    /// Directions inside `[ε, 1 − ε]`.
    pub inside: usize,
    /// Largest fraction of replicas sharing one terminal direction.
    pub largest_atom: f64,
}

impl DirectionSummary {
    /// `½` is a median up to Monte Carlo error.
    pub fn median_half_plausible(&self) -> bool {
        self.below_half.0 <= 0.5 && self.at_or_below_half.1 >= 0.5
    }
}

pub fn direction_summary(directions: &[f64], eps: f64, alpha: f64) -> DirectionSummary {
    let n = directions.len();
    let below = directions.iter().filter(|&&d| d < 0.5).count();
    let at_or_below = directions.iter().filter(|&&d| d <= 0.5).count();
    let mut sorted = directions.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = 0;
    let mut run = 0;
    for i in 0..sorted.len() {
        run = if i > 0 && sorted[i] == sorted[i - 1] {
            run + 1
        } else {
            1
        };
        best = best.max(run);
    }
    DirectionSummary {
        replicas: n,
        median: median(directions),
        below_half: wilson_interval(below, n, alpha),
        at_or_below_half: wilson_interval(at_or_below, n, alpha),
        inside: directions.iter().filter(|&&d| d >= eps && d <= 1.0 - eps).count(),
        largest_atom: if n == 0 { 0.0 } else { best as f64 / n as f64 },
    }
}

/// One grid direction of the CDF comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CdfRow {
    pub xi: f64,
    pub empirical: f64,
    /// `e^{β(ω_0 − b1(0; y⁺))}` with `y⁺` the lattice neighbour to the right
    /// of the target in direction `xi`.
    pub busemann: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CdfComparison {
    pub rows: Vec<CdfRow>,
    pub replicas: usize,
    /// Interface steps; the scan radius is one more.
    pub steps: usize,
    /// Simultaneous level of the bands.
    pub alpha: f64,
}

impl CdfComparison {
    pub fn sup_discrepancy(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.empirical - r.busemann).abs())
            .fold(0.0, f64::max)
    }

    /// Grid directions where the formula leaves the band.
    pub fn outside_band(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.busemann < r.lo || r.busemann > r.hi)
            .count()
    }

    pub fn empirical_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].empirical <= w[1].empirical)
    }

    /// Rows `(xi, empirical_cdf, busemann_cdf, ci_lo, ci_hi)`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        csv::write(
            path,
            &["xi", "empirical_cdf", "busemann_cdf", "ci_lo", "ci_hi"],
            self.rows.iter().map(|r| {
                vec![
                    fmt_real(r.xi),
                    fmt_real(r.empirical),
                    fmt_real(r.busemann),
                    fmt_real(r.lo),
                    fmt_real(r.hi),
                ]
            }),
        )
    }
}

/// Directions to scan at radius `steps + 1` so that [`cif_cdf_check`] finds
/// the right limit of every grid direction.
pub fn cdf_scan_directions(grid: &[f64], steps: usize) -> Vec<f64> {
    let r = steps as i64 + 1;
    let mut out: Vec<f64> = grid
        .iter()
        .map(|&xi| (direction_target(xi, r).u + 1) as f64 / r as f64)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Compare the empirical CDF of the interfaces' terminal directions with
/// `e^{β(ω_0 − b1(0; ξ+))}` at each grid direction.
///
/// With `N = steps + 1` and `a = round(ξN)`, the target `y⁺ = (a + 1, N − a − 1)`
/// lies in the `e1` subtree exactly when `φ_steps·e1 <= a`, which happens
/// with probability `Q_{0,y⁺}(X_1 = e1)`. The right limit is therefore taken
/// one lattice step to the right. Bands are Bonferroni-adjusted Wilson
/// intervals with simultaneous level `alpha`.
///
/// `scan` must come from the interfaces' environment, at radius `steps + 1`,
/// and contain the directions of [`cdf_scan_directions`].
pub fn cif_cdf_check(
    field: &WeightField,
    scan: &ScanProfile,
    interfaces: &[InterfaceResult],
    grid: &[f64],
    alpha: f64,
) -> Result<CdfComparison> {
    if scan.env != Some(field.fingerprint()) {
        return Err(Error::Provenance(
            "direction scan and interface replicas come from different environments".into(),
        ));
    }
    let Some(first) = interfaces.first() else {
        return Err(Error::param("no interfaces"));
    };
    if grid.is_empty() {
        return Err(Error::param("empty direction grid"));
    }
    let steps = first.path.len();
    if interfaces.iter().any(|r| r.path.len() != steps) {
        return Err(Error::param("interfaces have different lengths"));
    }
    if scan.root != first.path.start() || interfaces.iter().any(|r| r.path.start() != scan.root) {
        return Err(Error::param("interfaces and scan have different roots"));
    }
    let r = steps as i64 + 1;
    if scan.radius != r {
        return Err(Error::Horizon(format!(
            "scan radius {} does not match {steps} interface steps (need {r})",
            scan.radius
        )));
    }
    let w0 = field.value(scan.root)?;
    let ends: Vec<i64> = interfaces.iter().map(|i| i.path.end().u - scan.root.u).collect();
    let n = ends.len();
    let per = alpha / grid.len() as f64;
    let mut xs = grid.to_vec();
    xs.sort_by(f64::total_cmp);
    let rows = xs
        .iter()
        .map(|&xi| {
            let a = direction_target(xi, r).u;
            let b1 = scan
                .rows
                .iter()
                .find(|row| direction_target(row.0, r).u == a + 1)
                .map(|row| row.1)
                .ok_or_else(|| Error::param(format!("scan has no right limit for direction {xi}")))?;
            let k = ends.iter().filter(|&&u| u <= a).count();
            let (lo, hi) = wilson_interval(k, n, per);
            Ok(CdfRow {
                xi,
                empirical: k as f64 / n as f64,
                busemann: scan.beta.boltzmann(w0 - b1).min(1.0),
                lo,
                hi,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CdfComparison {
        rows,
        replicas: n,
        steps,
        alpha,
    })
}
