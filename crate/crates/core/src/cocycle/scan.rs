use std::path::Path;

use super::shape::direction_target;
use crate::csv::{self, fmt_real};
use crate::env::{Site, SiteWeights, Window, E1, E2};
use crate::error::{Error, Result};
use crate::partition::{p2p_levels, Beta};

const SCAN_TOL: f64 = 1e-12;

/// `b1(y; t) = F_{y,target(t)} − F_{y+e1,target(t)}` across directions.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanProfile {
    pub root: Site,
    pub radius: i64,
    pub beta: Beta,
    /// Environment fingerprint, when the weights report one.
    pub env: Option<u64>,
    /// `(t, b1, jump from the previous direction)`, sorted by `t`.
    pub rows: Vec<(f64, f64, f64)>,
    /// Count of `b1` increases beyond round-off as `t` grows.
    pub violations: usize,
    pub max_jump: f64,
}

impl ScanProfile {
    /// `b1` at grid direction `t`.
    pub fn b1_at(&self, t: f64) -> Option<f64> {
        self.rows.iter().find(|r| (r.0 - t).abs() < 1e-9).map(|r| r.1)
    }

    /// Rows `(t, b1, jump)`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        csv::write(
            path,
            &["t", "b1", "jump"],
            self.rows
                .iter()
                .map(|&(t, b, j)| vec![fmt_real(t), fmt_real(b), fmt_real(j)]),
        )
    }
}

/// Scan `b1(root; t)` with targets `root + (round(Nt), N − round(Nt))`.
///
/// Only two streaming sweeps are needed: from `root` and from `root + e1`.
pub fn direction_scan<W: SiteWeights + ?Sized>(
    weights: &W,
    root: Site,
    beta: Beta,
    t_grid: &[f64],
    radius: i64,
) -> Result<ScanProfile> {
    let mut ts: Vec<f64> = t_grid.to_vec();
    ts.sort_by(f64::total_cmp);
    let targets: Vec<Site> = ts.iter().map(|&t| root + direction_target(t, radius)).collect();
    if let Some(bad) = targets.iter().find(|&&y| !(root + E1 + E2 <= y)) {
        return Err(Error::Ordering(format!(
            "target {bad} leaves no room for both first steps; use directions further from the axes or a larger radius"
        )));
    }
    let region = Window::spanning(root, root + Site::new(radius, radius))?;
    let level = root.level() + radius;
    let from0 = p2p_levels(weights, root, region, beta, &[level])?;
    let from1 = p2p_levels(
        weights,
        root + E1,
        Window::spanning(root + E1, region.corner())?,
        beta,
        &[level],
    )?;
    let mut rows = Vec::with_capacity(ts.len());
    let mut violations = 0;
    let mut max_jump: f64 = 0.0;
    let mut prev: Option<f64> = None;
    for (&t, &y) in ts.iter().zip(&targets) {
        let b = from0[0].at(y) - from1[0].at(y);
        let jump = prev.map_or(0.0, |p| p - b);
        if jump < -SCAN_TOL {
            violations += 1;
        }
        max_jump = max_jump.max(jump.abs());
        rows.push((t, b, jump));
        prev = Some(b);
    }
    Ok(ScanProfile {
        root,
        radius,
        beta,
        env: weights.fingerprint(),
        rows,
        violations,
        max_jump,
    })
}

/// `|b_i(y) at radius N − b_i(y) at radius 2N|` for `i = 1, 2`, direction `t`.
pub fn horizon_doubling<W: SiteWeights + ?Sized>(
    weights: &W,
    y: Site,
    beta: Beta,
    t: f64,
    radius: i64,
) -> Result<[f64; 2]> {
    let at = |n: i64| -> Result<[f64; 2]> {
        let target = y + direction_target(t, n);
        if !(y + E1 + E2 <= target) {
            return Err(Error::Ordering(format!("target {target} too close to the axes")));
        }
        let region = Window::spanning(y, target)?;
        let f0 = p2p_levels(weights, y, region, beta, &[target.level()])?[0].at(target);
        let r1 = Window::spanning(y + E1, target)?;
        let f1 = p2p_levels(weights, y + E1, r1, beta, &[target.level()])?[0].at(target);
        let r2 = Window::spanning(y + E2, target)?;
        let f2 = p2p_levels(weights, y + E2, r2, beta, &[target.level()])?[0].at(target);
        Ok([f0 - f1, f0 - f2])
    };
    let (a, b) = (at(radius)?, at(2 * radius)?);
    Ok([(a[0] - b[0]).abs(), (a[1] - b[1]).abs()])
}
