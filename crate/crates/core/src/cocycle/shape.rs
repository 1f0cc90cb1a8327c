use std::path::Path;

use rayon::prelude::*;

use crate::csv::{self, fmt_real};
use crate::env::rng::{key2, replica_seed, stream};
use crate::env::{Site, WeightSampler, WeightSpec, Window, ORIGIN};
use crate::error::{Error, Result};
use crate::partition::{p2l_value, p2p_levels, Beta};
use crate::stats::MeanSe;

/// One row of a shape table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapePoint {
    pub t: f64,
    pub n: i64,
    /// Target `(a, n − a)` with `a = round(n t)`.
    pub target: Site,
    /// Mean of `F_{0,target} / n` over replicas.
    pub lambda: MeanSe,
}

/// Monte Carlo estimates of `Λ(t, 1 − t)` on a direction grid.
#[derive(Clone, Debug)]
pub struct ShapeEstimate {
    pub spec: WeightSpec,
    pub beta: Beta,
    pub seed: u64,
    pub t_grid: Vec<f64>,
    pub n_list: Vec<i64>,
    pub replicas: usize,
    /// Row-major in `(t, n)`.
    pub points: Vec<ShapePoint>,
}

/// `round(n t)` clamped to `[0, n]`.
pub fn direction_target(t: f64, n: i64) -> Site {
    let a = ((n as f64) * t).round().clamp(0.0, n as f64) as i64;
    Site::new(a, n - a)
}

/// `Λ̂(t) = n⁻¹ F_{0,(round(nt), n − round(nt))}` averaged over independent
/// environments, for every `t` in `t_grid` and `n` in `n_list`.
///
/// Each replica runs a single streaming sweep up to the largest `n`.
pub fn estimate_shape(
    spec: WeightSpec,
    beta: Beta,
    t_grid: &[f64],
    n_list: &[i64],
    replicas: usize,
    seed: u64,
) -> Result<ShapeEstimate> {
    spec.validate()?;
    if t_grid.is_empty() || n_list.is_empty() || replicas == 0 {
        return Err(Error::param("direction grid, sizes and replicas must be non-empty"));
    }
    if let Some(&t) = t_grid.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::param(format!("directions must lie in (0, 1), got {t}")));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n < 1) {
        return Err(Error::param(format!("sizes must be positive, got {n}")));
    }
    let mut n_sorted = n_list.to_vec();
    n_sorted.sort_unstable();
    n_sorted.dedup();
    let nmax = *n_sorted.last().unwrap();
    let corner = t_grid.iter().fold(ORIGIN, |c, &t| {
        let s = direction_target(t, nmax);
        Site::new(c.u.max(s.u), c.v.max(s.v))
    });
    let region = Window::spanning(ORIGIN, corner)?;
    let replica_fields = deterministic(spec);
    let reps = if replica_fields { 1 } else { replicas };

    // samples[r][ti * len(n) + ni]
    let samples: Vec<Vec<f64>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let w = WeightSampler::new(spec, replica_seed(seed, r))?;
            let profiles = p2p_levels(&w, ORIGIN, region, beta, &n_sorted)?;
            let mut out = Vec::with_capacity(t_grid.len() * n_sorted.len());
            for &t in t_grid {
                for (p, &n) in profiles.iter().zip(&n_sorted) {
                    out.push(p.at(direction_target(t, n)) / n as f64);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(t_grid.len() * n_sorted.len());
    for (ti, &t) in t_grid.iter().enumerate() {
        for (ni, &n) in n_sorted.iter().enumerate() {
            let xs: Vec<f64> = samples.iter().map(|s| s[ti * n_sorted.len() + ni]).collect();
            let mut lambda = MeanSe::of(&xs);
            if replica_fields {
                lambda.se = 0.0;
            }
            points.push(ShapePoint {
                t,
                n,
                target: direction_target(t, n),
                lambda,
            });
        }
    }
    Ok(ShapeEstimate {
        spec,
        beta,
        seed,
        t_grid: t_grid.to_vec(),
        n_list: n_sorted,
        replicas: reps,
        points,
    })
}

fn deterministic(spec: WeightSpec) -> bool {
    spec.is_degenerate()
}

impl ShapeEstimate {
    pub fn largest_n(&self) -> i64 {
        *self.n_list.last().unwrap()
    }

    fn index_of_t(&self, t: f64) -> Result<usize> {
        self.t_grid
            .iter()
            .position(|&s| (s - t).abs() < 1e-9)
            .ok_or_else(|| Error::param(format!("direction {t} is not on the grid")))
    }

    /// Estimate at grid direction `t` and the largest size.
    pub fn lambda(&self, t: f64) -> Result<MeanSe> {
        let ti = self.index_of_t(t)?;
        Ok(self.lambda_at(ti))
    }

    pub fn lambda_at(&self, ti: usize) -> MeanSe {
        let k = self.n_list.len();
        self.points[ti * k + k - 1].lambda
    }

    /// Estimates at `t` for every size, smallest first.
    pub fn trend(&self, t: f64) -> Result<Vec<ShapePoint>> {
        let ti = self.index_of_t(t)?;
        let k = self.n_list.len();
        Ok(self.points[ti * k..(ti + 1) * k].to_vec())
    }

    /// Largest `|Λ̂(t) − Λ̂(1 − t)|` in units of the combined standard error,
    /// over grid pairs that are mirror images.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, &t) in self.t_grid.iter().enumerate() {
            if let Some(j) = self.t_grid.iter().position(|&s| (s - (1.0 - t)).abs() < 1e-9) {
                let (a, b) = (self.lambda_at(i), self.lambda_at(j));
                let se = a.se.hypot(b.se);
                let d = (a.mean - b.mean).abs();
                worst = worst.max(if se > 0.0 {
                    d / se
                } else if d > 1e-12 {
                    f64::INFINITY
                } else {
                    0.0
                });
            }
        }
        worst
    }

    /// Second differences `Λ̂(t_{j−1}) − 2Λ̂(t_j) + Λ̂(t_{j+1})` scaled for
    /// uneven spacing, with their standard errors; concavity means `<= 0`.
    pub fn second_differences(&self) -> Vec<(f64, f64, f64)> {
        let mut idx: Vec<usize> = (0..self.t_grid.len()).collect();
        idx.sort_by(|&a, &b| self.t_grid[a].total_cmp(&self.t_grid[b]));
        idx.windows(3)
            .map(|w| {
                let (t0, t1, t2) = (self.t_grid[w[0]], self.t_grid[w[1]], self.t_grid[w[2]]);
                let (l0, l1, l2) = (self.lambda_at(w[0]), self.lambda_at(w[1]), self.lambda_at(w[2]));
                let a = (t2 - t1) / (t2 - t0);
                let c = (t1 - t0) / (t2 - t0);
                let d = a * l0.mean - l1.mean + c * l2.mean;
                let se = ((a * l0.se).powi(2) + l1.se.powi(2) + (c * l2.se).powi(2)).sqrt();
                (t1, d, se)
            })
            .collect()
    }

    /// Rows `(t, n, lambda_hat, se)`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        csv::write(
            path,
            &["t", "n", "lambda_hat", "se"],
            self.points.iter().map(|p| {
                vec![
                    fmt_real(p.t),
                    p.n.to_string(),
                    fmt_real(p.lambda.mean),
                    fmt_real(p.lambda.se),
                ]
            }),
        )
    }
}

/// `𝔣̂_pl(h) = n⁻¹ F^{β,h}_{0,(n)}` averaged over replicas.
pub fn estimate_point_to_line(
    spec: WeightSpec,
    beta: Beta,
    tilt: [f64; 2],
    n: i64,
    replicas: usize,
    seed: u64,
) -> Result<MeanSe> {
    spec.validate()?;
    if replicas == 0 || n < 1 {
        return Err(Error::param("need a positive size and at least one replica"));
    }
    let reps = if deterministic(spec) { 1 } else { replicas };
    let xs: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let w = WeightSampler::new(spec, replica_seed(seed, r))?;
            Ok(p2l_value(&w, ORIGIN, beta, tilt, n)? / n as f64)
        })
        .collect::<Result<_>>()?;
    let mut m = MeanSe::of(&xs);
    if reps == 1 {
        m.se = 0.0;
    }
    Ok(m)
}

/// `N⁻¹ F_{0,(⌊Ns⌋, N)}` with `N = ⌈scale / s⌉`, i.e. the shape function near
/// the `e2` axis, sampled over replicas.
pub fn estimate_near_axis(
    spec: WeightSpec,
    beta: Beta,
    s: f64,
    scale: f64,
    replicas: usize,
    seed: u64,
) -> Result<MeanSe> {
    spec.validate()?;
    if !(s > 0.0 && s < 1.0) || !(scale >= 1.0) || replicas == 0 {
        return Err(Error::param("need s in (0, 1), scale >= 1 and at least one replica"));
    }
    let big_n = (scale / s).ceil() as i64;
    let target = Site::new(((big_n as f64) * s).floor() as i64, big_n);
    let region = Window::spanning(ORIGIN, target)?;
    let reps = if deterministic(spec) { 1 } else { replicas };
    let xs: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let w = WeightSampler::new(spec, replica_seed(seed, r))?;
            let p = p2p_levels(&w, ORIGIN, region, beta, &[target.level()])?;
            Ok(p[0].at(target) / big_n as f64)
        })
        .collect::<Result<_>>()?;
    Ok(MeanSe::of(&xs))
}

/// Tilt dual to a grid direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualTilt {
    pub t: f64,
    /// `h = −∇Λ̂(t, 1 − t)`.
    pub tilt: [f64; 2],
    /// Standard errors of the two components, treating grid estimates as
    /// independent.
    pub tilt_se: [f64; 2],
    /// `|h·ξ + Λ̂(ξ)|`.
    pub euler_residual: f64,
    /// `𝔣̂_pl(h)` at the shape's largest size.
    pub pl: MeanSe,
}

/// `h = −∇Λ̂` at a grid direction, from a central difference of `λ(t) = Λ̂(t, 1−t)`
/// and the homogeneous extension `∇Λ = (λ + (1−t)λ', λ − tλ')`.
pub fn dual_tilt(shape: &ShapeEstimate, t: f64) -> Result<DualTilt> {
    let mut idx: Vec<usize> = (0..shape.t_grid.len()).collect();
    idx.sort_by(|&a, &b| shape.t_grid[a].total_cmp(&shape.t_grid[b]));
    let pos = idx
        .iter()
        .position(|&i| (shape.t_grid[i] - t).abs() < 1e-9)
        .ok_or_else(|| Error::param(format!("direction {t} is not on the grid")))?;
    if pos == 0 || pos + 1 == idx.len() {
        return Err(Error::param(format!(
            "direction {t} is at the grid boundary; cannot difference without extrapolating"
        )));
    }
    let (lo, mid, hi) = (idx[pos - 1], idx[pos], idx[pos + 1]);
    let (tl, th) = (shape.t_grid[lo], shape.t_grid[hi]);
    let (ll, lm, lh) = (shape.lambda_at(lo), shape.lambda_at(mid), shape.lambda_at(hi));
    let dt = th - tl;
    let slope = (lh.mean - ll.mean) / dt;
    let slope_se = ll.se.hypot(lh.se) / dt;
    let grad = [lm.mean + (1.0 - t) * slope, lm.mean - t * slope];
    let tilt = [-grad[0], -grad[1]];
    let tilt_se = [lm.se.hypot((1.0 - t) * slope_se), lm.se.hypot(t * slope_se)];
    let euler_residual = (tilt[0] * t + tilt[1] * (1.0 - t) + lm.mean).abs();
    let pl_seed = key2(shape.seed, stream::HORIZON, 0x706c, t.to_bits());
    let pl = estimate_point_to_line(shape.spec, shape.beta, tilt, shape.largest_n(), shape.replicas, pl_seed)?;
    Ok(DualTilt {
        t,
        tilt,
        tilt_se,
        euler_residual,
        pl,
    })
}
