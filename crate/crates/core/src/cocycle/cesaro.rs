use rand::Rng;
use rayon::prelude::*;

use super::{busemann_from_p2l, BusemannField, Provenance};
use crate::env::rng::{replica_rng, replica_seed, stream};
use crate::env::{generate_field, Grid, Site, WeightSpec, Window};
use crate::error::{Error, Result};
use crate::partition::Beta;
use crate::stats::MeanSe;

/// Grand means of `B_N(w0, w0 + e_i)` at the window origin `w0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CesaroReport {
    pub mean: [MeanSe; 2],
    /// `−h·e_i`.
    pub target: [f64; 2],
}

impl CesaroReport {
    pub fn z_scores(&self) -> [f64; 2] {
        [
            self.mean[0].z_score(self.target[0]),
            self.mean[1].z_score(self.target[1]),
        ]
    }
}

/// Average of `B_N^{β,h}` over `samples` independent environments with
/// `N` uniform on `{1, …, n}`.
///
/// Sample `k` uses the environment `replica_seed(seed, k)` and draws its
/// horizon from its own stream, so results do not depend on scheduling.
#[allow(clippy::too_many_arguments)]
pub fn cesaro_busemann(
    spec: WeightSpec,
    window: Window,
    beta: Beta,
    tilt: [f64; 2],
    n: i64,
    samples: usize,
    seed: u64,
    pl_residual: Option<f64>,
) -> Result<(BusemannField, CesaroReport)> {
    spec.validate()?;
    if samples == 0 {
        return Err(Error::param("need at least one sample"));
    }
    if n < 1 {
        return Err(Error::param(format!("horizon bound must be positive, got {n}")));
    }
    let o = window.origin;
    let side = (window.width.max(window.height) + 1).max((n - o.level() + 1).max(2) as usize);
    let fw = Window::new(o, side, side)?;

    let per: Vec<(Vec<f64>, Vec<f64>, [f64; 2])> = (0..samples as u64)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let horizon = replica_rng(seed, stream::HORIZON, k).random_range(1..=n);
            let field = generate_field(spec, replica_seed(seed, k), fw)?;
            let b = busemann_from_p2l(&field, beta, tilt, horizon)?;
            let b1 = window.sites().map(|y| b.b1(y)).collect();
            let b2 = window.sites().map(|y| b.b2(y)).collect();
            Ok((b1, b2, [b.b1(o), b.b2(o)]))
        })
        .collect::<Result<_>>()?;

    let m = samples as f64;
    let mut s1 = vec![0.0; window.len()];
    let mut s2 = vec![0.0; window.len()];
    for (b1, b2, _) in &per {
        for (acc, x) in s1.iter_mut().zip(b1) {
            *acc += x;
        }
        for (acc, x) in s2.iter_mut().zip(b2) {
            *acc += x;
        }
    }
    let sites: Vec<Site> = window.sites().collect();
    let mut g1 = Grid::filled(window, 0.0);
    let mut g2 = Grid::filled(window, 0.0);
    for (i, &y) in sites.iter().enumerate() {
        g1[y] = s1[i] / m;
        g2[y] = s2[i] / m;
    }
    let at0: Vec<[f64; 2]> = per.iter().map(|p| p.2).collect();
    let report = CesaroReport {
        mean: [
            MeanSe::of(&at0.iter().map(|x| x[0]).collect::<Vec<_>>()),
            MeanSe::of(&at0.iter().map(|x| x[1]).collect::<Vec<_>>()),
        ],
        target: [-tilt[0], -tilt[1]],
    };
    let provenance = Provenance::Cesaro {
        tilt,
        level: n,
        samples,
        pl_residual,
    };
    Ok((BusemannField::from_parts(beta, provenance, 0, g1, g2), report))
}
