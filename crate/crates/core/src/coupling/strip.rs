use super::StepLaw;
use crate::env::{Site, SiteWeights};
use crate::error::{Error, Result};
use crate::partition::Beta;

/// Forward transitions of the tilted point-to-line Busemann increments with
/// paths confined to a strip around the ray `root + k(t, 1 − t)`.
///
/// On level `root.level() + k` the strip holds `u − root.u` in
/// `[round(tk) − w, round(tk) + w] ∩ [0, k]`. Confinement keeps the one-step
/// recursion, so recovery holds exactly for the confined model; walks that
/// stay well inside the strip see increments close to the unconfined ones.
#[derive(Clone, Debug)]
pub struct StripLaw {
    root: Site,
    t: f64,
    half_width: i64,
    levels: i64,
    /// Start offset of each level's row in `p`, and its first `u`.
    rows: Vec<(usize, i64, i64)>,
    p: Vec<f64>,
}

fn row_range(root: Site, t: f64, w: i64, k: i64) -> (i64, i64) {
    let c = (t * k as f64).round() as i64;
    let lo = (c - w).max(0);
    let hi = (c + w).min(k);
    (root.u + lo, root.u + hi)
}

/// Build the law for levels `root.level() ..< root.level() + horizon`, with
/// point-to-line horizon at `root.level() + horizon`.
pub fn strip_busemann_law<W: SiteWeights + ?Sized>(
    weights: &W,
    root: Site,
    beta: Beta,
    tilt: [f64; 2],
    t: f64,
    half_width: i64,
    horizon: i64,
) -> Result<StripLaw> {
    if !(0.0..=1.0).contains(&t) || half_width < 1 || horizon < 1 {
        return Err(Error::param("strip needs t in [0, 1], positive half-width and horizon"));
    }
    let site = |k: i64, u: i64| Site::new(u, root.level() + k - u);
    // free energies on the level above, indexed by u − lo
    let (mut lo_next, hi_next) = row_range(root, t, half_width, horizon);
    let mut f_next = vec![0.0; (hi_next - lo_next + 1) as usize];
    let mut rows_rev: Vec<(i64, Vec<f64>)> = Vec::with_capacity(horizon as usize);
    for k in (0..horizon).rev() {
        let (lo, hi) = row_range(root, t, half_width, k);
        let get = |u: i64, f: &[f64], lo_n: i64| -> f64 {
            let i = u - lo_n;
            if i < 0 || i >= f.len() as i64 {
                f64::NEG_INFINITY
            } else {
                f[i as usize]
            }
        };
        let mut f = Vec::with_capacity((hi - lo + 1) as usize);
        let mut p = Vec::with_capacity((hi - lo + 1) as usize);
        for u in lo..=hi {
            let w = weights.weight(site(k, u));
            let a = get(u + 1, &f_next, lo_next) + tilt[0];
            let b = get(u, &f_next, lo_next) + tilt[1];
            let m = beta.combine(a, b);
            f.push(w + m);
            p.push(if beta.is_infinite() {
                if a >= b {
                    1.0
                } else {
                    0.0
                }
            } else if m == f64::NEG_INFINITY {
                0.5
            } else {
                (beta.value() * (a - m)).exp().clamp(0.0, 1.0)
            });
        }
        rows_rev.push((lo, p));
        f_next = f;
        lo_next = lo;
    }
    let mut rows = Vec::with_capacity(rows_rev.len());
    let mut flat = Vec::new();
    for (lo, p) in rows_rev.into_iter().rev() {
        rows.push((flat.len(), lo, lo + p.len() as i64 - 1));
        flat.extend(p);
    }
    Ok(StripLaw {
        root,
        t,
        half_width,
        levels: horizon,
        rows,
        p: flat,
    })
}

impl StripLaw {
    pub fn root(&self) -> Site {
        self.root
    }

    pub fn direction(&self) -> f64 {
        self.t
    }

    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    pub fn levels(&self) -> i64 {
        self.levels
    }
}

impl StepLaw for StripLaw {
    fn p(&self, y: Site) -> Option<f64> {
        let k = y.level() - self.root.level();
        if k < 0 || k >= self.levels {
            return None;
        }
        let (off, lo, hi) = self.rows[k as usize];
        if y.u < lo || y.u > hi {
            return None;
        }
        Some(self.p[off + (y.u - lo) as usize])
    }
}
