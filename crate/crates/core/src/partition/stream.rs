//! Level-streaming variants of the recursions that keep one anti-diagonal in
//! memory. Used when only a few levels of a large table are needed.

use super::Beta;
use crate::env::{Site, SiteWeights, Window};
use crate::error::{Error, Result};

/// Free energies on one anti-diagonal level, indexed by `u − u_lo`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelProfile {
    pub level: i64,
    pub u_lo: i64,
    pub values: Vec<f64>,
}

impl LevelProfile {
    pub fn u_hi(&self) -> i64 {
        self.u_lo + self.values.len() as i64 - 1
    }

    /// Value at site `s` on this level; `-∞` outside the stored range.
    pub fn at(&self, s: Site) -> f64 {
        debug_assert_eq!(s.level(), self.level);
        let i = s.u - self.u_lo;
        if i < 0 || i >= self.values.len() as i64 {
            f64::NEG_INFINITY
        } else {
            self.values[i as usize]
        }
    }

    pub fn sites(&self) -> impl Iterator<Item = (Site, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &f)| (Site::new(self.u_lo + i as i64, self.level - self.u_lo - i as i64), f))
    }
}

fn check_bounds<W: SiteWeights + ?Sized>(weights: &W, region: &Window) -> Result<()> {
    match weights.bounds() {
        Some(b) if !b.contains_window(region) => Err(Error::OutOfWindow {
            site: region.corner(),
            window: b.to_string(),
        }),
        _ => Ok(()),
    }
}

/// `F_{anchor, y}` for every `y` in `region` on each requested level.
///
/// `region` must contain `anchor`; paths are confined to `region`, which for
/// targets inside it loses nothing since every path from `anchor` to `y` stays
/// in the rectangle `[anchor, y]`.
pub fn p2p_levels<W: SiteWeights + ?Sized>(
    weights: &W,
    anchor: Site,
    region: Window,
    beta: Beta,
    levels: &[i64],
) -> Result<Vec<LevelProfile>> {
    region.check(anchor)?;
    let top = region.corner();
    let last = match levels.iter().copied().max() {
        Some(l) => l,
        None => return Ok(Vec::new()),
    };
    if levels.iter().any(|&l| l < anchor.level() || l > top.level()) {
        return Err(Error::Horizon(format!(
            "requested levels must lie in [{}, {}]",
            anchor.level(),
            top.level()
        )));
    }
    // weights are read strictly below the last level
    let read = Window::spanning(
        anchor,
        Site::new(top.u.min(last - anchor.v), top.v.min(last - anchor.u)),
    )?;
    check_bounds(weights, &read)?;

    let range = |k: i64| (anchor.u.max(k - top.v), top.u.min(k - anchor.v));
    let mut out = Vec::with_capacity(levels.len());
    let mut cur = LevelProfile {
        level: anchor.level(),
        u_lo: anchor.u,
        values: vec![0.0],
    };
    let mut shifted: Vec<f64> = Vec::new();
    for k in anchor.level()..=last {
        if k > anchor.level() {
            // shifted[i] = F(prev site) + ω(prev site)
            shifted.clear();
            shifted.extend(cur.sites().map(|(s, f)| f + weights.weight(s)));
            let prev_lo = cur.u_lo;
            let prev = |u: i64| -> f64 {
                let i = u - prev_lo;
                if i < 0 || i >= shifted.len() as i64 {
                    f64::NEG_INFINITY
                } else {
                    shifted[i as usize]
                }
            };
            let (lo, hi) = range(k);
            let values = (lo..=hi).map(|u| beta.combine(prev(u - 1), prev(u))).collect();
            cur = LevelProfile {
                level: k,
                u_lo: lo,
                values,
            };
        }
        if levels.contains(&k) {
            out.push(cur.clone());
        }
    }
    // return in the caller's order
    Ok(levels
        .iter()
        .map(|&l| out.iter().find(|p| p.level == l).cloned().expect("level computed"))
        .collect())
}

/// `F^{β,h}_{x,(n)}` at a single site, streaming backward from level `n`.
pub fn p2l_value<W: SiteWeights + ?Sized>(weights: &W, x: Site, beta: Beta, tilt: [f64; 2], level: i64) -> Result<f64> {
    let depth = level - x.level();
    if depth < 0 {
        return Ok(f64::NEG_INFINITY);
    }
    if depth == 0 {
        return Ok(0.0);
    }
    let read = Window::new(x, depth as usize, depth as usize)?;
    check_bounds(weights, &read)?;
    // on level x.level() + j, sites are x + (i, j − i) for i in 0..=j
    let mut next = vec![0.0; depth as usize + 1];
    for j in (0..depth).rev() {
        let mut cur = Vec::with_capacity(j as usize + 1);
        for i in 0..=j {
            let s = Site::new(x.u + i, x.v + j - i);
            let up = next[i as usize + 1] + tilt[0];
            let right = next[i as usize] + tilt[1];
            cur.push(weights.weight(s) + beta.combine(up, right));
        }
        next = cur;
    }
    Ok(next[0])
}
