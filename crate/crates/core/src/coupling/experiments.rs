use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use rayon::prelude::*;

use super::{CoupledStepRule, CouplingField, StepLaw};
use crate::csv;
use crate::env::{Site, Window};
use crate::error::{Error, Result};
use crate::gibbs::TransitionField;

/// Outcome for one coupling seed and one start pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoalescenceRecord {
    pub seed: u64,
    pub pair: usize,
    /// Level at which the two walks first share a site.
    pub level: Option<i64>,
    /// A walk left the law's domain before meeting or before the horizon.
    pub censored: bool,
    /// Steps after the first meeting at which the walks disagreed.
    pub post_merge_violations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoalescenceStats {
    pub records: Vec<CoalescenceRecord>,
    pub horizon: usize,
    /// Every visited site had `0 < p < 1`.
    pub elliptic: bool,
}

impl CoalescenceStats {
    pub fn coalesced(&self) -> usize {
        self.records.iter().filter(|r| r.level.is_some()).count()
    }

    pub fn fraction_coalesced(&self) -> f64 {
        self.coalesced() as f64 / self.records.len() as f64
    }

    /// Fraction that neither met nor ran the full horizon.
    pub fn fraction_censored(&self) -> f64 {
        self.records.iter().filter(|r| r.level.is_none() && r.censored).count() as f64 / self.records.len() as f64
    }

    pub fn post_merge_violations(&self) -> usize {
        self.records.iter().map(|r| r.post_merge_violations).sum()
    }

    /// Counts of coalescence levels, relative to the start level, in
    /// doubling bins `[0,1), [1,2), [2,4), …`.
    pub fn histogram(&self, start_level: i64) -> BTreeMap<i64, usize> {
        let mut h = BTreeMap::new();
        for r in &self.records {
            if let Some(l) = r.level {
                let d = l - start_level;
                let bin = if d <= 0 { 0 } else { 1i64 << (63 - d.leading_zeros()) };
                *h.entry(bin).or_insert(0) += 1;
            }
        }
        h
    }

    /// Rows `(seed, pair_id, coalesced, level)`; `level` is empty when the
    /// pair did not meet.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        csv::write(
            path,
            &["seed", "pair_id", "coalesced", "level"],
            self.records.iter().map(|r| {
                vec![
                    r.seed.to_string(),
                    r.pair.to_string(),
                    u8::from(r.level.is_some()).to_string(),
                    r.level.map(|l| l.to_string()).unwrap_or_default(),
                ]
            }),
        )
    }
}

/// Run each start pair under each coupling seed for `horizon` level-synchronised
/// steps, recording the first common site and checking that the walks never
/// separate afterwards.
pub fn coalescence_experiment(
    rule: &CoupledStepRule<'_>,
    pairs: &[(Site, Site)],
    horizon: usize,
    theta_seeds: &[u64],
) -> Result<CoalescenceStats> {
    if let Some((a, b)) = pairs.iter().find(|(a, b)| a.level() != b.level()) {
        return Err(Error::param(format!("starts {a} and {b} are on different levels")));
    }
    let jobs: Vec<(u64, usize)> = theta_seeds
        .iter()
        .flat_map(|&s| (0..pairs.len()).map(move |i| (s, i)))
        .collect();
    let out: Vec<(CoalescenceRecord, bool)> = jobs
        .par_iter()
        .map(|&(seed, i)| {
            let th = CouplingField::new(seed);
            let (mut x, mut y) = pairs[i];
            let mut rec = CoalescenceRecord {
                seed,
                pair: i,
                level: (x == y).then_some(x.level()),
                censored: false,
                post_merge_violations: 0,
            };
            let mut elliptic = true;
            for _ in 0..horizon {
                let (px, py) = (rule.law().p(x), rule.law().p(y));
                let (Some(px), Some(py)) = (px, py) else {
                    rec.censored = true;
                    break;
                };
                elliptic &= px > 0.0 && px < 1.0 && py > 0.0 && py < 1.0;
                x = rule.step(&th, x).expect("checked");
                y = rule.step(&th, y).expect("checked");
                if rec.level.is_some() {
                    if x != y {
                        rec.post_merge_violations += 1;
                    }
                } else if x == y {
                    rec.level = Some(x.level());
                }
            }
            (rec, elliptic)
        })
        .collect();
    Ok(CoalescenceStats {
        elliptic: out.iter().all(|o| o.1),
        records: out.into_iter().map(|o| o.0).collect(),
        horizon,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderingReport {
    pub walks: usize,
    /// Levels at which `X^lo·e1 > X^hi·e1`.
    pub violations: usize,
    /// Walks that left a field before `steps` moves.
    pub truncated: usize,
}

/// Run walks under `lo` and `hi` from `start` with each coupling seed and count
/// levels where the `lo` walk is strictly to the right of the `hi` walk.
///
/// The fields must satisfy `p_lo <= p_hi` on their common window; otherwise
/// this returns an ordering error without running anything.
pub fn ordering_check(
    lo: &TransitionField,
    hi: &TransitionField,
    theta_seeds: &[u64],
    start: Site,
    steps: usize,
) -> Result<OrderingReport> {
    let common = lo
        .window()
        .intersect(hi.window())
        .ok_or_else(|| Error::Ordering("fields share no sites".into()))?;
    if let Some(y) = common.sites().find(|&y| lo.grid()[y] > hi.grid()[y] + 1e-12) {
        return Err(Error::Ordering(format!(
            "p-fields are not ordered at {y}: {} > {}",
            lo.grid()[y],
            hi.grid()[y]
        )));
    }
    let law_lo = Restricted(lo, common);
    let law_hi = Restricted(hi, common);
    let (rlo, rhi) = (CoupledStepRule::new(&law_lo), CoupledStepRule::new(&law_hi));
    let per: Vec<(usize, bool)> = theta_seeds
        .par_iter()
        .map(|&seed| {
            let th = CouplingField::new(seed);
            let (mut a, mut b) = (start, start);
            let mut bad = 0;
            for _ in 0..steps {
                match (rlo.step(&th, a), rhi.step(&th, b)) {
                    (Some(na), Some(nb)) => {
                        a = na;
                        b = nb;
                        if a.u > b.u {
                            bad += 1;
                        }
                    }
                    _ => return (bad, true),
                }
            }
            (bad, false)
        })
        .collect();
    Ok(OrderingReport {
        walks: per.len(),
        violations: per.iter().map(|p| p.0).sum(),
        truncated: per.iter().filter(|p| p.1).count(),
    })
}

struct Restricted<'a>(&'a TransitionField, Window);

impl StepLaw for Restricted<'_> {
    fn p(&self, y: Site) -> Option<f64> {
        if self.1.contains(y) {
            Some(self.0.grid()[y])
        } else {
            None
        }
    }
}

/// Coalescence forest of walks started on the south-west boundary of a box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JunctionReport {
    pub side: usize,
    pub starts: usize,
    /// Visited sites entered from both `x − e1` and `x − e2`.
    pub junctions: usize,
    /// Visited sites entered from neither.
    pub leaves: usize,
    /// Distinct exit sites.
    pub trees: usize,
}

impl JunctionReport {
    pub fn density(&self) -> f64 {
        self.junctions as f64 / (self.side * self.side) as f64
    }

    /// `leaves >= junctions + trees`, which holds with equality for forests
    /// whose nodes have in-degree at most two.
    pub fn forest_identity_holds(&self) -> bool {
        self.leaves >= self.junctions + self.trees
    }
}

/// Walks from every site with `u = 0` or `v = 0` of the box
/// `origin + [0, side)²` until they leave it; counts junctions of the
/// resulting forest.
pub fn junction_statistics(
    rule: &CoupledStepRule<'_>,
    origin: Site,
    side: usize,
    thetas: &CouplingField,
) -> Result<JunctionReport> {
    let b = Window::new(origin, side, side)?;
    let mut starts: Vec<Site> = (0..side as i64).map(|u| origin + Site::new(u, 0)).collect();
    starts.extend((1..side as i64).map(|v| origin + Site::new(0, v)));
    let mut next: HashMap<Site, Site> = HashMap::new();
    let mut exits: HashSet<Site> = HashSet::new();
    for &s in &starts {
        let mut x = s;
        while b.contains(x) && !next.contains_key(&x) {
            let y = rule.step(thetas, x).ok_or_else(|| Error::OutOfWindow {
                site: x,
                window: "step-law domain".into(),
            })?;
            next.insert(x, y);
            if !b.contains(y) {
                exits.insert(x);
            }
            x = y;
        }
    }
    let mut indeg: HashMap<Site, usize> = next.keys().map(|&k| (k, 0)).collect();
    for y in next.values() {
        if let Some(d) = indeg.get_mut(y) {
            *d += 1;
        }
    }
    Ok(JunctionReport {
        side,
        starts: starts.len(),
        junctions: indeg.values().filter(|&&d| d == 2).count(),
        leaves: indeg.values().filter(|&&d| d == 0).count(),
        trees: exits.len(),
    })
}
