//! Walks in a random environment coupled through one shared uniform field.
//!
//! A walk at `x` steps `e1` when `ϑ(x) < p_x` and `e2` otherwise, so walks
//! that meet agree forever and walks driven by ordered `p` stay ordered.

mod experiments;
mod strip;

use crate::env::rng::{site_key, stream, unit_f64};
use crate::env::{Site, E1, E2};
use crate::error::{Error, Result};
use crate::gibbs::{PolymerPath, TransitionField};

pub use experiments::{
    coalescence_experiment, junction_statistics, ordering_check, CoalescenceRecord, CoalescenceStats, JunctionReport,
    OrderingReport,
};
pub use strip::{strip_busemann_law, StripLaw};

/// Per-site step probabilities of the `e1` move; `None` outside the domain.
pub trait StepLaw: Sync {
    fn p(&self, y: Site) -> Option<f64>;
}

impl StepLaw for TransitionField {
    fn p(&self, y: Site) -> Option<f64> {
        self.grid().get(y).copied()
    }
}

/// The same probability at every site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantLaw(pub f64);

impl StepLaw for ConstantLaw {
    fn p(&self, _: Site) -> Option<f64> {
        Some(self.0)
    }
}

/// I.i.d. uniforms `ϑ(x)` keyed by `(seed, x)` in their own stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CouplingField {
    pub seed: u64,
}

impl CouplingField {
    pub fn new(seed: u64) -> Self {
        CouplingField { seed }
    }

    #[inline]
    pub fn theta(&self, x: Site) -> f64 {
        unit_f64(site_key(self.seed, stream::COUPLING, x))
    }
}

/// `step(x) = e1` if `ϑ(x) < p_x`, else `e2`.
#[derive(Clone, Copy)]
pub struct CoupledStepRule<'a> {
    law: &'a dyn StepLaw,
}

impl<'a> CoupledStepRule<'a> {
    pub fn new(law: &'a dyn StepLaw) -> Self {
        CoupledStepRule { law }
    }

    pub fn law(&self) -> &'a dyn StepLaw {
        self.law
    }

    /// Next site, or `None` when `x` is outside the law's domain.
    #[inline]
    pub fn step(&self, thetas: &CouplingField, x: Site) -> Option<Site> {
        let p = self.law.p(x)?;
        Some(if thetas.theta(x) < p { x + E1 } else { x + E2 })
    }
}

/// A coupled walk and whether it ran out of domain early.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledWalk {
    pub path: PolymerPath,
    pub truncated: bool,
}

/// Follow the rule from `start` for `steps` moves.
pub fn coupled_walk(
    rule: &CoupledStepRule<'_>,
    thetas: &CouplingField,
    start: Site,
    steps: usize,
) -> Result<CoupledWalk> {
    if rule.law.p(start).is_none() {
        return Err(Error::OutOfWindow {
            site: start,
            window: "step-law domain".into(),
        });
    }
    let mut sites = Vec::with_capacity(steps + 1);
    sites.push(start);
    let mut x = start;
    let mut truncated = false;
    for _ in 0..steps {
        match rule.step(thetas, x) {
            Some(y) => {
                x = y;
                sites.push(y);
            }
            None => {
                truncated = true;
                break;
            }
        }
    }
    Ok(CoupledWalk {
        path: PolymerPath::new(sites)?,
        truncated,
    })
}
