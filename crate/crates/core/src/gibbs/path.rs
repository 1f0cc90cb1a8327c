use std::path::Path;

use crate::csv;
use crate::env::{Site, E1, E2};
use crate::error::{Error, Result};

/// Up-right path `x_m, x_{m+1}, …, x_n` with `level(x_k) = k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolymerPath {
    sites: Vec<Site>,
}

impl PolymerPath {
    pub fn new(sites: Vec<Site>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::param("a path needs at least one site"));
        }
        for w in sites.windows(2) {
            let d = w[1] - w[0];
            if d != E1 && d != E2 {
                return Err(Error::param(format!("step {} → {} is not admissible", w[0], w[1])));
            }
        }
        Ok(PolymerPath { sites })
    }

    pub fn single(x: Site) -> Self {
        PolymerPath { sites: vec![x] }
    }

    /// Build from a start site and step indices in `{1, 2}`.
    pub fn from_steps(x: Site, steps: &[u8]) -> Result<Self> {
        let mut sites = Vec::with_capacity(steps.len() + 1);
        sites.push(x);
        let mut s = x;
        for &i in steps {
            s = match i {
                1 => s + E1,
                2 => s + E2,
                _ => return Err(Error::param(format!("step index must be 1 or 2, got {i}"))),
            };
            sites.push(s);
        }
        Ok(PolymerPath { sites })
    }

    pub(crate) fn from_sites_unchecked(sites: Vec<Site>) -> Self {
        debug_assert!(PolymerPath::new(sites.clone()).is_ok());
        PolymerPath { sites }
    }

    pub fn start(&self) -> Site {
        self.sites[0]
    }

    pub fn end(&self) -> Site {
        *self.sites.last().unwrap()
    }

    pub fn start_level(&self) -> i64 {
        self.start().level()
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.sites.len() == 1
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    /// Step indices in `{1, 2}`.
    pub fn steps(&self) -> impl Iterator<Item = u8> + '_ {
        self.sites.windows(2).map(|w| if w[1] - w[0] == E1 { 1 } else { 2 })
    }

    /// Site at level `k`, if the path visits it.
    pub fn at_level(&self, k: i64) -> Option<Site> {
        let i = k - self.start_level();
        if i < 0 {
            None
        } else {
            self.sites.get(i as usize).copied()
        }
    }

    /// Rows `(k, u, v)`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        csv::write(
            path,
            &["k", "u", "v"],
            self.sites
                .iter()
                .map(|s| vec![s.level().to_string(), s.u.to_string(), s.v.to_string()]),
        )
    }
}
