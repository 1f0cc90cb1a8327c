use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{sweep_levels, Beta, LogValue};
use crate::csv::{self, fmt_real};
use crate::env::{Grid, Site, WeightField, Window, E1, E2};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `F_{anchor, y}` for `y >= anchor`.
    FromAnchor,
    /// `F_{x, anchor}` for `x <= anchor`.
    ToAnchor,
}

/// Point-to-point free energies between a fixed anchor and every site of a window.
#[derive(Clone, Debug)]
pub struct PartitionTable {
    anchor: Site,
    beta: Beta,
    mode: Mode,
    env: u64,
    values: Grid<f64>,
}

/// Fill `F^β` between `anchor` and all of `window` by the one-step recursion
///
/// ```text
/// F_{x,y} = ω_x + β⁻¹ log(e^{β F_{x+e1,y}} + e^{β F_{x+e2,y}})
/// ```
///
/// swept over anti-diagonal levels.
pub fn p2p_table(field: &WeightField, anchor: Site, window: Window, beta: Beta, mode: Mode) -> Result<PartitionTable> {
    Beta::new(beta.value())?;
    window.check(anchor)?;
    if !field.window().contains_window(&window) {
        return Err(Error::OutOfWindow {
            site: window.corner(),
            window: field.window().to_string(),
        });
    }
    let mut values = Grid::filled(window, f64::NEG_INFINITY);
    values[anchor] = 0.0;
    match mode {
        Mode::ToAnchor => {
            let lo = window.min_level();
            sweep_levels(&mut values, (lo..anchor.level()).rev(), |g, x| {
                if !(x <= anchor) {
                    return f64::NEG_INFINITY;
                }
                // x <= anchor and x != anchor, so at least one step stays below anchor.
                let a = if x + E1 <= anchor { g[x + E1] } else { f64::NEG_INFINITY };
                let b = if x + E2 <= anchor { g[x + E2] } else { f64::NEG_INFINITY };
                field.at(x) + beta.combine(a, b)
            });
        }
        Mode::FromAnchor => {
            let hi = window.max_level();
            sweep_levels(&mut values, anchor.level() + 1..=hi, |g, y| {
                if !(y >= anchor) {
                    return f64::NEG_INFINITY;
                }
                let arm = |p: Site| {
                    if p >= anchor {
                        g[p] + field.at(p)
                    } else {
                        f64::NEG_INFINITY
                    }
                };
                beta.combine(arm(y - E1), arm(y - E2))
            });
        }
    }
    Ok(PartitionTable {
        anchor,
        beta,
        mode,
        env: field.fingerprint(),
        values,
    })
}

impl PartitionTable {
    pub fn anchor(&self) -> Site {
        self.anchor
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn window(&self) -> &Window {
        self.values.window()
    }

    /// Fingerprint of the environment the table was built from.
    pub fn env_fingerprint(&self) -> u64 {
        self.env
    }

    pub fn get(&self, s: Site) -> Result<LogValue> {
        let i = self.window().check(s)?;
        Ok(LogValue(self.values.values()[i]))
    }

    /// Unchecked lookup; panics outside the window.
    #[inline]
    pub fn at(&self, s: Site) -> f64 {
        self.values[s]
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.values
    }

    /// Largest deviation from the one-step recursion over every site whose
    /// neighbours are in the table.
    pub fn recursion_residual(&self, field: &WeightField) -> f64 {
        let w = *self.window();
        let mut worst: f64 = 0.0;
        for (s, &f) in self.values.iter() {
            if f == f64::NEG_INFINITY || s == self.anchor {
                continue;
            }
            let rhs = match self.mode {
                Mode::ToAnchor => {
                    let a = self.values.get(s + E1).copied().unwrap_or(f64::NEG_INFINITY);
                    let b = self.values.get(s + E2).copied().unwrap_or(f64::NEG_INFINITY);
                    field.at(s) + self.beta.combine(a, b)
                }
                Mode::FromAnchor => {
                    let arm = |p: Site| {
                        if w.contains(p) {
                            self.values[p] + field.at(p)
                        } else {
                            f64::NEG_INFINITY
                        }
                    };
                    self.beta.combine(arm(s - E1), arm(s - E2))
                }
            };
            worst = worst.max((f - rhs).abs());
        }
        worst
    }

    /// Rows `(u, v, logF)`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        csv::write(
            path,
            &["u", "v", "logF"],
            self.values
                .iter()
                .map(|(s, f)| vec![s.u.to_string(), s.v.to_string(), fmt_real(*f)]),
        )
    }
}
