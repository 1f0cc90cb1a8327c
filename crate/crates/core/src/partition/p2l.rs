use std::path::Path;

use super::{sweep_levels, Beta, LogValue};
use crate::csv::{self, fmt_real};
use crate::env::{Grid, Site, WeightField, Window, E1, E2};
use crate::error::{Error, Result};

/// Tilted point-to-line free energies `F^{β,h}_{x,(n)}` over the field window.
#[derive(Clone, Debug)]
pub struct TiltedLineTable {
    beta: Beta,
    tilt: [f64; 2],
    level: i64,
    values: Grid<f64>,
}

/// Backward recursion from the target level:
///
/// ```text
/// F_{x,(n)} = ω_x + β⁻¹ log(e^{β(F_{x+e1,(n)} + h1)} + e^{β(F_{x+e2,(n)} + h2)})
/// ```
///
/// with `F = 0` on level `n` and `-∞` beyond it. Every window site below
/// level `n` needs both successors inside the window.
pub fn p2l_table(field: &WeightField, beta: Beta, tilt: [f64; 2], level: i64) -> Result<TiltedLineTable> {
    Beta::new(beta.value())?;
    if !(tilt[0].is_finite() && tilt[1].is_finite()) {
        return Err(Error::param(format!("tilt must be finite, got {tilt:?}")));
    }
    let window = *field.window();
    if level < window.min_level() {
        return Err(Error::Horizon(format!(
            "target level {level} lies below the window {window}"
        )));
    }
    let c = window.corner();
    // the right column and top row must sit at or beyond the target level
    if c.u + window.origin.v < level || c.v + window.origin.u < level {
        return Err(Error::Horizon(format!(
            "window {window} too small for target level {level}"
        )));
    }
    let mut values = Grid::filled(window, f64::NEG_INFINITY);
    for s in window.level_sites(level) {
        values[s] = 0.0;
    }
    let top = level.min(window.max_level() + 1);
    sweep_levels(&mut values, (window.min_level()..top).rev(), |g, x| {
        field.at(x) + beta.combine(g[x + E1] + tilt[0], g[x + E2] + tilt[1])
    });
    Ok(TiltedLineTable {
        beta,
        tilt,
        level,
        values,
    })
}

impl TiltedLineTable {
    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn tilt(&self) -> [f64; 2] {
        self.tilt
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn window(&self) -> &Window {
        self.values.window()
    }

    pub fn get(&self, s: Site) -> Result<LogValue> {
        let i = self.window().check(s)?;
        Ok(LogValue(self.values.values()[i]))
    }

    #[inline]
    pub fn at(&self, s: Site) -> f64 {
        self.values[s]
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.values
    }

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
