use std::path::Path;

use crate::csv::{self, fmt_real};
use crate::env::{Grid, Site, WeightField, Window, E1, E2};
use crate::error::{Error, Result};
use crate::partition::{p2l_table, p2p_table, Beta, Mode};

/// How a Busemann field was obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    /// Differences of tilted point-to-line free energies at target `level`.
    PointToLine { tilt: [f64; 2], level: i64 },
    /// Differences of point-to-point free energies to a fixed `target`.
    PointToPoint { target: Site },
    /// Average of point-to-line fields over environments and uniform horizons.
    Cesaro {
        tilt: [f64; 2],
        level: i64,
        samples: usize,
        /// `|f̂_pl(h)|` of the tilt used, when known.
        pl_residual: Option<f64>,
    },
}

/// Nearest-neighbour increments `b_i(y) ≈ B(y, y + e_i)` on a window.
#[derive(Clone, Debug)]
pub struct BusemannField {
    beta: Beta,
    provenance: Provenance,
    env: u64,
    b1: Grid<f64>,
    b2: Grid<f64>,
}

/// `B_n(x, x+e_i) = F^{β,h}_{x,(n)} − F^{β,h}_{x+e_i,(n)} − h·e_i` below level `n`,
/// zero on and above it.
///
/// The increments live on the field window minus its top row and right column.
pub fn busemann_from_p2l(field: &WeightField, beta: Beta, tilt: [f64; 2], level: i64) -> Result<BusemannField> {
    let fw = *field.window();
    if level <= fw.min_level() {
        return Err(Error::Horizon(format!(
            "horizon level {level} must exceed the lowest window level {}",
            fw.min_level()
        )));
    }
    if fw.width < 2 || fw.height < 2 {
        return Err(Error::param("field window must be at least 2×2"));
    }
    let table = p2l_table(field, beta, tilt, level)?;
    let window = Window::new(fw.origin, fw.width - 1, fw.height - 1)?;
    let inc = |i: usize| {
        let step = Site::unit(i);
        Grid::from_fn(window, |x| {
            if x.level() < level {
                table.at(x) - table.at(x + step) - tilt[i - 1]
            } else {
                0.0
            }
        })
    };
    Ok(BusemannField {
        beta,
        provenance: Provenance::PointToLine { tilt, level },
        env: field.fingerprint(),
        b1: inc(1),
        b2: inc(2),
    })
}

/// `b_i(y) = F_{y,target} − F_{y+e_i,target}` on `window`; every window site
/// must satisfy `y + (1,1) <= target`.
pub fn busemann_from_p2p(field: &WeightField, beta: Beta, target: Site, window: Window) -> Result<BusemannField> {
    let c = window.corner();
    if !(c + E1 + E2 <= target) {
        return Err(Error::Ordering(format!(
            "target {target} must dominate every window site shifted by (1,1); window corner is {c}"
        )));
    }
    let region = Window::spanning(window.origin, target)?;
    let table = p2p_table(field, target, region, beta, Mode::ToAnchor)?;
    let inc = |step: Site| Grid::from_fn(window, |y| table.at(y) - table.at(y + step));
    Ok(BusemannField {
        beta,
        provenance: Provenance::PointToPoint { target },
        env: field.fingerprint(),
        b1: inc(E1),
        b2: inc(E2),
    })
}

impl BusemannField {
    pub(crate) fn from_parts(beta: Beta, provenance: Provenance, env: u64, b1: Grid<f64>, b2: Grid<f64>) -> Self {
        assert_eq!(b1.window(), b2.window());
        BusemannField {
            beta,
            provenance,
            env,
            b1,
            b2,
        }
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn window(&self) -> &Window {
        self.b1.window()
    }

    pub fn env_fingerprint(&self) -> u64 {
        self.env
    }

    /// Tilt for point-to-line and Cesàro provenance.
    pub fn tilt(&self) -> Option<[f64; 2]> {
        match self.provenance {
            Provenance::PointToLine { tilt, .. } | Provenance::Cesaro { tilt, .. } => Some(tilt),
            Provenance::PointToPoint { .. } => None,
        }
    }

    /// Levels strictly below this are free of the horizon convention.
    pub fn horizon_level(&self) -> Option<i64> {
        match self.provenance {
            Provenance::PointToLine { level, .. } => Some(level),
            _ => None,
        }
    }

    #[inline]
    pub fn b1(&self, y: Site) -> f64 {
        self.b1[y]
    }

    #[inline]
    pub fn b2(&self, y: Site) -> f64 {
        self.b2[y]
    }

    /// `B(y, y + e_i)`.
    pub fn increment(&self, y: Site, i: usize) -> Result<f64> {
        let idx = self.window().check(y)?;
        Ok(match i {
            1 => self.b1.values()[idx],
            2 => self.b2.values()[idx],
            _ => return Err(Error::param(format!("step index must be 1 or 2, got {i}"))),
        })
    }

    fn usable(&self, y: Site) -> bool {
        self.horizon_level().is_none_or(|n| y.level() < n)
    }

    /// Sites where recovery is expected to hold.
    pub fn recovery_sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.window().sites().filter(move |&y| self.usable(y))
    }

    /// Recovery defect at `y`, normalised by `e^{−βω_y}`:
    /// `|e^{β(ω−b1)} + e^{β(ω−b2)} − 1|`, or `|min(b1, b2) − ω|` at `β = ∞`.
    pub fn recovery_defect(&self, field: &WeightField, y: Site) -> f64 {
        let w = field.at(y);
        let (a, b) = (self.b1(y), self.b2(y));
        if self.beta.is_infinite() {
            (a.min(b) - w).abs()
        } else {
            let beta = self.beta.value();
            ((beta * (w - a)).exp() + (beta * (w - b)).exp() - 1.0).abs()
        }
    }

    /// Largest recovery defect over the window (horizon-convention sites skipped).
    pub fn recovery_residual(&self, field: &WeightField) -> f64 {
        self.recovery_sites()
            .map(|y| self.recovery_defect(field, y))
            .fold(0.0, f64::max)
    }

    /// Largest plaquette defect `|b1(y) + b2(y+e1) − b2(y) − b1(y+e2)|`.
    pub fn closure_residual(&self) -> f64 {
        let w = *self.window();
        let mut worst: f64 = 0.0;
        for y in w.sites() {
            let (r, u) = (y + E1, y + E2);
            if !w.contains(r) || !w.contains(u) {
                continue;
            }
            if let Some(n) = self.horizon_level() {
                if y.level() + 1 >= n {
                    continue;
                }
            }
            let d = self.b1(y) + self.b2(r) - self.b2(y) - self.b1(u);
            worst = worst.max(d.abs());
        }
        worst
    }

    /// Sum of increments along an admissible path given by its sites.
    pub fn sum_along(&self, path: &[Site]) -> Result<f64> {
        let mut acc = 0.0;
        for pair in path.windows(2) {
            let step = pair[1] - pair[0];
            let i = if step == E1 {
                1
            } else if step == E2 {
                2
            } else {
                return Err(Error::param(format!(
                    "path step {} → {} is not admissible",
                    pair[0], pair[1]
                )));
            };
            acc += self.increment(pair[0], i)?;
        }
        Ok(acc)
    }

    /// `B(x, y)` for `x <= y`, summed along the staircase that takes all `e1`
    /// steps first.
    pub fn cocycle(&self, x: Site, y: Site) -> Result<f64> {
        if !(x <= y) {
            return Err(Error::Domain {
                site: x,
                anchor: y,
                reason: "cocycle sums need x <= y",
            });
        }
        let mut acc = 0.0;
        let mut s = x;
        while s.u < y.u {
            acc += self.increment(s, 1)?;
            s = s + E1;
        }
        while s.v < y.v {
            acc += self.increment(s, 2)?;
            s = s + E2;
        }
        Ok(acc)
    }

    /// `B(root, y)` for every `y >= root` in the window, `NaN` elsewhere.
    /// Sums run up the root column then along rows.
    pub fn cocycle_from(&self, root: Site) -> Result<Grid<f64>> {
        let w = *self.window();
        w.check(root)?;
        let mut out = Grid::filled(w, f64::NAN);
        let c = w.corner();
        let mut col = 0.0;
        for v in root.v..=c.v {
            let s = Site::new(root.u, v);
            if v > root.v {
                col += self.b2(s - E2);
            }
            let mut row = col;
            out[s] = row;
            for u in root.u + 1..=c.u {
                let t = Site::new(u, v);
                row += self.b1(t - E1);
                out[t] = row;
            }
        }
        Ok(out)
    }

    /// Rows `(u, v, b1, b2)`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        csv::write(
            path,
            &["u", "v", "b1", "b2"],
            self.window().sites().map(|s| {
                vec![
                    s.u.to_string(),
                    s.v.to_string(),
                    fmt_real(self.b1(s)),
                    fmt_real(self.b2(s)),
                ]
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{generate_field, WeightSpec};

    #[test]
    fn zero_weights_zero_tilt_gives_log_two() {
        let f = generate_field(WeightSpec::Constant { c: 0.0 }, 0, Window::square(11)).unwrap();
        let b = busemann_from_p2l(&f, Beta::ONE, [0.0, 0.0], 10).unwrap();
        for y in b.recovery_sites() {
            assert!((b.b1(y) - 2f64.ln()).abs() < 1e-12);
            assert!((b.b2(y) - 2f64.ln()).abs() < 1e-12);
        }
        assert!(b.recovery_residual(&f) < 1e-12);
        // the horizon convention
        assert_eq!(b.b1(Site::new(9, 1)), 0.0);
    }

    #[test]
    fn hand_grid_zero_temperature_p2p() {
        let f = WeightField::from_values(Window::square(2), vec![1.0, 5.0, 2.0, 3.0]).unwrap();
        let w = Window::new(Site::new(0, 0), 1, 1).unwrap();
        let b = busemann_from_p2p(&f, Beta::INFINITE, Site::new(1, 1), w).unwrap();
        let y = Site::new(0, 0);
        assert_eq!(b.b1(y), 1.0);
        assert_eq!(b.b1(y).min(b.b2(y)), f.at(y));
        assert_eq!(b.recovery_residual(&f), 0.0);
    }

    #[test]
    fn p2p_target_must_dominate() {
        let f = generate_field(WeightSpec::standard_gaussian(), 0, Window::square(6)).unwrap();
        let r = busemann_from_p2p(&f, Beta::ONE, Site::new(4, 4), Window::square(5));
        assert!(matches!(r, Err(Error::Ordering(_))));
    }

    #[test]
    fn staircase_sums_agree() {
        let f = generate_field(WeightSpec::standard_gaussian(), 12, Window::square(21)).unwrap();
        let b = busemann_from_p2l(&f, Beta::ONE, [0.1, -0.1], 20).unwrap();
        let grid = b.cocycle_from(Site::new(0, 0)).unwrap();
        let y = Site::new(4, 7);
        assert!((grid[y] - b.cocycle(Site::new(0, 0), y).unwrap()).abs() < 1e-10);
        assert!(b.closure_residual() < 1e-10);
    }
}
