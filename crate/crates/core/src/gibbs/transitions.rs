use crate::cocycle::{BusemannField, Provenance};
use crate::env::{Grid, Site, WeightField, Window, E1, E2};
use crate::error::{Error, Result};
use crate::partition::{Beta, Mode, PartitionTable};

/// Where a transition field came from.
#[derive(Clone, Debug, PartialEq)]
pub enum TransitionSource {
    /// `π(y → y+e_i) = e^{β(ω_y − b_i(y))}` from a Busemann field.
    Busemann(Provenance),
    /// Backward chain of the point-to-point measures rooted at `anchor`.
    Backward { anchor: Site },
    /// Competition-interface chain rooted at `root`.
    Interface { root: Site },
    /// Prescribed probabilities, e.g. a constant.
    Prescribed,
}

/// Per-site probability of the `e1` move; the `e2` move has the complement.
///
/// Forward fields step `y → y + e_i`; backward fields step `u → u − e_i`.
#[derive(Clone, Debug)]
pub struct TransitionField {
    p: Grid<f64>,
    source: TransitionSource,
}

impl TransitionField {
    pub fn constant(window: Window, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!("probability {p} outside [0, 1]")));
        }
        Ok(TransitionField {
            p: Grid::filled(window, p),
            source: TransitionSource::Prescribed,
        })
    }

    pub fn from_fn(window: Window, f: impl FnMut(Site) -> f64) -> Result<Self> {
        let p = Grid::from_fn(window, f);
        if let Some((s, x)) = p.iter().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
            return Err(Error::param(format!("probability {x} at {s} outside [0, 1]")));
        }
        Ok(TransitionField {
            p,
            source: TransitionSource::Prescribed,
        })
    }

    pub(crate) fn from_grid(p: Grid<f64>, source: TransitionSource) -> Self {
        TransitionField { p, source }
    }

    /// Forward transitions `π(y → y+e1) = e^{β(ω_y − b1(y))}`. At `β = ∞` the
    /// move is `e1` exactly when `b1(y) = ω_y`.
    ///
    /// On and above the horizon of a point-to-line field the increments carry
    /// no information; those sites get the free tilted step
    /// `e^{βh1} / (e^{βh1} + e^{βh2})`.
    pub fn from_busemann(busemann: &BusemannField, field: &WeightField) -> Result<Self> {
        let w = *busemann.window();
        if !field.window().contains_window(&w) {
            return Err(Error::OutOfWindow {
                site: w.corner(),
                window: field.window().to_string(),
            });
        }
        let beta = busemann.beta();
        let free = busemann.tilt().zip(busemann.horizon_level()).map(|(h, n)| {
            let p = if beta.is_infinite() {
                if h[0] >= h[1] {
                    1.0
                } else {
                    0.0
                }
            } else {
                1.0 / (1.0 + (beta.value() * (h[1] - h[0])).exp())
            };
            (n, p)
        });
        let p = Grid::from_fn(w, |y| {
            if let Some((n, p)) = free {
                if y.level() >= n {
                    return p;
                }
            }
            let x = field.at(y) - busemann.b1(y);
            if beta.is_infinite() {
                if x >= -1e-12 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (beta.value() * x).exp().clamp(0.0, 1.0)
            }
        });
        Ok(TransitionField {
            p,
            source: TransitionSource::Busemann(busemann.provenance().clone()),
        })
    }

    pub fn window(&self) -> &Window {
        self.p.window()
    }

    pub fn source(&self) -> &TransitionSource {
        &self.source
    }

    /// Probability of the `e1` move at `y`.
    pub fn p(&self, y: Site) -> Result<f64> {
        self.p.get(y).copied().ok_or_else(|| Error::OutOfWindow {
            site: y,
            window: self.window().to_string(),
        })
    }

    #[inline]
    pub(crate) fn p_at(&self, y: Site) -> f64 {
        self.p[y]
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.p
    }

    /// `true` when every probability lies strictly inside `(0, 1)`.
    pub fn is_elliptic(&self) -> bool {
        self.p.values().iter().all(|&x| x > 0.0 && x < 1.0)
    }
}

/// Backward transitions `π̌(u → u−e_i) = e^{β(ω_{u−e_i} + F_{x,u−e_i} − F_{x,u})}`
/// from a table of `F_{x,·}` (mode [`Mode::FromAnchor`]).
///
/// Sites on the two boundary rays through the anchor have their single
/// admissible move forced. The anchor itself holds `NaN`: the chain stops there.
pub fn backward_transitions(table: &PartitionTable, field: &WeightField) -> Result<TransitionField> {
    if table.mode() != Mode::FromAnchor {
        return Err(Error::param("backward transitions need free energies from the anchor"));
    }
    let x = table.anchor();
    let w = Window::spanning(x, table.window().corner())?;
    let beta = table.beta();
    let p = Grid::from_fn(w, |u| {
        if u == x {
            f64::NAN
        } else if u.v == x.v {
            1.0
        } else if u.u == x.u {
            0.0
        } else {
            let d = field.at(u - E1) + table.at(u - E1) - table.at(u);
            backward_weight(beta, d, field.at(u - E2) + table.at(u - E2) - table.at(u))
        }
    });
    Ok(TransitionField::from_grid(p, TransitionSource::Backward { anchor: x }))
}

fn backward_weight(beta: Beta, d1: f64, d2: f64) -> f64 {
    if beta.is_infinite() {
        // ties go to e1
        if d1 >= d2 {
            1.0
        } else {
            0.0
        }
    } else {
        (beta.value() * d1).exp().clamp(0.0, 1.0)
    }
}

/// Largest `|π̌(u→u−e1) + π̌(u→u−e2) − 1|` over `u >= x + (1,1)`, both terms
/// computed from the table.
pub fn backward_residual(table: &PartitionTable, field: &WeightField) -> Result<f64> {
    if table.mode() != Mode::FromAnchor {
        return Err(Error::param("backward transitions need free energies from the anchor"));
    }
    let x = table.anchor();
    let beta = table.beta();
    let w = Window::spanning(x + E1 + E2, table.window().corner());
    let Ok(w) = w else { return Ok(0.0) };
    Ok(w.sites()
        .map(|u| {
            let a = beta.boltzmann(field.at(u - E1) + table.at(u - E1) - table.at(u));
            let b = beta.boltzmann(field.at(u - E2) + table.at(u - E2) - table.at(u));
            if beta.is_infinite() {
                // at zero temperature at least one move attains the maximum
                if a.max(b) == 1.0 {
                    0.0
                } else {
                    1.0
                }
            } else {
                (a + b - 1.0).abs()
            }
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{generate_field, WeightSpec};
    use crate::partition::p2p_table;

    fn hand() -> WeightField {
        WeightField::from_values(Window::square(2), vec![1.0, 5.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn hand_grid_backward_probability() {
        let f = hand();
        let t = p2p_table(&f, Site::new(0, 0), Window::square(2), Beta::ONE, Mode::FromAnchor).unwrap();
        let tr = backward_transitions(&t, &f).unwrap();
        // u − e1 = (0,1)
        let up = tr.p(Site::new(1, 1)).unwrap();
        let want = 3f64.exp() / (6f64.exp() + 3f64.exp());
        assert!((up - want).abs() < 1e-12);
        assert!((want - 0.0474259).abs() < 1e-7);
        assert_eq!(tr.p(Site::new(1, 0)).unwrap(), 1.0);
        assert_eq!(tr.p(Site::new(0, 1)).unwrap(), 0.0);
    }

    #[test]
    fn constant_weights_give_uniform_paths() {
        let f = generate_field(WeightSpec::Constant { c: 0.0 }, 0, Window::square(8)).unwrap();
        let t = p2p_table(
            &f,
            Site::new(0, 0),
            Window::square(8),
            Beta::new(2.0).unwrap(),
            Mode::FromAnchor,
        )
        .unwrap();
        let tr = backward_transitions(&t, &f).unwrap();
        let u = Site::new(3, 5);
        assert!((tr.p(u).unwrap() - 3.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn backward_sums_to_one() {
        let f = generate_field(WeightSpec::standard_gaussian(), 2, Window::square(50)).unwrap();
        for beta in [Beta::ONE, Beta::INFINITE] {
            let t = p2p_table(&f, Site::new(0, 0), Window::square(50), beta, Mode::FromAnchor).unwrap();
            assert!(backward_residual(&t, &f).unwrap() <= 1e-12);
        }
    }
}
