//! Exhaustive path enumeration. Independent of the recursions in `p2p`/`p2l`.

use super::{Beta, LogValue};
use crate::env::{Site, WeightField, E1, E2};
use crate::error::{Error, Result};

/// Steps beyond which enumeration is refused (2²⁴ step sequences).
pub const ORACLE_MAX_STEPS: i64 = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleTarget {
    Point(Site),
    /// All paths to `level`, with the external-field bonus `h·(x_n − x_m)`.
    Line {
        level: i64,
        tilt: [f64; 2],
    },
}

/// `β⁻¹ log Σ_paths e^{β·energy}` (max at `β = ∞`) by listing every admissible
/// path from `x`, optionally restricted to paths through `through`.
pub fn enumerate_oracle(
    field: &WeightField,
    x: Site,
    target: OracleTarget,
    beta: Beta,
    through: Option<Site>,
) -> Result<LogValue> {
    let steps = match target {
        OracleTarget::Point(y) => y.level() - x.level(),
        OracleTarget::Line { level, .. } => level - x.level(),
    };
    if steps > ORACLE_MAX_STEPS {
        return Err(Error::Size {
            steps,
            limit: ORACLE_MAX_STEPS,
        });
    }
    if steps < 0 {
        return Ok(LogValue::NO_PATH);
    }
    let mut walk = Walk {
        field,
        target,
        through,
        energies: Vec::new(),
    };
    walk.visit(x, x, steps, 0.0, through.is_none() || through == Some(x));
    let energies = walk.energies;
    if energies.is_empty() {
        return Ok(LogValue::NO_PATH);
    }
    Ok(LogValue(beta.combine_all(&energies)))
}

struct Walk<'a> {
    field: &'a WeightField,
    target: OracleTarget,
    through: Option<Site>,
    energies: Vec<f64>,
}

impl Walk<'_> {
    fn visit(&mut self, start: Site, site: Site, remaining: i64, energy: f64, hit: bool) {
        if let OracleTarget::Point(y) = self.target {
            if !(site <= y) {
                return;
            }
        }
        if remaining == 0 {
            if !hit {
                return;
            }
            match self.target {
                OracleTarget::Point(y) if site == y => self.energies.push(energy),
                OracleTarget::Point(_) => {}
                OracleTarget::Line { tilt, .. } => self.energies.push(energy + (site - start).dot(tilt)),
            }
            return;
        }
        // a path leaving the field window cannot be scored
        let Ok(w) = self.field.value(site) else {
            return;
        };
        for step in [E1, E2] {
            let next = site + step;
            let hit = hit || self.through == Some(next);
            self.visit(start, next, remaining - 1, energy + w, hit);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{generate_field, WeightSpec, Window};

    #[test]
    fn degenerate_paths() {
        let f = generate_field(WeightSpec::standard_gaussian(), 1, Window::square(4)).unwrap();
        let x = Site::new(1, 1);
        let pt = |y| enumerate_oracle(&f, x, OracleTarget::Point(y), Beta::ONE, None).unwrap();
        assert_eq!(pt(x).value(), 0.0);
        assert!((pt(x + E1).value() - f.at(x)).abs() < 1e-15);
        assert_eq!(pt(Site::new(0, 3)), LogValue::NO_PATH);
    }

    #[test]
    fn size_guard() {
        let f = generate_field(WeightSpec::standard_gaussian(), 1, Window::square(2)).unwrap();
        let r = enumerate_oracle(
            &f,
            Site::new(0, 0),
            OracleTarget::Point(Site::new(13, 12)),
            Beta::ONE,
            None,
        );
        assert!(matches!(r, Err(Error::Size { .. })));
    }

    #[test]
    fn through_restriction_on_hand_grid() {
        let f = WeightField::from_values(Window::square(2), vec![1.0, 5.0, 2.0, 3.0]).unwrap();
        let via = enumerate_oracle(
            &f,
            Site::new(0, 0),
            OracleTarget::Point(Site::new(1, 1)),
            Beta::ONE,
            Some(Site::new(1, 0)),
        )
        .unwrap();
        assert!((via.value() - 6.0).abs() < 1e-15);
    }
}
