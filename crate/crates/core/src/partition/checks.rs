use super::{ln_path_count, p2p_table, Beta, Mode};
use crate::env::{Site, WeightField, Window, E1, E2};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BetaLimitRow {
    pub beta: f64,
    /// `F^β_{x,y} − G_{x,y}`
    pub gap: f64,
    /// `β⁻¹ log #paths`
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaLimitReport {
    pub last_passage: f64,
    pub rows: Vec<BetaLimitRow>,
    /// Every row satisfies `0 <= gap <= bound` (up to `tol`).
    pub sandwich_ok: bool,
    /// Gaps are nonincreasing along the ascending `β` list (up to `tol`).
    pub monotone_ok: bool,
}

/// Check `0 ≤ F^β − G ≤ β⁻¹ log #paths` and monotone decay of the gap in `β`.
pub fn beta_limit_check(field: &WeightField, x: Site, y: Site, betas: &[Beta]) -> Result<BetaLimitReport> {
    if !(x <= y) {
        return Err(Error::Domain {
            site: x,
            anchor: y,
            reason: "beta limit needs x <= y",
        });
    }
    if betas.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::param("beta list must be ascending"));
    }
    let window = Window::spanning(x, y)?;
    let g = p2p_table(field, y, window, Beta::INFINITE, Mode::ToAnchor)?.at(x);
    let d = y - x;
    let ln_paths = ln_path_count(d.u, d.v);
    let tol = 1e-12 * (1.0 + g.abs());
    let mut rows = Vec::with_capacity(betas.len());
    for &beta in betas {
        let f = p2p_table(field, y, window, beta, Mode::ToAnchor)?.at(x);
        rows.push(BetaLimitRow {
            beta: beta.value(),
            gap: f - g,
            bound: ln_paths / beta.value(),
        });
    }
    let sandwich_ok = rows.iter().all(|r| r.gap >= -tol && r.gap <= r.bound + tol);
    let monotone_ok = rows.windows(2).all(|w| w[1].gap <= w[0].gap + tol);
    Ok(BetaLimitReport {
        last_passage: g,
        rows,
        sandwich_ok,
        monotone_ok,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    /// `(F_{x+e1,u} − F_{x,u}) − (F_{x+e1,v} − F_{x,v})`, nonnegative in theory.
    pub margin_e1: f64,
    /// `(F_{x+e2,v} − F_{x,v}) − (F_{x+e2,u} − F_{x,u})`, nonnegative in theory.
    pub margin_e2: f64,
}

impl ComparisonReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.margin_e1 >= -tol && self.margin_e2 >= -tol
    }
}

/// Ratio comparison for targets `u`, `v` with `u` to the lower right of `v`.
/// Margins are in free-energy units (`β⁻¹` times log-ratios).
pub fn comparison_check(field: &WeightField, x: Site, u: Site, v: Site, beta: Beta) -> Result<ComparisonReport> {
    let base = x + E1 + E2;
    if !(u >= base && v >= base) {
        return Err(Error::Ordering(format!("targets {u} and {v} must both be >= {base}")));
    }
    if !(u.u >= v.u && u.v <= v.v) {
        return Err(Error::Ordering(format!(
            "target {u} must lie to the lower right of {v}"
        )));
    }
    let ratios = |t: Site| -> Result<(f64, f64)> {
        let table = p2p_table(field, t, Window::spanning(x, t)?, beta, Mode::ToAnchor)?;
        let fx = table.at(x);
        Ok((table.at(x + E1) - fx, table.at(x + E2) - fx))
    };
    let (u1, u2) = ratios(u)?;
    let (v1, v2) = ratios(v)?;
    Ok(ComparisonReport {
        margin_e1: u1 - v1,
        margin_e2: v2 - u2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{generate_field, WeightSpec};

    #[test]
    fn hand_grid_beta_ten() {
        let f = WeightField::from_values(Window::square(2), vec![1.0, 5.0, 2.0, 3.0]).unwrap();
        let r = beta_limit_check(&f, Site::new(0, 0), Site::new(1, 1), &[Beta::new(10.0).unwrap()]).unwrap();
        assert_eq!(r.last_passage, 6.0);
        let row = &r.rows[0];
        assert!(row.gap >= 0.0 && row.gap <= 2f64.ln() / 10.0);
        assert!(r.sandwich_ok && r.monotone_ok);
    }

    #[test]
    fn zero_weights_gap_is_entropy() {
        let f = generate_field(WeightSpec::Constant { c: 0.0 }, 0, Window::square(6)).unwrap();
        let betas: Vec<Beta> = [0.5, 1.0, 3.0].iter().map(|&b| Beta::new(b).unwrap()).collect();
        let r = beta_limit_check(&f, Site::new(0, 0), Site::new(3, 5), &betas).unwrap();
        let ln_c = (56f64).ln(); // C(8,3)
        for row in &r.rows {
            assert!((row.gap - ln_c / row.beta).abs() < 1e-12);
        }
    }

    #[test]
    fn comparison_degenerate_and_errors() {
        let f = generate_field(WeightSpec::standard_gaussian(), 2, Window::square(8)).unwrap();
        let x = Site::new(0, 0);
        let r = comparison_check(&f, x, Site::new(5, 4), Site::new(5, 4), Beta::ONE).unwrap();
        assert_eq!(r.margin_e1, 0.0);
        assert_eq!(r.margin_e2, 0.0);
        assert!(matches!(
            comparison_check(&f, x, Site::new(2, 6), Site::new(6, 2), Beta::ONE),
            Err(Error::Ordering(_))
        ));
        assert!(matches!(
            comparison_check(&f, x, Site::new(6, 0), Site::new(1, 6), Beta::ONE),
            Err(Error::Ordering(_))
        ));
    }
}
