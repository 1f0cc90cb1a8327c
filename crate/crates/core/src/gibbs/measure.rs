use std::collections::HashMap;
use std::path::Path;

use super::{PolymerPath, TransitionField};
use crate::cocycle::{direction_target, BusemannField, ShapeEstimate};
use crate::csv::{self, fmt_real};
use crate::env::{Grid, Site, WeightField, Window, E1, E2};
use crate::error::{Error, Result};
use crate::partition::{p2p_table, Mode, PartitionTable};

/// Largest number of steps enumerated by [`dlr_consistency_check`].
pub const DLR_MAX_STEPS: i64 = 20;

fn weight_sum(field: &WeightField, path: &PolymerPath) -> Result<f64> {
    let s = path.sites();
    let mut acc = 0.0;
    for &y in &s[..s.len() - 1] {
        acc += field.value(y)?;
    }
    Ok(acc)
}

/// `β⁻¹ log Π_x(x_{m,n}) = Σ_{k<n} ω_{x_k} − B(x, x_n)` for a path started at `x`.
pub fn log_path_probability(busemann: &BusemannField, field: &WeightField, path: &PolymerPath) -> Result<f64> {
    let b = busemann.cocycle(path.start(), path.end())?;
    Ok(weight_sum(field, path)? - b)
}

/// `Π_x(x_{m,n}) = exp(β(Σ ω − B(x, x_n)))`.
pub fn exact_path_probability(busemann: &BusemannField, field: &WeightField, path: &PolymerPath) -> Result<f64> {
    let l = log_path_probability(busemann, field, path)?;
    Ok(finite_beta(busemann)?.boltzmann(l))
}

fn finite_beta(b: &BusemannField) -> Result<crate::partition::Beta> {
    if b.beta().is_infinite() {
        return Err(Error::param("path measures need finite beta"));
    }
    Ok(b.beta())
}

fn table_from(field: &WeightField, busemann: &BusemannField, x: Site, steps: i64) -> Result<PartitionTable> {
    let w = Window::spanning(x, x + Site::new(steps, steps))?;
    let w = w.intersect(field.window()).ok_or_else(|| Error::OutOfWindow {
        site: x,
        window: field.window().to_string(),
    })?;
    p2p_table(field, x, w, busemann.beta(), Mode::FromAnchor)
}

/// Both sides of the consistency relation over every path to a level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DlrReport {
    pub paths: usize,
    /// `max |Π_x(path) − Π_x(X_n = x_n) Q_{x,x_n}(path)|`.
    pub max_discrepancy: f64,
    /// `|Σ_paths Π_x(path) − 1|`.
    pub mass_defect: f64,
}

/// Enumerate every path from `x` to `level`, at most [`DLR_MAX_STEPS`] steps,
/// and compare `Π_x(path)` with `Π_x(X_n = x_n) · Q_{x,x_n}(path)`.
///
/// The marginal `Π_x(X_n = y)` is summed over the enumerated paths; `Q` is
/// read from a point-to-point table.
pub fn dlr_consistency_check(busemann: &BusemannField, field: &WeightField, x: Site, level: i64) -> Result<DlrReport> {
    let beta = finite_beta(busemann)?;
    let steps = level - x.level();
    if steps > DLR_MAX_STEPS {
        return Err(Error::Size {
            steps,
            limit: DLR_MAX_STEPS,
        });
    }
    if steps < 0 {
        return Err(Error::param(format!("level {level} lies below {x}")));
    }
    let table = table_from(field, busemann, x, steps)?;
    let mut rows: Vec<(f64, f64, Site)> = Vec::with_capacity(1 << steps);
    let mut marginal: HashMap<Site, f64> = HashMap::new();
    let mut buf = Vec::with_capacity(steps as usize);
    for mask in 0u64..(1u64 << steps) {
        buf.clear();
        buf.extend((0..steps).map(|k| if mask >> k & 1 == 0 { 1u8 } else { 2u8 }));
        let path = PolymerPath::from_steps(x, &buf)?;
        let sum = weight_sum(field, &path)?;
        let pi = beta.boltzmann(sum - busemann.cocycle(x, path.end())?);
        *marginal.entry(path.end()).or_insert(0.0) += pi;
        rows.push((pi, sum, path.end()));
    }
    let mut worst: f64 = 0.0;
    let mut total = 0.0;
    for &(pi, sum, y) in &rows {
        let q = beta.boltzmann(sum - table.get(y)?.value());
        worst = worst.max((pi - marginal[&y] * q).abs());
        total += pi;
    }
    Ok(DlrReport {
        paths: rows.len(),
        max_discrepancy: worst,
        mass_defect: (total - 1.0).abs(),
    })
}

/// `|Σ_{|y−x|₁=k} Z_{x,y} e^{−βB(x,y)} − 1|` for `k = 1, …, max_steps`.
pub fn level_mass_defects(
    busemann: &BusemannField,
    field: &WeightField,
    x: Site,
    max_steps: i64,
) -> Result<Vec<(i64, f64)>> {
    let beta = finite_beta(busemann)?;
    let c = busemann.window().corner();
    if c.u - x.u < max_steps || c.v - x.v < max_steps {
        return Err(Error::param(format!(
            "field window {} cannot hold {max_steps} steps from {x}",
            busemann.window()
        )));
    }
    if let Some(h) = busemann.horizon_level() {
        if x.level() + max_steps > h {
            return Err(Error::Horizon(format!("{max_steps} steps from {x} cross horizon {h}")));
        }
    }
    let table = table_from(field, busemann, x, max_steps)?;
    let b = busemann.cocycle_from(x)?;
    Ok((1..=max_steps)
        .map(|k| {
            let mass: f64 = (0..=k)
                .map(|a| {
                    let y = x + Site::new(a, k - a);
                    beta.boltzmann(table.at(y) - b[y])
                })
                .sum();
            (k, (mass - 1.0).abs())
        })
        .collect())
}

/// One point of a rate curve at `y = x + (a, n − a)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRow {
    pub t: f64,
    pub y: Site,
    /// `−n⁻¹ (F_{x,y} − B(x,y))`.
    pub rate: f64,
    /// The same quantity from the forward chain's hitting distribution.
    pub rate_chain: f64,
    /// `−ĥ·ζ − Λ̂(ζ)` and its standard error, at shape-grid directions.
    pub predicted: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateProfile {
    pub n: i64,
    pub rows: Vec<RateRow>,
    /// `max |rate − rate_chain|`.
    pub identity_residual: f64,
}

impl RateProfile {
    /// Rows `(t, rate, predicted, se)`; missing predictions are `nan`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        csv::write(
            path,
            &["t", "rate", "predicted", "se"],
            self.rows.iter().map(|r| {
                let (p, se) = r.predicted.unwrap_or((f64::NAN, f64::NAN));
                vec![fmt_real(r.t), fmt_real(r.rate), fmt_real(p), fmt_real(se)]
            }),
        )
    }
}

/// `−n⁻¹ β⁻¹ log Π_x(X_n = y)` for every `y` at distance `n` from `x`, in
/// two ways: through `Π_x(y) = Z_{x,y} e^{−βB(x,y)}` and through the forward
/// chain's hitting distribution. Where `shape` has a matching direction the
/// row also carries `−ĥ·ζ − Λ̂(ζ)`.
pub fn ldp_rate_profile(
    busemann: &BusemannField,
    field: &WeightField,
    x: Site,
    n: i64,
    h_hat: [f64; 2],
    shape: Option<&ShapeEstimate>,
) -> Result<RateProfile> {
    if n < 1 {
        return Err(Error::param("distance must be positive"));
    }
    let bw = *busemann.window();
    let c = bw.corner();
    if c.u - x.u < n || c.v - x.v < n {
        return Err(Error::param(format!(
            "field window {bw} cannot hold {n} steps from {x}"
        )));
    }
    let beta = busemann.beta();
    let table = table_from(field, busemann, x, n)?;
    let b = busemann.cocycle_from(x)?;

    // M(y) = β⁻¹ log Π_x(X = y), built from the chain's one-step weights
    let region = Window::spanning(x, x + Site::new(n, n))?;
    let mut m = Grid::filled(region, f64::NEG_INFINITY);
    m[x] = 0.0;
    for k in 1..=n {
        for a in 0..=k {
            let y = x + Site::new(a, k - a);
            let arm = |p: Site, i: usize| {
                if p >= x {
                    let bi = if i == 1 { busemann.b1(p) } else { busemann.b2(p) };
                    m[p] + field.at(p) - bi
                } else {
                    f64::NEG_INFINITY
                }
            };
            m[y] = beta.combine(arm(y - E1, 1), arm(y - E2, 2));
        }
    }

    let nf = n as f64;
    let mut rows = Vec::with_capacity(n as usize + 1);
    let mut worst: f64 = 0.0;
    for a in 0..=n {
        let y = x + Site::new(a, n - a);
        let t = a as f64 / nf;
        let rate = -(table.at(y) - b[y]) / nf;
        let rate_chain = -m[y] / nf;
        if rate.is_finite() && rate_chain.is_finite() {
            worst = worst.max((rate - rate_chain).abs());
        }
        let predicted = shape.and_then(|s| {
            let ti = s.t_grid.iter().position(|&g| direction_target(g, n) == y - x)?;
            let l = s.lambda_at(ti);
            let zeta = [t, 1.0 - t];
            Some((-(h_hat[0] * zeta[0] + h_hat[1] * zeta[1]) - l.mean, l.se))
        });
        rows.push(RateRow {
            t,
            y,
            rate,
            rate_chain,
            predicted,
        });
    }
    Ok(RateProfile {
        n,
        rows,
        identity_residual: worst,
    })
}

/// `max_{y <= x, |x−y|₁ = n} Π_y(x)` for each `n`, where `Π_y(x)` is the
/// probability that the forward chain from `y` hits `x`, computed exactly by
/// dynamic programming.
pub fn rooted_mass_decay(forward: &TransitionField, x: Site, levels: &[i64]) -> Result<Vec<(i64, f64)>> {
    let k = levels.iter().copied().max().unwrap_or(0);
    if levels.iter().any(|&n| n < 0) {
        return Err(Error::param("distances must be nonnegative"));
    }
    let region = Window::spanning(x - Site::new(k, k), x)?;
    if !forward.window().contains_window(&region) && k > 0 {
        // x itself needs no transition
        let below = Window::spanning(x - Site::new(k, k), x)?;
        if !below.sites().filter(|&y| y != x).all(|y| forward.window().contains(y)) {
            return Err(Error::OutOfWindow {
                site: region.origin,
                window: forward.window().to_string(),
            });
        }
    }
    let mut hit = Grid::filled(region, 0.0);
    hit[x] = 1.0;
    let top = x.level();
    for lv in (top - k..top).rev() {
        for y in region.level_sites(lv) {
            let up = |z: Site| if region.contains(z) { hit[z] } else { 0.0 };
            let p = forward.p_at(y);
            hit[y] = p * up(y + E1) + (1.0 - p) * up(y + E2);
        }
    }
    Ok(levels
        .iter()
        .map(|&n| {
            let m = (0..=n).map(|a| hit[x - Site::new(a, n - a)]).fold(0.0, f64::max);
            (n, m)
        })
        .collect())
}

/// Rows `(n, max_hit)`.
pub fn write_decay_csv(rows: &[(i64, f64)], path: impl AsRef<Path>) -> Result<()> {
    csv::write(
        path,
        &["n", "max_hit"],
        rows.iter().map(|&(n, m)| vec![n.to_string(), fmt_real(m)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{busemann_from_p2l, busemann_from_p2p};
    use crate::env::{generate_field, WeightSpec};
    use crate::partition::{ln_path_count, Beta};

    #[test]
    fn empty_path_has_probability_one() {
        let f = generate_field(WeightSpec::standard_gaussian(), 3, Window::square(12)).unwrap();
        let b = busemann_from_p2l(&f, Beta::ONE, [0.0, 0.0], 11).unwrap();
        let p = exact_path_probability(&b, &f, &PolymerPath::single(Site::new(2, 2))).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn dlr_on_small_window() {
        let f = generate_field(WeightSpec::standard_gaussian(), 3, Window::square(16)).unwrap();
        let b = busemann_from_p2p(&f, Beta::ONE, Site::new(15, 15), Window::square(14)).unwrap();
        let r = dlr_consistency_check(&b, &f, Site::new(1, 2), 11).unwrap();
        assert_eq!(r.paths, 256);
        assert!(r.max_discrepancy <= 1e-10);
        assert!(r.mass_defect <= 1e-10);
        assert!(dlr_consistency_check(&b, &f, Site::new(0, 0), 21).is_err());
    }

    #[test]
    fn level_mass_is_one() {
        let f = generate_field(WeightSpec::standard_gaussian(), 5, Window::square(41)).unwrap();
        let b = busemann_from_p2l(&f, Beta::new(0.5).unwrap(), [0.2, -0.1], 40).unwrap();
        for (_, d) in level_mass_defects(&b, &f, Site::new(0, 0), 39).unwrap() {
            assert!(d < 1e-8);
        }
    }

    #[test]
    fn constant_weights_rate_is_entropy_gap() {
        let l2 = 2f64.ln();
        let f = generate_field(WeightSpec::Constant { c: 0.0 }, 0, Window::square(41)).unwrap();
        let b = busemann_from_p2l(&f, Beta::ONE, [-l2, -l2], 40).unwrap();
        let prof = ldp_rate_profile(&b, &f, Site::new(0, 0), 30, [-l2, -l2], None).unwrap();
        assert!(prof.identity_residual < 1e-10);
        for r in &prof.rows {
            let want = l2 - ln_path_count(r.y.u, r.y.v) / 30.0;
            assert!((r.rate - want).abs() < 1e-12);
        }
    }

    #[test]
    fn half_walk_hits_with_binomial_probability() {
        let tr = TransitionField::constant(Window::new(Site::new(-70, -70), 71, 71).unwrap(), 0.5).unwrap();
        let rows = rooted_mass_decay(&tr, Site::new(0, 0), &[0, 8, 16, 64]).unwrap();
        assert_eq!(rows[0].1, 1.0);
        for &(n, m) in &rows[1..] {
            let want = (ln_path_count(n / 2, n / 2) - n as f64 * 2f64.ln()).exp();
            assert!((m - want).abs() < 1e-15);
        }
    }
}
