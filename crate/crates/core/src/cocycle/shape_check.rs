use super::BusemannField;
use crate::env::Site;
use crate::error::{Error, Result};

/// `max_{x∈D_n} |B(0, x) − m̂·x| / n` for each requested `n`, where `0` is the
/// window origin and `D_n` the sites `x >= 0` with `|x|₁ = n`.
pub fn cocycle_shape_check(busemann: &BusemannField, m_hat: [f64; 2], n_list: &[i64]) -> Result<Vec<(i64, f64)>> {
    let w = *busemann.window();
    let root = w.origin;
    let c = w.corner();
    for &n in n_list {
        if n < 1 || c.u - root.u < n || c.v - root.v < n {
            return Err(Error::param(format!(
                "window {w} does not contain the level set at distance {n}"
            )));
        }
        if let Some(h) = busemann.horizon_level() {
            if root.level() + n >= h {
                return Err(Error::Horizon(format!("distance {n} reaches the horizon level {h}")));
            }
        }
    }
    let b = busemann.cocycle_from(root)?;
    Ok(n_list
        .iter()
        .map(|&n| {
            let dev = (0..=n)
                .map(|a| {
                    let x = Site::new(a, n - a);
                    (b[root + x] - x.dot(m_hat)).abs()
                })
                .fold(0.0, f64::max);
            (n, dev / n as f64)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::busemann_from_p2l;
    use crate::env::{generate_field, WeightSpec, Window};
    use crate::partition::Beta;

    #[test]
    fn constant_cocycle_is_linear() {
        let l2 = 2f64.ln();
        let f = generate_field(WeightSpec::Constant { c: 0.0 }, 0, Window::square(41)).unwrap();
        let b = busemann_from_p2l(&f, Beta::ONE, [-l2, -l2], 40).unwrap();
        for (_, d) in cocycle_shape_check(&b, [l2, l2], &[5, 10, 20]).unwrap() {
            assert!(d < 1e-12);
        }
        let off = cocycle_shape_check(&b, [l2 + 0.1, l2], &[20]).unwrap();
        assert!((off[0].1 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn too_small_window_rejected() {
        let f = generate_field(WeightSpec::standard_gaussian(), 0, Window::square(11)).unwrap();
        let b = busemann_from_p2l(&f, Beta::ONE, [0.0, 0.0], 10).unwrap();
        assert!(cocycle_shape_check(&b, [0.0, 0.0], &[10]).is_err());
        assert!(cocycle_shape_check(&b, [0.0, 0.0], &[9]).is_ok());
    }
}
