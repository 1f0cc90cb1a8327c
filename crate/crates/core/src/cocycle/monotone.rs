use super::{BusemannField, Provenance};
use crate::error::{Error, Result};

pub const MONOTONE_TOL: f64 = 1e-12;

/// Outcome of comparing two tilted fields on the same environment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub sites: usize,
    pub violations: usize,
    /// Smallest `b1^h − b1^{h'}`.
    pub min_margin_e1: f64,
    /// Smallest `b2^{h'} − b2^h`.
    pub min_margin_e2: f64,
}

/// `true` when `h·e1 <= h'·e1` and `h·e2 >= h'·e2`.
pub fn tilts_ordered(h: [f64; 2], hp: [f64; 2]) -> bool {
    h[0] <= hp[0] && h[1] >= hp[1]
}

/// Check `b1^h >= b1^{h'}` and `b2^h <= b2^{h'}` site by site.
///
/// Both fields must come from point-to-line tables with the same horizon on
/// the same environment. If the tilts are ordered the other way round the
/// fields are swapped.
pub fn check_monotonicity(a: &BusemannField, b: &BusemannField) -> Result<MonotonicityReport> {
    let (ha, na) = p2l_parts(a)?;
    let (hb, nb) = p2l_parts(b)?;
    if na != nb {
        return Err(Error::param(format!("horizons differ: {na} vs {nb}")));
    }
    if a.env_fingerprint() != b.env_fingerprint() {
        return Err(Error::Provenance("fields were built on different environments".into()));
    }
    if a.window() != b.window() || a.beta() != b.beta() {
        return Err(Error::param("fields differ in window or beta"));
    }
    let (lo, hi) = if tilts_ordered(ha, hb) {
        (a, b)
    } else if tilts_ordered(hb, ha) {
        (b, a)
    } else {
        return Err(Error::param(format!("tilts {ha:?} and {hb:?} are not comparable")));
    };
    let mut rep = MonotonicityReport {
        sites: 0,
        violations: 0,
        min_margin_e1: f64::INFINITY,
        min_margin_e2: f64::INFINITY,
    };
    for y in lo.recovery_sites() {
        let m1 = lo.b1(y) - hi.b1(y);
        let m2 = hi.b2(y) - lo.b2(y);
        rep.sites += 1;
        rep.min_margin_e1 = rep.min_margin_e1.min(m1);
        rep.min_margin_e2 = rep.min_margin_e2.min(m2);
        if m1 < -MONOTONE_TOL || m2 < -MONOTONE_TOL {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

fn p2l_parts(f: &BusemannField) -> Result<([f64; 2], i64)> {
    match *f.provenance() {
        Provenance::PointToLine { tilt, level } => Ok((tilt, level)),
        _ => Err(Error::param("monotonicity needs point-to-line fields")),
    }
}
