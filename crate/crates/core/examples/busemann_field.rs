//! Finite-horizon Busemann fields from point-to-line and point-to-point
//! partition functions: recovery, closure and ordering in the tilt.
//!
//!     cargo run --release --example busemann_field

use polymerlab::cocycle::{busemann_from_p2l, busemann_from_p2p, check_monotonicity};
use polymerlab::env::{generate_field, Site, WeightSpec, Window, E1, E2, ORIGIN};
use polymerlab::partition::Beta;

fn main() -> polymerlab::Result<()> {
    let beta = Beta::new(1.0)?;
    let field = generate_field(WeightSpec::standard_gaussian(), 3, Window::square(201))?;

    let lo = busemann_from_p2l(&field, beta, [0.0, 0.0], 200)?;
    let hi = busemann_from_p2l(&field, beta, [0.4, -0.4], 200)?;
    println!(
        "recovery {:.2e}  closure {:.2e}",
        lo.recovery_residual(&field),
        lo.closure_residual()
    );
    println!("b(0, e1) = {:.4}  b(0, e2) = {:.4}", lo.b1(ORIGIN), lo.b2(ORIGIN));
    let path = [ORIGIN, ORIGIN + E1, ORIGIN + E1 + E2, ORIGIN + E1 + E2 + E2];
    println!(
        "cocycle along a path {:.6}, direct {:.6}",
        lo.sum_along(&path)?,
        lo.cocycle(ORIGIN, path[3])?
    );

    let m = check_monotonicity(&lo, &hi)?;
    println!(
        "tilt ordering over {} sites: {} violations, margins {:.3e} / {:.3e}",
        m.sites, m.violations, m.min_margin_e1, m.min_margin_e2
    );

    let p2p = busemann_from_p2p(&field, beta, Site::new(200, 200), Window::square(50))?;
    println!(
        "diagonal point-to-point field: b1(0) = {:.4}  closure {:.2e}",
        p2p.b1(ORIGIN),
        p2p.closure_residual()
    );
    Ok(())
}
