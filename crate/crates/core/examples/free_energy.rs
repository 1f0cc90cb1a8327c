//! Point-to-point and tilted point-to-line free energies on a Gaussian field,
//! cross-checked against brute-force path enumeration and traced through the
//! zero-temperature limit.
//!
//!     cargo run --release --example free_energy

use polymerlab::env::{generate_field, Site, WeightSpec, Window, ORIGIN};
use polymerlab::partition::{beta_limit_check, enumerate_oracle, p2l_table, p2p_table, Beta, Mode, OracleTarget};

fn main() -> polymerlab::Result<()> {
    let field = generate_field(WeightSpec::standard_gaussian(), 7, Window::square(9))?;
    let beta = Beta::new(1.0)?;

    let table = p2p_table(&field, ORIGIN, Window::square(9), beta, Mode::FromAnchor)?;
    let y = Site::new(5, 6);
    let brute = enumerate_oracle(&field, ORIGIN, OracleTarget::Point(y), beta, None)?;
    println!("F(0, {y}) = {:.12}  enumeration {:.12}", table.at(y), brute.0);
    println!("recursion residual {:.2e}", table.recursion_residual(&field));

    let tilt = [0.2, -0.1];
    let line = p2l_table(&field, beta, tilt, 8)?;
    let brute = enumerate_oracle(&field, ORIGIN, OracleTarget::Line { level: 8, tilt }, beta, None)?;
    println!(
        "F_pl(0; h = {tilt:?}) = {:.12}  enumeration {:.12}",
        line.at(ORIGIN),
        brute.0
    );

    let betas: Vec<Beta> = [0.5, 1.0, 2.0, 8.0, 32.0]
        .iter()
        .map(|&b| Beta::new(b))
        .collect::<polymerlab::Result<_>>()?;
    let lim = beta_limit_check(&field, ORIGIN, Site::new(8, 8), &betas)?;
    println!("last passage G = {:.6}", lim.last_passage);
    for row in &lim.rows {
        println!(
            "  beta {:>5}: F - G = {:.6}  (bound {:.6})",
            row.beta, row.gap, row.bound
        );
    }
    println!("sandwich {}  monotone {}", lim.sandwich_ok, lim.monotone_ok);
    Ok(())
}
