//! Estimate the point-to-point shape function `Λ(t)` on a small direction grid,
//! then read off the tilt dual to the diagonal.
//!
//!     cargo run --release --example shape_function

use polymerlab::cocycle::{dual_tilt, estimate_shape};
use polymerlab::env::WeightSpec;
use polymerlab::partition::Beta;

fn main() -> polymerlab::Result<()> {
    let ts = [0.3, 0.4, 0.5, 0.6, 0.7];
    let est = estimate_shape(
        WeightSpec::standard_gaussian(),
        Beta::new(1.0)?,
        &ts,
        &[100, 200, 400],
        20,
        11,
    )?;
    for (i, &t) in est.t_grid.iter().enumerate() {
        let m = est.lambda_at(i);
        println!("Lambda({t:.1}) = {:.4} ± {:.4}", m.mean, m.se);
    }
    // finite-size trend along the diagonal
    for p in est.trend(0.5)? {
        println!("  n = {:>3}: {:.4}", p.n, p.lambda.mean);
    }
    println!("symmetry defect {:.2} standard errors", est.symmetry_defect());
    let d = dual_tilt(&est, 0.5)?;
    println!(
        "dual tilt {:.4?} (se {:.4?}), point-to-line check {:.4} ± {:.4}",
        d.tilt, d.tilt_se, d.pl.mean, d.pl.se
    );
    Ok(())
}
