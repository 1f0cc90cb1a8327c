//! Path measures: DLR consistency of the Busemann Gibbs measure, exact
//! point-to-point sampling through the backward chain, and rooted-mass decay.
//!
//!     cargo run --release --example polymer_measure

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use polymerlab::cocycle::busemann_from_p2l;
use polymerlab::env::{generate_field, Site, WeightSpec, Window, ORIGIN};
use polymerlab::gibbs::{
    backward_transitions, dlr_consistency_check, forward_chain_sample, rooted_mass_decay, sample_p2p, TransitionField,
};
use polymerlab::partition::{p2p_table, Beta, Mode};

fn main() -> polymerlab::Result<()> {
    let beta = Beta::new(1.0)?;
    let field = generate_field(WeightSpec::standard_gaussian(), 5, Window::square(130))?;
    let b = busemann_from_p2l(&field, beta, [0.0, 0.0], 129)?;

    let dlr = dlr_consistency_check(&b, &field, ORIGIN, 10)?;
    println!(
        "DLR over {} paths: max gap {:.2e}, mass defect {:.2e}",
        dlr.paths, dlr.max_discrepancy, dlr.mass_defect
    );

    let forward = TransitionField::from_busemann(&b, &field)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let walk = forward_chain_sample(&forward, ORIGIN, 60, &mut rng)?;
    println!("forward chain ends at {}", walk.path.end());
    for (n, m) in rooted_mass_decay(&forward, Site::new(32, 32), &[4, 8, 16, 32])? {
        println!("  max hitting probability at distance {n:>2}: {m:.4}");
    }

    let table = p2p_table(&field, ORIGIN, Window::square(41), beta, Mode::FromAnchor)?;
    let backward = backward_transitions(&table, &field)?;
    let y = Site::new(40, 40);
    let mut mid = 0.0;
    for _ in 0..2000 {
        let p = sample_p2p(&backward, y, &mut rng)?;
        mid += p.at_level(40).map_or(0.0, |s| s.u as f64) / 2000.0;
    }
    println!("mean u at level 40 of polymers from 0 to {y}: {mid:.2}");
    Ok(())
}
