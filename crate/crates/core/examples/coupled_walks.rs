//! Walks driven by one shared uniform field: two adjacent walks under the
//! fair law and under the strip-confined Busemann law, and junction density.
//!
//!     cargo run --release --example coupled_walks

use polymerlab::coupling::{
    coalescence_experiment, coupled_walk, junction_statistics, strip_busemann_law, ConstantLaw, CoupledStepRule,
    CouplingField,
};
use polymerlab::env::{Site, WeightSampler, WeightSpec, ORIGIN};
use polymerlab::partition::Beta;

fn main() -> polymerlab::Result<()> {
    let half = ConstantLaw(0.5);
    let rule = CoupledStepRule::new(&half);
    let thetas = CouplingField::new(9);
    let w = coupled_walk(&rule, &thetas, ORIGIN, 20)?;
    println!(
        "a fair walk: {:?}",
        w.path.sites().iter().map(|s| (s.u, s.v)).collect::<Vec<_>>()
    );

    let pairs = [(Site::new(0, 1), Site::new(1, 0))];
    let seeds: Vec<u64> = (0..200).collect();
    let fair = coalescence_experiment(&rule, &pairs, 5000, &seeds)?;
    println!(
        "fair law: {:.3} coalesced within 5000 levels",
        fair.fraction_coalesced()
    );

    let weights = WeightSampler::new(WeightSpec::standard_gaussian(), 2)?;
    let strip = strip_busemann_law(&weights, ORIGIN, Beta::new(1.0)?, [0.0, 0.0], 0.5, 500, 6000)?;
    let st = coalescence_experiment(&CoupledStepRule::new(&strip), &pairs, 5000, &seeds)?;
    println!(
        "Busemann law: {:.3} coalesced, {:.3} censored, {} post-merge violations",
        st.fraction_coalesced(),
        st.fraction_censored(),
        st.post_merge_violations()
    );

    for side in [16, 32, 64] {
        let j = junction_statistics(&rule, ORIGIN, side, &CouplingField::new(4))?;
        println!(
            "side {side:>2}: {} junctions, {} trees, density {:.4}, identity {}",
            j.junctions,
            j.trees,
            j.density(),
            j.forest_identity_holds()
        );
    }
    Ok(())
}
