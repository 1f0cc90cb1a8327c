//! The spanning tree of backward polymer chains from the origin, its
//! competition interface, and the interface chain that samples the same law.
//!
//!     cargo run --release --example competition_interface

use polymerlab::cif::{
    build_tree, competition_interface, direction_summary, interface_chain, interface_transitions, separation_violations,
};
use polymerlab::coupling::CouplingField;
use polymerlab::env::{generate_field, WeightSpec, Window, ORIGIN};
use polymerlab::gibbs::backward_transitions;
use polymerlab::partition::{p2p_table, Beta, Mode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> polymerlab::Result<()> {
    let steps = 400;
    let field = generate_field(WeightSpec::standard_gaussian(), 1, Window::square(steps + 2))?;
    let table = p2p_table(&field, ORIGIN, *field.window(), Beta::new(1.0)?, Mode::FromAnchor)?;
    let backward = backward_transitions(&table, &field)?;

    let mut tree_dirs = Vec::new();
    for s in 0..300 {
        let tree = build_tree(&backward, CouplingField::new(s))?;
        let cif = competition_interface(&tree, steps)?;
        if s == 0 {
            println!(
                "first interface ends at {}, separation violations {}",
                cif.path.end(),
                separation_violations(&tree, &cif)?
            );
        }
        tree_dirs.push(cif.direction());
    }

    let kernel = interface_transitions(&table, &field)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let chain_dirs: Vec<f64> = (0..300)
        .map(|_| interface_chain(&kernel, steps, &mut rng).map(|r| r.direction()))
        .collect::<polymerlab::Result<_>>()?;

    let a = direction_summary(&tree_dirs, 0.001, 0.01);
    let b = direction_summary(&chain_dirs, 0.001, 0.01);
    println!("tree : median {:.3}, largest atom {:.3}", a.median, a.largest_atom);
    println!("chain: median {:.3}, largest atom {:.3}", b.median, b.largest_atom);
    Ok(())
}
