//! Reproducibility of fields, coupled walks and spanning trees, and
//! independence of the random streams.

use proptest::prelude::*;

use polymerlab::cif::{build_tree, competition_interface, interface_chain, interface_transitions};
use polymerlab::coupling::{coupled_walk, ConstantLaw, CoupledStepRule, CouplingField};
use polymerlab::env::{generate_field, Site, WeightSpec, Window, ORIGIN};
use polymerlab::gibbs::backward_transitions;
use polymerlab::partition::{p2p_table, Beta, Mode};
use polymerlab::stats::two_sample_chi_square;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // A site's weight does not depend on the window it is generated in.
    #[test]
    fn windows_agree_on_overlap(seed in any::<u64>(), u in 0i64..20, v in 0i64..20, du in 0i64..5, dv in 0i64..5) {
        let spec = WeightSpec::InverseLogGamma { shape: 1.5 };
        let a = generate_field(spec, seed, Window::square(30)).unwrap();
        let b = generate_field(spec, seed, Window::new(Site::new(u, v), 10, 10).unwrap()).unwrap();
        let s = Site::new(u + du, v + dv);
        prop_assert_eq!(a.at(s).to_bits(), b.at(s).to_bits());
    }

    #[test]
    fn coupled_walks_repeat(seed in any::<u64>(), p in 0.05..0.95f64) {
        let law = ConstantLaw(p);
        let rule = CoupledStepRule::new(&law);
        let a = coupled_walk(&rule, &CouplingField::new(seed), ORIGIN, 200).unwrap();
        let b = coupled_walk(&rule, &CouplingField::new(seed), ORIGIN, 200).unwrap();
        prop_assert_eq!(a.path.sites(), b.path.sites());
    }

    // Walks through a common site continue together.
    #[test]
    fn coupled_walks_merge_for_good(seed in any::<u64>()) {
        let law = ConstantLaw(0.5);
        let rule = CoupledStepRule::new(&law);
        let th = CouplingField::new(seed);
        let a = coupled_walk(&rule, &th, Site::new(0, 1), 2000).unwrap().path;
        let b = coupled_walk(&rule, &th, Site::new(1, 0), 2000).unwrap().path;
        if let Some(k) = (1..=a.len()).find(|&k| a.sites()[k] == b.sites()[k]) {
            prop_assert_eq!(&a.sites()[k..], &b.sites()[k..]);
        }
    }
}

#[test]
fn weight_and_coupling_streams_differ() {
    let w = generate_field(WeightSpec::Uniform { a: 0.0, b: 1.0 }, 5, Window::square(20)).unwrap();
    let th = CouplingField::new(5);
    let same = w.window().sites().filter(|&s| w.at(s) == th.theta(s)).count();
    assert_eq!(same, 0);
}

fn tree_fixture() -> (polymerlab::env::WeightField, polymerlab::partition::PartitionTable) {
    let field = generate_field(WeightSpec::standard_gaussian(), 21, Window::square(62)).unwrap();
    let table = p2p_table(
        &field,
        ORIGIN,
        *field.window(),
        Beta::new(1.0).unwrap(),
        Mode::FromAnchor,
    )
    .unwrap();
    (field, table)
}

#[test]
fn spanning_tree_is_a_function_of_its_seeds() {
    let (field, table) = tree_fixture();
    let bw = backward_transitions(&table, &field).unwrap();
    let a = competition_interface(&build_tree(&bw, CouplingField::new(3)).unwrap(), 60).unwrap();
    let b = competition_interface(&build_tree(&bw, CouplingField::new(3)).unwrap(), 60).unwrap();
    assert_eq!(a.path.sites(), b.path.sites());
    let others = (4..40)
        .map(|s| competition_interface(&build_tree(&bw, CouplingField::new(s)).unwrap(), 60).unwrap())
        .filter(|c| c.path.sites() != a.path.sites())
        .count();
    assert!(others > 0);
}

// The interface read off the tree and the interface chain share one law.
#[test]
fn tree_and_chain_interfaces_agree_in_law() {
    let (field, table) = tree_fixture();
    let bw = backward_transitions(&table, &field).unwrap();
    let kernel = interface_transitions(&table, &field).unwrap();
    let n = 60;
    let tree: Vec<i64> = (0..1500)
        .map(|s| {
            let t = build_tree(&bw, CouplingField::new(1000 + s)).unwrap();
            competition_interface(&t, n).unwrap().path.end().u
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let chain: Vec<i64> = (0..1500)
        .map(|_| interface_chain(&kernel, n, &mut rng).unwrap().path.end().u)
        .collect();
    let chi = two_sample_chi_square(&tree, &chain, 20);
    assert!(chi.p_value > 1e-3, "{chi:?}");
}
