use nfl_core::algorithms::mutate_k_flips;
use nfl_core::gp::{mutate_tree, random_tree, subtree_crossover, TreeGen};
use nfl_core::{
    duel, AlgorithmSpec, BitGenotype, DuelSeeding, EngineParams, GpObjective, GpTree, RngStream,
    TableFunction,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn k_flips_move_exactly_k(bits in any::<u16>(), k in 1u32..=16, seed in any::<u64>()) {
        let g = BitGenotype::new(bits as u64, 16).unwrap();
        let h = mutate_k_flips(g, k, &mut RngStream::new(seed));
        prop_assert_eq!(g.hamming(&h), k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn tree_text_round_trip(seed in any::<u64>()) {
        let t = random_tree(6, &TreeGen::default(), &mut RngStream::new(seed));
        let back: GpTree = t.to_string().parse().unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn table_bytes_round_trip(seed in any::<u64>(), m in 1u32..=64) {
        let t = TableFunction::random(6, m, &mut RngStream::new(seed)).unwrap();
        prop_assert_eq!(TableFunction::from_bytes(&t.to_bytes()).unwrap(), t);
    }
}

#[test]
fn variation_keeps_trees_valid() {
    let gen = TreeGen::default();
    let mut rng = RngStream::new(21);
    let mut pool: Vec<GpTree> = (0..20).map(|_| random_tree(6, &gen, &mut rng)).collect();
    for i in 0..10_000 {
        let a = &pool[i % pool.len()];
        let b = &pool[(i * 7 + 3) % pool.len()];
        let child = if i % 2 == 0 {
            subtree_crossover(a, b, 6, &mut rng)
        } else {
            mutate_tree(a, 6, &gen, &mut rng)
        };
        assert!(child.depth() <= 6, "{child}");
        assert!(GpTree::from_prefix(child.nodes().to_vec()).is_ok(), "{child}");
        let slot = i % pool.len();
        pool[slot] = child;
    }
}

#[test]
fn paired_self_duels_are_exactly_zero() {
    let engine = EngineParams::default();
    let mut rng = RngStream::new(5);
    for name in AlgorithmSpec::preset_names() {
        let p = AlgorithmSpec::preset(&name).unwrap();
        for f in 0..2u64 {
            let stream = RngStream::new(f);
            let d = if p.encoding_length == 32 {
                let t = random_tree(6, &TreeGen::default(), &mut rng);
                duel(&GpObjective::new(&t), &p, &p, 10, &engine, &stream, DuelSeeding::Paired)
            } else {
                let t = TableFunction::random(16, 8, &mut rng).unwrap();
                duel(&t, &p, &p, 10, &engine, &stream, DuelSeeding::Paired)
            }
            .unwrap();
            assert_eq!(d.fitness, 0.0, "{name}");
        }
    }
}
