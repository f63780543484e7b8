//! Property tests over randomly drawn chains and instances.

use dgp1_core::{bp, instance, mvm};
use proptest::prelude::*;

fn chain_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..10.0f64, 1..=10)
}

fn instance_strategy() -> impl Strategy<Value = instance::ParadoxicalInstance> {
    (2usize..=10, any::<u64>(), prop::bool::ANY).prop_map(|(n, seed, feasible)| {
        if feasible {
            instance::generate_feasible(n, seed, 10.0).unwrap()
        } else {
            instance::generate_random(n, seed, 10.0).unwrap()
        }
    })
}

proptest! {
    #[test]
    fn augmentation_appends_the_closing_distance(inst in instance_strategy()) {
        let aug = inst.augment();
        prop_assert_eq!(aug.y().len(), inst.n());
        prop_assert_eq!(*aug.y().last().unwrap(), inst.closing());
        prop_assert_eq!(&aug.y()[..inst.n() - 1], inst.consecutive());
    }

    #[test]
    fn json_round_trip_is_identity(inst in instance_strategy(), label in prop::option::of("[a-z]{1,8}")) {
        let inst = match label {
            Some(l) => inst.with_label(l),
            None => inst,
        };
        let text = instance::serialize(&inst);
        let back = instance::parse(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(instance::serialize(&back), text);
    }

    #[test]
    fn codec_round_trip(signs in prop::collection::vec(prop::sample::select(vec![-1i8, 1]), 1..=16)) {
        let i = mvm::encode_signs(&signs).unwrap();
        prop_assert_eq!(mvm::decode_row(i, signs.len()).unwrap(), signs);
    }

    #[test]
    fn solution_sets_close_under_global_flip(y in chain_strategy(), eps in 0.0..2.0f64) {
        let aug = instance::AugmentedInstance::from_chain(y).unwrap();
        let sols = bp::solve_bp(&aug, eps).unwrap();
        for r in &sols {
            let mirrored: Vec<i8> = r.signs.iter().map(|s| -s).collect();
            prop_assert!(sols.iter().any(|o| o.signs == mirrored));
        }
    }

    #[test]
    fn every_realization_recomputes_bit_exactly(y in chain_strategy()) {
        let aug = instance::AugmentedInstance::from_chain(y).unwrap();
        for r in bp::solve_bp(&aug, 1.0).unwrap() {
            prop_assert!(r.satisfies_recurrence(aug.y()));
        }
    }

    #[test]
    fn layer_sizes_are_powers_of_two(y in chain_strategy(), k_offset in 0usize..4) {
        let aug = instance::AugmentedInstance::from_chain(y).unwrap();
        let k = 1 + k_offset.min(aug.n());
        let layer = bp::enumerate_layer(&aug, k).unwrap();
        prop_assert_eq!(layer.len(), 1usize << (k - 1));
    }

    #[test]
    fn row_negation_symmetry(y in chain_strategy()) {
        let rows = 1u64 << y.len();
        let r = mvm::multiply(&y, 1, rows).unwrap();
        for i in 0..rows as usize {
            let mirror = rows as usize - 1 - i;
            prop_assert_eq!(r.values[i].to_bits(), (-r.values[mirror]).to_bits());
        }
    }

    #[test]
    fn tiling_concatenates_to_the_full_product(y in chain_strategy(), cuts in prop::collection::vec(1u64..=1024, 0..6)) {
        let rows = 1u64 << y.len();
        let full = mvm::multiply(&y, 1, rows).unwrap();
        let mut boundaries: Vec<u64> = cuts.into_iter().map(|c| 1 + c % rows).collect();
        boundaries.push(1);
        boundaries.push(rows + 1);
        boundaries.sort_unstable();
        boundaries.dedup();
        let mut stitched = Vec::new();
        for pair in boundaries.windows(2) {
            stitched.extend(mvm::multiply(&y, pair[0], pair[1] - 1).unwrap().values);
        }
        prop_assert_eq!(stitched.len(), full.values.len());
        for (a, b) in stitched.iter().zip(full.values.iter()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn reconstruction_ends_at_the_row_value(y in chain_strategy(), row_pick in any::<u64>()) {
        let aug = instance::AugmentedInstance::from_chain(y).unwrap();
        let rows = 1u64 << aug.n();
        let i = 1 + row_pick % rows;
        let sol = mvm::reconstruct_solution(i, &aug).unwrap();
        let r = mvm::multiply(aug.y(), i, i).unwrap();
        prop_assert_eq!(sol.positions.last().unwrap().to_bits(), r.values[0].to_bits());
    }
}
