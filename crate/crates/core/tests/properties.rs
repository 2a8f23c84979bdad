use proptest::prelude::*;

use cspdich::algebra::num::{int, ratio};
use cspdich::algebra::{Signature, VarSet};
use cspdich::classify::{is_delta_matroid, is_terraced};
use cspdich::eval::{brute_force_z, eval_auto, exact_z};
use cspdich::gen;
use cspdich::reduce::{signatures_to_weights, weights_to_signatures};

fn signature(k: usize) -> impl Strategy<Value = Signature> {
    prop::collection::vec((0i64..5, 1i64..4), 1 << k).prop_map(|entries| {
        Signature::numbered(entries.into_iter().map(|(n, d)| ratio(n, d)).collect()).unwrap()
    })
}

fn relation(k: usize) -> impl Strategy<Value = Signature> {
    any::<u32>().prop_map(move |mask| {
        Signature::relation(VarSet::numbered(k), (0..1u64 << k).filter(|x| mask >> x & 1 == 1)).unwrap()
    })
}

proptest! {
    #[test]
    fn flip_is_an_involution(f in signature(3), u in 0u64..8) {
        prop_assert_eq!(f.flip_mask(u).flip_mask(u), f);
    }

    #[test]
    fn h_maximize_is_idempotent(f in signature(3), h in prop::collection::vec(-2i64..=2, 3)) {
        prop_assume!(!f.is_zero());
        let once = f.h_maximize(&h).unwrap();
        prop_assert_eq!(once.h_maximize(&h).unwrap(), once.clone());
        prop_assert!(once.support().iter().all(|&x| f.in_support(x)));
    }

    #[test]
    fn summing_out_preserves_total(f in signature(4), mask in 0u64..16) {
        let total: cspdich::algebra::Rational = f.table().iter().sum();
        let reduced: cspdich::algebra::Rational = f.sum_out(mask).table().iter().sum();
        prop_assert_eq!(total, reduced);
    }

    #[test]
    fn tensor_values_multiply(f in signature(2), g in signature(1)) {
        let g = g.rename(["z"]).unwrap();
        let t = f.tensor(&g).unwrap();
        for x in 0..8u64 {
            prop_assert_eq!(t.value(x).clone(), f.value(x & 3) * g.value(x >> 2));
        }
    }

    #[test]
    fn delta_matroids_are_terraced(r in relation(4)) {
        prop_assert_eq!(is_delta_matroid(&r).unwrap().member, is_terraced(&r).member);
    }

    #[test]
    fn evaluators_agree(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let family = [gen::random_signature(&mut rng, 2, 0.3), gen::random_signature(&mut rng, 3, 0.3)];
        let inst = gen::random_instance(&mut rng, &family, 7, 6, 5);
        let z = brute_force_z(&inst).unwrap();
        prop_assert_eq!(exact_z(&inst).unwrap(), z.clone());
        prop_assert_eq!(eval_auto(&inst).unwrap().0, z);
    }

    #[test]
    fn weights_round_trip(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let family = [gen::random_signature(&mut rng, 2, 0.2)];
        let inst = gen::random_instance(&mut rng, &family, 5, 4, 4);
        let (forward, registry) = weights_to_signatures(&inst).unwrap();
        prop_assert!(forward.verify(&inst).unwrap());
        let back = signatures_to_weights(&forward.output, &registry).unwrap();
        prop_assert!(back.verify(&forward.output).unwrap());
    }
}

#[test]
fn all_ones_signature_is_everything_tractable() {
    let f = Signature::numbered(vec![int(1); 4]).unwrap();
    assert!(is_terraced(&f).member);
}
