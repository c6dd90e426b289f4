//! Randomized invariants over small digraphs: canonicalization,
//! homomorphism search, the pc/h-maximal ordering and the solver against
//! the generate-and-filter oracle.

use proptest::prelude::*;

use posmod_core::analysis::classify::{hmax_flags, pc_flags};
use posmod_core::analysis::{enumerate_models, naive_enumerate, SearchBudget};
use posmod_core::corpus::s_signature;
use posmod_core::logic::parse::parse_theory;
use posmod_core::morphisms::{
    find_homomorphisms, is_immersion, verify_homomorphism, Homomorphism, ImmersionMode,
};
use posmod_core::structures::{canonical_form, isomorphic, FiniteStructure};

fn arb_digraph() -> impl Strategy<Value = FiniteStructure> {
    (1usize..=4).prop_flat_map(|n| {
        proptest::collection::btree_set(
            (0..n, 0..n).prop_map(|(a, b)| vec![a, b]),
            0..=n * n,
        )
        .prop_map(move |edges| {
            FiniteStructure::new(s_signature(), n, vec![edges], vec![]).unwrap()
        })
    })
}

fn arb_digraph_with_perm() -> impl Strategy<Value = (FiniteStructure, Vec<usize>)> {
    arb_digraph().prop_flat_map(|a| {
        let n = a.size();
        (Just(a), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_permutation_invariant((a, perm) in arb_digraph_with_perm()) {
        let relabeled = a.relabel(&perm);
        prop_assert_eq!(canonical_form(&a), canonical_form(&relabeled));
        let witness = isomorphic(&a, &relabeled).unwrap();
        prop_assert!(witness.is_some());
        // The witness is itself an isomorphism: a bijection matching edges.
        let w = witness.unwrap();
        let mut seen = vec![false; a.size()];
        for &img in &w {
            prop_assert!(!seen[img]);
            seen[img] = true;
        }
        for tuple in a.table(0) {
            let image: Vec<usize> = tuple.iter().map(|&x| w[x]).collect();
            prop_assert!(relabeled.holds(0, &image));
        }
    }

    #[test]
    fn found_homomorphisms_verify_and_compose(
        a in arb_digraph(),
        b in arb_digraph(),
        c in arb_digraph(),
    ) {
        let ab = find_homomorphisms(&a, &b, &[], Some(8)).unwrap();
        let bc = find_homomorphisms(&b, &c, &[], Some(8)).unwrap();
        for f in &ab {
            verify_homomorphism(&a, &b, &f.map).unwrap();
            for g in &bc {
                let composed: Vec<usize> = f.map.iter().map(|&x| g.map[x]).collect();
                verify_homomorphism(&a, &c, &composed).unwrap();
            }
        }
    }

    #[test]
    fn identity_is_an_immersion(a in arb_digraph()) {
        let id = Homomorphism { map: (0..a.size()).collect() };
        prop_assert!(is_immersion(&a, &a, &id, ImmersionMode::Retraction).unwrap().holds());
    }

    #[test]
    fn pc_members_are_h_maximal(axioms in proptest::sample::subsequence(vec![
        "(axiom no-2-cycle (not (exists (x y) (and (S x y) (S y x)))))",
        "(axiom in-func (forall (x y z) (=> (and (S x z) (S y z)) (= x y))))",
        "(axiom no-loop (not (exists (x) (S x x))))",
    ], 0..=3), bound in 1usize..=3) {
        let text = format!("(theory Trand\n  (sig (rel S 2))\n  {})\n", axioms.join("\n  "));
        let theory = parse_theory(&text).unwrap();
        let u = enumerate_models(&theory, bound, &SearchBudget::default()).unwrap();
        let (pc, hmax) = (pc_flags(&u), hmax_flags(&u));
        for i in 0..u.len() {
            prop_assert!(!pc[i] || hmax[i], "member {} is pc but not h-maximal", i);
        }
    }

    #[test]
    fn solver_agrees_with_the_naive_oracle(axioms in proptest::sample::subsequence(vec![
        "(axiom no-2-cycle (not (exists (x y) (and (S x y) (S y x)))))",
        "(axiom in-func (forall (x y z) (=> (and (S x z) (S y z)) (= x y))))",
        "(axiom total (forall (x) (=> true (exists (y) (S x y)))))",
    ], 0..=3)) {
        let text = format!("(theory Trand\n  (sig (rel S 2))\n  {})\n", axioms.join("\n  "));
        let theory = parse_theory(&text).unwrap();
        let fast = enumerate_models(&theory, 3, &SearchBudget::default()).unwrap();
        let naive = naive_enumerate(&theory, 3).unwrap();
        prop_assert_eq!(fast.len(), naive.len());
        for (a, b) in fast.members().iter().zip(naive.members()) {
            prop_assert_eq!(a.serialize(), b.serialize());
        }
    }
}
