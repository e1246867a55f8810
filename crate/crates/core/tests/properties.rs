use std::cmp::Ordering;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use txtfex::diagonalization::{check_stabilizing, Construction};
use txtfex::encodings::{content, finite_set_decode, finite_set_encode, pair, seq_compare, unpair, FiniteSet, Sequence};
use txtfex::harness::suite::RandomScenario;
use txtfex::learners::{guess_features, sample_learner, Learner, PaperLearner, SampleKind};
use txtfex::universe::{diagonal_code, Enumerator, FixedSet, Hypothesis, LearnerId, Registry, UnionOf, Variant};

fn sequence(max_len: usize, max_item: u64) -> impl Strategy<Value = Sequence> {
    prop::collection::vec(0..=max_item, 0..=max_len).prop_map(Sequence::from)
}

proptest! {
    #[test]
    fn unpair_inverts_pair(x in 0u64..1 << 31, y in 0u64..1 << 31) {
        prop_assert_eq!(unpair(pair(x, y).unwrap()), (x, y));
    }

    #[test]
    fn pair_inverts_unpair(z: u64) {
        let (x, y) = unpair(z);
        prop_assert_eq!(pair(x, y).unwrap(), z);
    }

    #[test]
    fn finite_sets_round_trip(n: u64) {
        prop_assert_eq!(finite_set_encode(&finite_set_decode(n)).unwrap(), n);
    }

    #[test]
    fn length_lex_is_a_total_order(a in sequence(4, 3), b in sequence(4, 3), c in sequence(4, 3)) {
        prop_assert_eq!(seq_compare(&a, &b), seq_compare(&b, &a).reverse());
        prop_assert_eq!(seq_compare(&a, &b) == Ordering::Equal, a == b);
        if seq_compare(&a, &b) != Ordering::Greater && seq_compare(&b, &c) != Ordering::Greater {
            prop_assert_ne!(seq_compare(&a, &c), Ordering::Greater);
        }
        if a.len() < b.len() {
            prop_assert_eq!(seq_compare(&a, &b), Ordering::Less);
        }
    }

    #[test]
    fn content_of_a_concatenation(a in sequence(8, 20), b in sequence(8, 20)) {
        prop_assert_eq!(content(&a.concat(&b)), content(&a).union(&content(&b)));
    }

    #[test]
    fn unions_of_fixed_sets_are_monotone(a in prop::collection::btree_set(0u64..50, 0..10), b in prop::collection::btree_set(0u64..50, 0..10), s in 0u64..100) {
        let a: FiniteSet = a.into_iter().collect();
        let b: FiniteSet = b.into_iter().collect();
        let union = UnionOf(Arc::new(FixedSet(a.clone())), Arc::new(FixedSet(b.clone())));
        prop_assert!(union.stage(s).unwrap().is_subset(&union.stage(s + 1).unwrap()));
        prop_assert_eq!(union.stage(s).unwrap(), a.union(&b));
    }

    #[test]
    fn stabilization_is_antimonotone_in_the_stage(sigma in sequence(6, 3), k in 0u64..3, s in 0u64..10) {
        let registry = Registry::new();
        let parity = registry.learner(sample_learner(SampleKind::LengthParity, &registry)).unwrap();
        let later = check_stabilizing(&registry, parity.as_ref(), 0, k, &sigma, s + 1).unwrap().holds();
        let now = check_stabilizing(&registry, parity.as_ref(), 0, k, &sigma, s).unwrap().holds();
        prop_assert!(now || !later);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn paper_learner_is_total_and_reads_only_two_features(sigma in sequence(12, 40), shuffle in any::<u64>()) {
        let m = PaperLearner::new(LearnerId(1));
        let h = m.decide(&sigma);
        // output is a function of (m_σ, n_σ) alone: reorder and repeat items
        let mut items = sigma.items().to_vec();
        if !items.is_empty() {
            let k = (shuffle % items.len() as u64) as usize;
            items.rotate_left(k);
            items.push(items[0]);
        }
        let other = Sequence::from(items);
        prop_assert_eq!(guess_features(&sigma), guess_features(&other));
        prop_assert_eq!(m.decide(&other), h);
        match guess_features(&sigma).m_sigma {
            None => prop_assert_eq!(h, Hypothesis::EMPTY),
            Some(e) => {
                let n = guess_features(&sigma).n_sigma.unwrap();
                let variant = if n.is_multiple_of(2) { Variant::Plain } else { Variant::Hat };
                prop_assert_eq!(h, diagonal_code(LearnerId(1), e, variant).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn diagonal_enumerators_are_monotone(kind in 0usize..3, e in 0u64..3, top in 20u64..120) {
        let registry = Registry::new();
        let id = sample_learner(SampleKind::ALL[kind], &registry);
        for variant in [Variant::Plain, Variant::Hat] {
            let code = registry.register_diagonal(id, e, variant).unwrap();
            let mut previous = FiniteSet::new();
            for s in 0..=top {
                let now = registry.enumerate_to(code, s).unwrap();
                prop_assert!(previous.is_subset(&now));
                prop_assert!(now.iter().all(|x| x >= e && x <= s.max(e)));
                previous = now;
            }
        }
    }

    #[test]
    fn chain_invariant_holds_at_every_stage(kind in 0usize..3, e in 0u64..3, horizon in 1u64..80) {
        let registry = Registry::new();
        let id = sample_learner(SampleKind::ALL[kind], &registry);
        let mut c = Construction::new(id, registry.learner(id).unwrap(), e, registry.search_budget());
        c.advance_to(horizon, &registry).unwrap();
        for s in 0..=horizon {
            prop_assert!(c.chain_violations(s).is_empty());
        }
        // defined rows form a prefix of every column
        for s in 0..=horizon {
            let col = c.column_at(s);
            let defined = col.iter().take_while(|r| r.is_some()).count();
            prop_assert!(col[defined..].iter().all(Option::is_none));
        }
    }

    #[test]
    fn strict_check_never_passes_alone(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scenario = RandomScenario::sample(&mut rng);
        let (fex, fext, witnesses_hold) = scenario.evaluate().unwrap();
        prop_assert!(!fext.passed() || fex.passed(), "{:?}", scenario);
        prop_assert!(witnesses_hold);
    }
}
