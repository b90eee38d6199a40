mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tspaces::linspan::{check_verdict, MembershipVerdict};
use tspaces::rewrite::{build_rules, Target};
use tspaces::{Ambient, FieldSpec, SparsePoly};

fn poly(f: &FieldSpec, coeffs: &[u32], ambient: Ambient) -> SparsePoly {
    let lo = if ambient == Ambient::Unitary { 0 } else { 1 };
    let terms = coeffs.iter().enumerate().map(|(k, c)| (((k + lo) as u64).into(), f.element(c % f.q()).unwrap()));
    SparsePoly::from_terms(f, terms, ambient).unwrap()
}

fn prime_dense(coeffs: &[u32], p: u32) -> Vec<u32> {
    let mut v = vec![0];
    v.extend(coeffs.iter().map(|c| c % p));
    common::trim(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(q in prop::sample::select(vec![2u64, 3, 4, 5, 9]), coeffs in prop::collection::vec(0u32..9, 0..12)) {
        let f = FieldSpec::with_order(q).unwrap();
        let g = poly(&f, &coeffs, Ambient::Unitary);
        let back = SparsePoly::parse(&f, &g.to_text(&f), Ambient::Unitary).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn compose_matches_dense(p in prop::sample::select(vec![2u32, 3, 5]),
                             g in prop::collection::vec(0u32..5, 1..6),
                             u in prop::collection::vec(0u32..5, 1..5)) {
        let f = FieldSpec::with_order(p as u64).unwrap();
        let got = poly(&f, &g, Ambient::Nonunitary).compose(&f, &poly(&f, &u, Ambient::Nonunitary)).unwrap();
        let want = common::compose(p, &prime_dense(&g, p), &prime_dense(&u, p));
        prop_assert_eq!(common::dense(&f, &got), want);
    }

    #[test]
    fn pow_matches_repeated_mul(q in prop::sample::select(vec![2u64, 3, 4]),
                                g in prop::collection::vec(0u32..4, 1..4),
                                e in 0u64..12) {
        let f = FieldSpec::with_order(q).unwrap();
        let g = poly(&f, &g, Ambient::Unitary);
        let mut want = SparsePoly::constant(f.one());
        for _ in 0..e {
            want = want.mul(&f, &g).unwrap();
        }
        prop_assert_eq!(g.pow(&f, &e.into()).unwrap(), want);
    }

    #[test]
    fn rewriting_is_order_independent(exps in prop::collection::btree_set(1u64..200, 1..8),
                                      target in prop::sample::select(vec!["W1", "W2"]),
                                      seed in any::<u64>()) {
        let f = FieldSpec::with_order(2).unwrap();
        let sys = build_rules(&f, Target::parse(target).unwrap()).unwrap();
        let exps: Vec<u64> = exps.into_iter().collect();
        let g = SparsePoly::from_exponents(&f, &exps);
        let a = sys.reduce_canonical(&g).unwrap();
        let b = sys.reduce_shuffled(&g, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(&a.canonical, &b.canonical);
        let diff = sys.difference(&g, &b).unwrap();
        let verdict = MembershipVerdict::Member(b.cert);
        prop_assert!(check_verdict(&f, &sys.space().view(), &diff, &verdict, 0).is_ok());
    }
}
