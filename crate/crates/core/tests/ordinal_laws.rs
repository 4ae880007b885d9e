use std::cmp::Ordering;

use num_bigint::BigUint;
use proptest::prelude::*;
use residua::ordinal::{add, classify, compare, decompose_successor, multiply, omega_absorbs, parse, Cnf, DepthClass, Term};
use residua::Ordinal;

fn ordinal_below(max_exp: u64) -> impl Strategy<Value = Ordinal> {
    proptest::collection::vec(proptest::option::of(1u64..6), max_exp as usize).prop_map(|coeffs| {
        let terms = coeffs
            .into_iter()
            .enumerate()
            .rev()
            .filter_map(|(e, c)| c.map(|c| Term { exp: Ordinal::from_u64(e as u64), coeff: BigUint::from(c) }))
            .collect();
        Cnf::from_terms(terms).unwrap()
    })
}

fn nested() -> impl Strategy<Value = Ordinal> {
    let leaf = ordinal_below(3);
    (proptest::collection::vec((leaf, 1u64..4), 0..4)).prop_map(|mut parts| {
        parts.sort_by(|a, b| b.0.cmp(&a.0));
        parts.dedup_by(|a, b| a.0 == b.0);
        Cnf::from_terms(parts.into_iter().map(|(exp, c)| Term { exp, coeff: BigUint::from(c) }).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn addition_associates(a in ordinal_below(5), b in ordinal_below(5), c in ordinal_below(5)) {
        prop_assert_eq!(add(&add(&a, &b), &c), add(&a, &add(&b, &c)));
    }

    #[test]
    fn multiplication_associates(a in ordinal_below(3), b in ordinal_below(3), c in ordinal_below(3)) {
        prop_assert_eq!(multiply(&multiply(&a, &b), &c), multiply(&a, &multiply(&b, &c)));
    }

    #[test]
    fn left_distributive(a in ordinal_below(5), b in ordinal_below(5), c in ordinal_below(5)) {
        prop_assert_eq!(multiply(&a, &add(&b, &c)), add(&multiply(&a, &b), &multiply(&a, &c)));
    }

    #[test]
    fn total_order(a in nested(), b in nested(), c in nested()) {
        prop_assert_eq!(compare(&a, &b), compare(&b, &a).reverse());
        prop_assert_eq!(compare(&a, &b) == Ordering::Equal, a == b);
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
    }

    #[test]
    fn addition_is_monotone_on_the_right(a in nested(), b in nested(), c in nested()) {
        if b < c {
            prop_assert!(add(&a, &b) < add(&a, &c));
        }
        prop_assert!(add(&a, &b) >= b);
    }

    #[test]
    fn classification_matches_successor_tail(a in nested()) {
        let invalid = decompose_successor(&a).is_ok_and(|(_, tail)| tail >= BigUint::from(2u8));
        prop_assert_eq!(classify(&a) == DepthClass::Invalid, invalid);
    }

    #[test]
    fn text_round_trip(a in nested()) {
        let text = a.to_string();
        prop_assert_eq!(parse::<BigUint>(&text).unwrap(), a);
    }

    #[test]
    fn json_round_trip(a in nested()) {
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Ordinal>(&json).unwrap(), a);
    }

    #[test]
    fn absorption_is_its_defining_equation(a in nested()) {
        prop_assert_eq!(omega_absorbs(&a), add(&Ordinal::omega(), &a) == a);
        let w2 = Ordinal::omega_pow(Ordinal::from_u64(2));
        prop_assert_eq!(omega_absorbs(&a), a >= w2);
    }
}

#[test]
fn right_distributivity_fails() {
    let two = add(&Ordinal::one(), &Ordinal::one());
    assert_eq!(multiply(&two, &Ordinal::omega()), Ordinal::omega());
    let w = multiply(&Ordinal::one(), &Ordinal::omega());
    assert_eq!(add(&w, &w), Ordinal::omega_affine(2, 0));
}

#[test]
fn tower_length_steps() {
    for n in 1..=20u64 {
        let lhs = add(&Ordinal::omega(), &multiply(&Ordinal::omega(), &Ordinal::from_u64(n - 1)));
        assert_eq!(lhs, multiply(&Ordinal::omega(), &Ordinal::from_u64(n)), "n = {n}");
    }
}
