#![allow(dead_code)]

use num_bigint::BigUint;
use rand::Rng;
use residua::dsl::parse_expr;
use residua::groups::Group;
use residua::ordinal::{Cnf, Term};
use residua::realize::realize_group;
use residua::Ordinal;

/// Finite fixtures, orders at most 48.
pub const FIXTURES: [&str; 12] = [
    "1",
    "C(2)",
    "C(5)",
    "C(7)",
    "C(12)",
    "prod(C(2), C(2))",
    "S(3)",
    "perm(4; (0 1 2 3), (0 2))",
    "A(4)",
    "S(4)",
    "wreath(C(2), C(3))",
    "prod(S(3), C(8))",
];

pub fn group(text: &str) -> Group {
    realize_group(&parse_expr(text).unwrap()).unwrap()
}

pub fn order(g: &Group) -> usize {
    g.elements().unwrap().len()
}

/// Random ordinal with finite exponents below `max_exp` and coefficients
/// up to `max_coeff`.
pub fn small_ordinal<R: Rng>(rng: &mut R, max_exp: u64, max_coeff: u64) -> Ordinal {
    let mut terms = Vec::new();
    for e in (0..max_exp).rev() {
        if rng.gen_bool(0.5) {
            terms.push(Term { exp: Ordinal::from_u64(e), coeff: BigUint::from(rng.gen_range(1..=max_coeff)) });
        }
    }
    Cnf::from_terms(terms).unwrap()
}

/// Random ordinal whose exponents are themselves random ordinals below
/// `ω^2`, so samples land on both sides of `ω^ω`.
pub fn tall_ordinal<R: Rng>(rng: &mut R) -> Ordinal {
    let n = rng.gen_range(0..4);
    let mut exps: Vec<Ordinal> = (0..n).map(|_| small_ordinal(rng, 2, 3)).collect();
    exps.sort_by(|a, b| b.cmp(a));
    exps.dedup();
    let terms = exps.into_iter().map(|exp| Term { exp, coeff: BigUint::from(rng.gen_range(1..=4u64)) }).collect();
    Cnf::from_terms(terms).unwrap()
}

/// Largest prime factor by trial division.
pub fn largest_prime_factor(mut n: u64) -> u64 {
    let mut best = 1;
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            best = p;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        best = best.max(n);
    }
    best
}
