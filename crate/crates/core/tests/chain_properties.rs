mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use residua::chains::{
    compress_successor_tail, concat_extension, core_sandwich, finite_group_chain, from_subgroup_sets, power_chain, promote_to_omega, two_adic_chain,
    verify_prefix, ChainSchema, Index, Membership, StagePos, StageRule, SubgroupDescriptor,
};
use residua::groups::{make_integers, make_product, probe_elements, Element, ExtensionHandle, Group, PointSet, ProbeConfig};
use residua::ordinal::{add, CardinalBound};
use residua::oracle::chain_enumerate;
use residua::Ordinal;

/// A chain of the given shape whose stages are all the whole group.
fn shaped(g: &Group, q: u64, r: u64) -> ChainSchema {
    let owner = g.clone();
    let rule: StageRule = Arc::new(move |_| SubgroupDescriptor::whole(&owner));
    let blocks = (0..q).map(|_| rule.clone()).collect();
    let tail = (0..r).map(|_| SubgroupDescriptor::whole(g)).collect();
    ChainSchema::new(g, blocks, vec![None; q as usize], tail, CardinalBound::Aleph0)
}

#[test]
fn concatenation_adds_lengths() {
    let z = make_integers();
    let total = make_product(vec![z.clone(), z.clone()]);
    let ext = ExtensionHandle::of_product(&total, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let (q1, r1, q2, r2) = (rng.gen_range(0..4), rng.gen_range(0..4), rng.gen_range(0..4), rng.gen_range(0..4));
        let cq = shaped(&z, q1, r1);
        let cn = shaped(ext.kernel().unwrap(), q2, r2);
        let joined = concat_extension(&ext, &cq, &cn).unwrap();
        assert_eq!(joined.length(), add(&cq.length(), &cn.length()), "({q1}, {r1}) + ({q2}, {r2})");
    }
}

/// `f ∈ H_n` iff `2^(n-i) | f(i)` for every `i < n`.
fn literal_h(f: &BTreeMap<Element, Element>, n: u64) -> bool {
    f.iter().all(|(x, v)| {
        let (Element::Integer(i), Element::Integer(v)) = (x, v) else { unreachable!() };
        let i = i.to_u64().unwrap();
        i >= n || (v % (BigInt::one() << (n - i))).is_zero()
    })
}

fn random_support<R: Rng>(rng: &mut R) -> BTreeMap<Element, Element> {
    let mut f = BTreeMap::new();
    for _ in 0..rng.gen_range(0..5) {
        let point = rng.gen_range(0..10i64);
        let value = (2 * rng.gen_range(-3..4i64) + 1) << rng.gen_range(0..9);
        f.insert(Element::int(point), Element::int(value));
    }
    f
}

#[test]
fn power_chain_matches_literal_stages() {
    let chain = power_chain(&two_adic_chain(&make_integers()), PointSet::naturals()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let f = random_support(&mut rng);
        let e = Element::FinSupport(f.clone());
        for n in 0..=8 {
            let stage = chain.stage(StagePos::new(0, n)).unwrap();
            assert_eq!(stage.contains(&e), Membership::from_bool(literal_h(&f, n)), "{e} at {n}");
        }
    }
}

#[test]
fn power_chain_index_counts_cosets() {
    let chain = power_chain(&two_adic_chain(&make_integers()), PointSet::naturals()).unwrap();
    for n in 1..=6u64 {
        let h = chain.stage(StagePos::new(0, n)).unwrap();
        // Coordinates of H_n are independent, so count cosets one point at a
        // time on representatives 0..2^n.
        let mut cosets = BigUint::one();
        for i in 0..n {
            let mut reps: Vec<i64> = Vec::new();
            for v in 0..(1i64 << n) {
                let fresh = reps.iter().all(|&r| {
                    let diff = Element::support([(Element::int(i as i64), Element::int(v - r))]);
                    h.contains(&diff) == Membership::NonMember
                });
                if fresh {
                    reps.push(v);
                }
            }
            cosets *= reps.len();
        }
        assert_eq!(cosets, BigUint::one() << (n * (n + 1) / 2), "n = {n}");
        let product: BigUint = (1..=n).map(|k| chain.stage(StagePos::new(0, k)).unwrap().index().as_finite().unwrap().clone()).product();
        assert_eq!(product, cosets);
    }
}

#[test]
fn index_product_law_on_finite_chains() {
    for text in ["S(3)", "A(4)", "prod(C(2), C(2))", "C(12)", "perm(4; (0 1 2 3), (0 2))"] {
        let g = common::group(text);
        let n = common::order(&g);
        for sets in chain_enumerate(&g, 3).unwrap() {
            let chain = from_subgroup_sets(&g, &sets, CardinalBound::Aleph0).unwrap();
            let mut product = 1usize;
            for k in 1..=chain.tail_len() {
                let stage = chain.stage(StagePos::new(0, k)).unwrap();
                let t = stage.transversal().unwrap();
                assert_eq!(Index::finite(t.len() as u64), *stage.index());
                product *= t.len();
            }
            assert_eq!(product, n / sets.last().unwrap().len(), "{text}");
            if chain.tail_len() >= 2 {
                let squashed = compress_successor_tail(&chain).unwrap();
                let last = squashed.stage(squashed.terminal()).unwrap();
                assert_eq!(last.transversal().unwrap().len(), product);
            }
        }
    }
}

#[test]
fn compression_keeps_separation() {
    let total = common::group("prod(Z, S(3))");
    let ext = ExtensionHandle::of_product(&total, 0).unwrap();
    let s3 = ext.kernel().unwrap().clone();
    let lattice = residua::oracle::all_subgroups(&s3).unwrap();
    let sets = vec![lattice.subgroup(lattice.top()), lattice.subgroup(4), lattice.subgroup(0)];
    let inner = from_subgroup_sets(&s3, &sets, CardinalBound::Aleph0).unwrap();
    let chain = concat_extension(&ext, &two_adic_chain(&make_integers()), &inner).unwrap();
    assert_eq!(chain.length(), Ordinal::omega_affine(1, 2));
    let squashed = compress_successor_tail(&chain).unwrap();
    assert_eq!(squashed.length(), Ordinal::omega_affine(1, 1));
    assert_eq!(squashed.group(), chain.group());
    let before = verify_prefix(&chain, 5, 64, 3);
    let after = verify_prefix(&squashed, 5, 64, 3);
    assert!(before.verdict.is_pass() && after.verdict.is_pass());
    let limit = StagePos::new(1, 0);
    for p in probe_elements(chain.group(), &ProbeConfig { count: 64, max_len: 8, seed: 3 }) {
        assert_eq!(chain.stage(limit).unwrap().contains(&p), squashed.stage(limit).unwrap().contains(&p));
        assert_eq!(chain.stage(chain.terminal()).unwrap().contains(&p), squashed.stage(squashed.terminal()).unwrap().contains(&p));
        let a = before.separation_of(&p.to_string()).map(|s| s.first_excluding_stage.is_some());
        let b = after.separation_of(&p.to_string()).map(|s| s.first_excluding_stage.is_some());
        assert_eq!(a, b, "{p}");
    }
}

#[test]
fn promoted_finite_chains_still_verify() {
    for text in ["C(6)", "S(3)", "A(4)"] {
        let chain = promote_to_omega(&finite_group_chain(&common::group(text)).unwrap()).unwrap();
        assert_eq!(chain.length(), Ordinal::omega());
        assert!(verify_prefix(&chain, 4, 32, 0).verdict.is_pass(), "{text}");
    }
}

#[test]
fn oracle_chains_verify() {
    for text in common::FIXTURES.iter().filter(|t| common::order(&common::group(t)) <= 24) {
        let g = common::group(text);
        for sets in chain_enumerate(&g, 3).unwrap() {
            let chain = from_subgroup_sets(&g, &sets, CardinalBound::Aleph0).unwrap();
            let cert = verify_prefix(&chain, 3, 32, 1);
            assert!(cert.verdict.is_pass(), "{text}: {:?}", cert.verdict);
        }
    }
}

#[test]
fn sandwich_bounds_are_nested() {
    let g = common::group("wreath(S(3), Z)");
    let (lower, upper) = core_sandwich(&g).unwrap();
    let mut probes = probe_elements(&g, &ProbeConfig { count: 200, max_len: 8, seed: 4 });
    let commutators: Vec<Element> = probes.windows(2).map(|w| g.commutator(&w[0], &w[1]).unwrap()).collect();
    probes.extend(commutators);
    let mut in_lower = 0;
    for p in &probes {
        if lower.contains(p).is_member() {
            in_lower += 1;
            assert!(upper.contains(p).is_member(), "{p}");
        }
    }
    assert!(in_lower > 0);
}
