mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use residua::chains::{from_subgroup_sets, StagePos};
use residua::dsl::parse_expr;
use residua::groups::{probe_elements, Element, ProbeConfig};
use residua::ordinal::CardinalBound;
use residua::oracle::{chain_enumerate, maximal_subgroup_chain};
use residua::realize::realize_chain;
use residua::trees::{coset_tree, emit, parse_json, truncate, verify_simple, Format, TreeTruncation};

fn finite_truncation(text: &str) -> (residua::groups::Group, TreeTruncation) {
    let g = common::group(text);
    let sets = maximal_subgroup_chain(&g).unwrap();
    let chain = from_subgroup_sets(&g, &sets, CardinalBound::Aleph0).unwrap();
    let depth = chain.tail_len() as usize;
    (g, truncate(&coset_tree(&chain), depth, 0).unwrap())
}

#[test]
fn action_is_a_homomorphism_on_finite_trees() {
    for text in ["S(4)", "A(4)", "wreath(C(2), C(3))", "perm(4; (0 1 2 3), (0 2))"] {
        let (g, tr) = finite_truncation(text);
        let elements = g.elements().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let a = &elements[rng.gen_range(0..elements.len())];
            let b = &elements[rng.gen_range(0..elements.len())];
            let ab = tr.act(&g.multiply(a, b).unwrap()).unwrap();
            let (ta, tb) = (tr.act(a).unwrap(), tr.act(b).unwrap());
            assert_eq!(ab, ta.compose(&tb), "{text}: {a} {b}");
            assert!(ta.commutes_with(&tr) && ta.is_bijective());
        }
    }
}

#[test]
fn action_is_a_homomorphism_on_infinite_trees() {
    let chain = realize_chain(&parse_expr("wreath(C(2), Z)").unwrap()).unwrap();
    let tree = coset_tree(&chain);
    let g = chain.group().clone();
    let lower = truncate(&tree, 5, 0).unwrap();
    let probes = probe_elements(&g, &ProbeConfig { count: 30, max_len: 6, seed: 2 });
    for w in probes.windows(2) {
        let ab = lower.act(&g.multiply(&w[0], &w[1]).unwrap()).unwrap();
        assert_eq!(ab, lower.act(&w[0]).unwrap().compose(&lower.act(&w[1]).unwrap()));
    }
    let upper = truncate(&tree, 3, 1).unwrap();
    let limit = chain.stage(StagePos::new(1, 0)).unwrap();
    let kernel_probes: Vec<Element> = probes.windows(2).map(|w| g.commutator(&w[0], &w[1]).unwrap()).filter(|c| limit.contains(c).is_member()).collect();
    assert!(!kernel_probes.is_empty());
    for w in kernel_probes.windows(2) {
        let ab = upper.act(&g.multiply(&w[0], &w[1]).unwrap()).unwrap();
        assert_eq!(ab, upper.act(&w[0]).unwrap().compose(&upper.act(&w[1]).unwrap()));
        assert!(upper.act(&w[0]).unwrap().commutes_with(&upper));
    }
}

#[test]
fn restriction_maps_compose() {
    let chain = realize_chain(&parse_expr("tower(Dinf, 2)").unwrap()).unwrap();
    let tr = truncate(&coset_tree(&chain), 4, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let mut l = [rng.gen_range(0..=4), rng.gen_range(0..=4), rng.gen_range(0..=4)];
        l.sort();
        let [i, j, k] = l;
        let ejk = tr.restriction_map(j, k).unwrap();
        let eij = tr.restriction_map(i, j).unwrap();
        let eik = tr.restriction_map(i, k).unwrap();
        assert_eq!(ejk.iter().map(|&v| eij[v]).collect::<Vec<_>>(), eik, "{i} {j} {k}");
    }
}

#[test]
fn only_the_identity_fixes_every_level() {
    for text in ["S(3)", "S(4)", "prod(C(2), C(2))", "C(12)"] {
        let (g, tr) = finite_truncation(text);
        for e in g.elements().unwrap().iter() {
            assert_eq!(tr.act(e).unwrap().is_identity(), g.is_identity(e), "{text}: {e}");
        }
    }
}

#[test]
fn stabilizers_recover_every_small_chain() {
    for text in ["S(3)", "C(12)", "A(4)"] {
        let g = common::group(text);
        for sets in chain_enumerate(&g, 3).unwrap() {
            let chain = from_subgroup_sets(&g, &sets, CardinalBound::Aleph0).unwrap();
            let tr = truncate(&coset_tree(&chain), sets.len() - 1, 0).unwrap();
            let back = tr.stabilizer_chain(&tr.identity_thread()).unwrap();
            for (k, set) in sets.iter().enumerate() {
                let stage = back.stage(StagePos::new(0, k as u64)).unwrap();
                for e in g.elements().unwrap().iter() {
                    assert_eq!(stage.contains(e).is_member(), set.contains(e));
                }
            }
        }
    }
}

#[test]
fn infinite_evidence_is_never_a_verdict() {
    let chain = realize_chain(&parse_expr("Z").unwrap()).unwrap();
    let tr = truncate(&coset_tree(&chain), 4, 0).unwrap();
    let rep = verify_simple(&tr, 16, 0, 64).unwrap();
    assert!(!rep.exhaustive && !rep.simple);
    assert!(rep.violation.is_none());
    assert_eq!(rep.unresolved(), 0);
    let back = tr.stabilizer_chain(&[0, 1, 3, 7, 15]).unwrap();
    let stab = back.stage(StagePos::new(0, 4)).unwrap();
    assert!(stab.contains(&Element::int(16)).is_member());
    assert!(!stab.contains(&Element::int(8)).is_member());
}

#[test]
fn emitted_trees_round_trip() {
    for text in ["S(4)", "wreath(C(2), C(3))"] {
        let (_, tr) = finite_truncation(text);
        let json = emit(&tr, Format::Json);
        assert_eq!(parse_json(&json).unwrap(), tr);
        let dot = emit(&tr, Format::Dot);
        let edges = tr.level_sizes().iter().skip(1).sum::<usize>();
        assert_eq!(dot.matches(" -> ").count(), edges);
    }
}
