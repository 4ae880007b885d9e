mod common;

use common::{group, largest_prime_factor, order, FIXTURES};
use residua::oracle::{all_subgroups, core_up_to_index, min_kappa, naive_subgroups, NAIVE_CAP};

#[test]
fn cyclic_kappa_is_one_past_the_largest_prime() {
    for n in 2..=30u64 {
        let g = group(&format!("C({n})"));
        assert_eq!(min_kappa(&g).unwrap(), 1 + largest_prime_factor(n), "C({n})");
    }
}

#[test]
fn kappa_is_at_least_two_for_nontrivial_groups() {
    for text in FIXTURES {
        let g = group(text);
        let k = min_kappa(&g).unwrap();
        if g.is_trivial() {
            assert_eq!(k, 1);
        } else {
            assert!(k >= 2, "{text}");
        }
    }
}

#[test]
fn cores_shrink_to_the_trivial_group() {
    for text in FIXTURES {
        let g = group(text);
        let n = order(&g) as u64;
        let mut prev = usize::MAX;
        for k in 1..=n + 1 {
            let core = core_up_to_index(&g, k).unwrap();
            assert!(core.len() <= prev, "{text} at {k}");
            prev = core.len();
        }
        assert_eq!(prev, 1, "{text}");
    }
}

#[test]
fn published_subgroup_counts() {
    for (text, count) in [("C(6)", 4), ("S(3)", 6), ("prod(C(2), C(2))", 5), ("A(4)", 10), ("S(4)", 30), ("C(12)", 6)] {
        assert_eq!(all_subgroups(&group(text)).unwrap().len(), count, "{text}");
    }
}

#[test]
fn lattices_agree_with_subset_scan() {
    for text in FIXTURES {
        let g = group(text);
        let lattice = all_subgroups(&g).unwrap();
        assert!(lattice.verify(), "{text}");
        if order(&g) <= NAIVE_CAP {
            assert_eq!(naive_subgroups(&g).unwrap(), lattice.subgroups(), "{text}");
        }
    }
}

#[test]
fn lattice_json_lists_every_subgroup() {
    let lattice = all_subgroups(&group("S(3)")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&lattice.to_json()).unwrap();
    let subs = v["subgroups"].as_array().unwrap();
    assert_eq!(subs.len(), 6);
    assert_eq!(subs[0]["order"], 1);
    assert_eq!(subs[5]["index"], 1);
}
