use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Element, Group};

/// Seeded random-word probing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeConfig {
    pub count: usize,
    /// Longest word, in generators and their inverses.
    pub max_len: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { count: 64, max_len: 8, seed: 0 }
    }
}

/// Random word of length `1..=max_len` in the generators and their inverses.
pub fn random_word<R: Rng>(group: &Group, rng: &mut R, max_len: usize) -> Element {
    let gens = group.generators();
    if gens.is_empty() || max_len == 0 {
        return group.identity();
    }
    let len = rng.gen_range(1..=max_len);
    let mut acc = group.identity();
    for _ in 0..len {
        let g = &gens[rng.gen_range(0..gens.len())];
        let letter = if rng.gen_bool(0.5) { group.invert(g).expect("generator of its own group") } else { g.clone() };
        acc = group.multiply(&acc, &letter).expect("generator of its own group");
    }
    acc
}

/// Deduplicated, non-identity probe elements in first-seen order.
///
/// Returns fewer than `count` elements when the group is too small to
/// supply them.
pub fn probe_elements(group: &Group, config: &ProbeConfig) -> Vec<Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let attempts = config.count.saturating_mul(50).max(100);
    for _ in 0..attempts {
        if out.len() >= config.count {
            break;
        }
        let e = random_word(group, &mut rng, config.max_len);
        if group.is_identity(&e) || !seen.insert(e.clone()) {
            continue;
        }
        out.push(e);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_cyclic, make_integers};

    #[test]
    fn probes_are_deterministic_and_distinct() {
        let z = make_integers();
        let cfg = ProbeConfig { count: 10, max_len: 8, seed: 3 };
        let a = probe_elements(&z, &cfg);
        let b = probe_elements(&z, &cfg);
        assert_eq!(a, b);
        assert!(a.iter().all(|e| !z.is_identity(e)));
        let set: BTreeSet<_> = a.iter().collect();
        assert_eq!(set.len(), a.len());
    }

    #[test]
    fn small_groups_run_out() {
        let c3 = make_cyclic(3).unwrap();
        let p = probe_elements(&c3, &ProbeConfig { count: 10, max_len: 4, seed: 0 });
        assert_eq!(p.len(), 2);
    }
}
