//! Brute-force ground truth for small finite groups.
//!
//! Subgroups are bitsets over a multiplication table. The lattice is built
//! from the cyclic subgroups by joining with cyclics until nothing new
//! appears; [`naive_subgroups`] is an independent subset scan for tiny
//! groups.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::groups::{Element, Group, GroupError};
use crate::Ordinal;

/// Largest group the oracle accepts.
pub const ORACLE_CAP: usize = 128;

/// Largest group scanned subset by subset.
pub const NAIVE_CAP: usize = 12;

type Bits = u128;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} is infinite")]
    Infinite(String),
    #[error("{group} has order {order}, above the oracle cap {cap}")]
    CapExceeded { group: String, order: String, cap: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Multiplication table of a finite group, elements in sorted order.
#[derive(Clone, Debug)]
pub struct Table {
    elements: Vec<Element>,
    mul: Vec<Vec<u8>>,
    inv: Vec<u8>,
    identity: u8,
}

impl Table {
    pub fn new(group: &Group, cap: usize) -> Result<Table, OracleError> {
        let Some(order) = group.order().finite() else {
            return Err(OracleError::Infinite(group.label().to_string()));
        };
        if *order > cap.into() {
            return Err(OracleError::CapExceeded { group: group.label().to_string(), order: order.to_string(), cap });
        }
        let elements = group.elements()?.to_vec();
        let pos: BTreeMap<&Element, u8> = elements.iter().enumerate().map(|(i, e)| (e, i as u8)).collect();
        let at = |e: &Element| pos[e];
        let mut mul = Vec::with_capacity(elements.len());
        for a in &elements {
            let row = elements.iter().map(|b| group.multiply(a, b).map(|c| at(&c))).collect::<Result<Vec<_>, _>>()?;
            mul.push(row);
        }
        let inv = elements.iter().map(|a| group.invert(a).map(|c| at(&c))).collect::<Result<Vec<_>, _>>()?;
        let identity = at(&group.identity());
        Ok(Table { elements, mul, inv, identity })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    fn all(&self) -> Bits {
        if self.len() == 128 {
            Bits::MAX
        } else {
            (1u128 << self.len()) - 1
        }
    }

    fn bit(i: u8) -> Bits {
        1u128 << i
    }

    fn members(bits: Bits) -> impl Iterator<Item = u8> {
        (0..128u8).filter(move |&i| bits & (1u128 << i) != 0)
    }

    /// Subgroup generated by `gens`.
    fn generate(&self, gens: &[u8]) -> Bits {
        let mut cur = Self::bit(self.identity);
        let mut frontier: Vec<u8> = vec![self.identity];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let c = self.mul[a as usize][g as usize];
                if cur & Self::bit(c) == 0 {
                    cur |= Self::bit(c);
                    frontier.push(c);
                }
            }
        }
        cur
    }

    fn is_subgroup(&self, bits: Bits) -> bool {
        if bits & Self::bit(self.identity) == 0 {
            return false;
        }
        Self::members(bits).all(|a| {
            bits & Self::bit(self.inv[a as usize]) != 0 && Self::members(bits).all(|b| bits & Self::bit(self.mul[a as usize][b as usize]) != 0)
        })
    }

    fn to_set(&self, bits: Bits) -> BTreeSet<Element> {
        Self::members(bits).map(|i| self.elements[i as usize].clone()).collect()
    }
}

/// All subgroups of a finite group, sorted by order and then by element
/// list.
#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    group: Group,
    table: Table,
    subgroups: Vec<Bits>,
}

pub fn all_subgroups(g: &Group) -> Result<SubgroupLattice, OracleError> {
    let table = Table::new(g, ORACLE_CAP)?;
    let mut found: BTreeMap<Bits, Vec<u8>> = BTreeMap::new();
    let mut cyclics: Vec<(u8, Bits)> = Vec::new();
    for i in 0..table.len() as u8 {
        let c = table.generate(&[i]);
        if !cyclics.iter().any(|(_, b)| *b == c) {
            cyclics.push((i, c));
        }
        found.entry(c).or_insert_with(|| vec![i]);
    }
    let mut queue: Vec<Bits> = found.keys().copied().collect();
    while let Some(h) = queue.pop() {
        let gens = found[&h].clone();
        for &(c, cbits) in &cyclics {
            if cbits & !h == 0 {
                continue;
            }
            let mut joined_gens = gens.clone();
            joined_gens.push(c);
            let j = table.generate(&joined_gens);
            if let std::collections::btree_map::Entry::Vacant(slot) = found.entry(j) {
                slot.insert(joined_gens);
                queue.push(j);
            }
        }
    }
    let mut subgroups: Vec<Bits> = found.into_keys().collect();
    sort_subgroups(&table, &mut subgroups);
    Ok(SubgroupLattice { group: g.clone(), table, subgroups })
}

fn sort_subgroups(table: &Table, subgroups: &mut [Bits]) {
    subgroups.sort_by_key(|b| (b.count_ones(), table.to_set(*b).into_iter().collect::<Vec<_>>()));
}

/// Every subset containing the identity and closed under multiplication.
pub fn naive_subgroups(g: &Group) -> Result<Vec<BTreeSet<Element>>, OracleError> {
    let table = Table::new(g, NAIVE_CAP)?;
    let n = table.len();
    let id = table.identity;
    let others: Vec<u8> = (0..n as u8).filter(|&i| i != id).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << others.len()) {
        let mut bits = Table::bit(id);
        for (k, &e) in others.iter().enumerate() {
            if mask & (1 << k) != 0 {
                bits |= Table::bit(e);
            }
        }
        let closed = Table::members(bits)
            .all(|a| Table::members(bits).all(|b| bits & Table::bit(table.mul[a as usize][b as usize]) != 0));
        if closed {
            out.push(bits);
        }
    }
    sort_subgroups(&table, &mut out);
    Ok(out.into_iter().map(|b| table.to_set(b)).collect())
}

#[derive(Serialize)]
struct LatticeJson<'a> {
    group: &'a str,
    order: usize,
    subgroups: Vec<SubgroupJson>,
}

#[derive(Serialize)]
struct SubgroupJson {
    order: usize,
    index: usize,
    elements: Vec<Element>,
}

impl SubgroupLattice {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn subgroup(&self, i: usize) -> BTreeSet<Element> {
        self.table.to_set(self.subgroups[i])
    }

    pub fn subgroups(&self) -> Vec<BTreeSet<Element>> {
        (0..self.len()).map(|i| self.subgroup(i)).collect()
    }

    pub fn subgroup_order(&self, i: usize) -> usize {
        self.subgroups[i].count_ones() as usize
    }

    /// Whether subgroup `i` is contained in subgroup `j`.
    pub fn is_contained(&self, i: usize, j: usize) -> bool {
        self.subgroups[i] & !self.subgroups[j] == 0
    }

    /// Position of the whole group.
    pub fn top(&self) -> usize {
        self.len() - 1
    }

    /// Position of the trivial subgroup.
    pub fn bottom(&self) -> usize {
        0
    }

    /// Exhaustive check that every entry is a subgroup, with no repeats,
    /// and that the trivial and whole group are present.
    pub fn verify(&self) -> bool {
        let distinct: BTreeSet<Bits> = self.subgroups.iter().copied().collect();
        distinct.len() == self.len()
            && self.subgroups.iter().all(|&b| self.table.is_subgroup(b))
            && self.subgroups[self.bottom()] == Table::bit(self.table.identity)
            && self.subgroups[self.top()] == self.table.all()
    }

    pub fn to_json(&self) -> String {
        let n = self.order();
        let subgroups = (0..self.len())
            .map(|i| {
                let order = self.subgroup_order(i);
                SubgroupJson { order, index: n / order, elements: self.subgroup(i).into_iter().collect() }
            })
            .collect();
        serde_json::to_string_pretty(&LatticeJson { group: self.group.label(), order: n, subgroups }).expect("lattice serializes")
    }
}

/// Intersection of all subgroups of index `< k`.
pub fn core_up_to_index(g: &Group, k: u64) -> Result<BTreeSet<Element>, OracleError> {
    let lattice = all_subgroups(g)?;
    let n = lattice.order() as u64;
    let mut acc = lattice.table.all();
    for (i, &b) in lattice.subgroups.iter().enumerate() {
        if n / lattice.subgroup_order(i) as u64 >= k {
            continue;
        }
        acc &= b;
    }
    Ok(lattice.table.to_set(acc))
}

/// Least `κ` admitting a strictly descending chain from `g` to `1` with
/// every index `< κ`. The trivial group gets 1.
pub fn min_kappa(g: &Group) -> Result<u64, OracleError> {
    let lattice = all_subgroups(g)?;
    Ok(min_kappa_in(&lattice))
}

fn min_kappa_in(lattice: &SubgroupLattice) -> u64 {
    // best[i]: smallest possible largest index on a chain from subgroup i
    // down to 1; subgroups are sorted by order so children come first.
    let mut best = vec![0u64; lattice.len()];
    for i in 1..lattice.len() {
        let oi = lattice.subgroup_order(i) as u64;
        best[i] = (0..i)
            .filter(|&j| lattice.subgroup_order(j) < lattice.subgroup_order(i) && lattice.is_contained(j, i))
            .map(|j| (oi / lattice.subgroup_order(j) as u64).max(best[j]))
            .min()
            .expect("the trivial subgroup lies below every other");
    }
    best[lattice.top()] + 1
}

/// 0 for the trivial group and 1 for any other finite group, after checking
/// against the lattice that `g ⊃ 1` is a chain with index below `|g| + 1`.
pub fn depth_exact_finite(g: &Group) -> Result<Ordinal, OracleError> {
    let lattice = all_subgroups(g)?;
    let n = lattice.order() as u64;
    assert!(min_kappa_in(&lattice) <= n + 1, "finite groups are (1, |G|+1)-residually finite");
    Ok(if n == 1 { Ordinal::zero() } else { Ordinal::one() })
}

/// All strictly descending chains `g = H_0 ⊋ H_1 ⊋ ... ⊋ H_m = 1` with
/// `m ≤ max_len`, in lexicographic order of lattice positions from the top.
pub fn chain_enumerate(g: &Group, max_len: usize) -> Result<Vec<Vec<BTreeSet<Element>>>, OracleError> {
    let lattice = all_subgroups(g)?;
    let mut out = Vec::new();
    let mut path = vec![lattice.top()];
    walk(&lattice, &mut path, max_len, &mut out);
    Ok(out.into_iter().map(|p| p.into_iter().map(|i| lattice.subgroup(i)).collect()).collect())
}

fn walk(lattice: &SubgroupLattice, path: &mut Vec<usize>, max_len: usize, out: &mut Vec<Vec<usize>>) {
    let cur = *path.last().expect("nonempty path");
    if cur == lattice.bottom() {
        out.push(path.clone());
        return;
    }
    if path.len() > max_len {
        return;
    }
    for j in (0..cur).rev() {
        if lattice.subgroup_order(j) < lattice.subgroup_order(cur) && lattice.is_contained(j, cur) {
            path.push(j);
            walk(lattice, path, max_len, out);
            path.pop();
        }
    }
}

/// A composition-style chain: each stage is a largest proper subgroup of
/// the one before, ties broken by lattice position.
pub fn maximal_subgroup_chain(g: &Group) -> Result<Vec<BTreeSet<Element>>, OracleError> {
    let lattice = all_subgroups(g)?;
    let mut cur = lattice.top();
    let mut out = vec![lattice.subgroup(cur)];
    while cur != lattice.bottom() {
        cur = (0..cur)
            .rev()
            .filter(|&j| lattice.subgroup_order(j) < lattice.subgroup_order(cur) && lattice.is_contained(j, cur))
            .max_by_key(|&j| (lattice.subgroup_order(j), usize::MAX - j))
            .expect("the trivial subgroup lies below");
        out.push(lattice.subgroup(cur));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_alternating, make_cyclic, make_symmetric, make_trivial};

    #[test]
    fn small_lattices() {
        assert_eq!(all_subgroups(&make_cyclic(6).unwrap()).unwrap().len(), 4);
        let s3 = all_subgroups(&make_symmetric(3).unwrap()).unwrap();
        assert_eq!(s3.len(), 6);
        assert!(s3.verify());
        assert_eq!(all_subgroups(&make_trivial()).unwrap().len(), 1);
        assert_eq!(all_subgroups(&make_alternating(4).unwrap()).unwrap().len(), 10);
    }

    #[test]
    fn naive_scan_agrees() {
        for g in [make_cyclic(6).unwrap(), make_symmetric(3).unwrap(), make_alternating(4).unwrap()] {
            assert_eq!(naive_subgroups(&g).unwrap(), all_subgroups(&g).unwrap().subgroups(), "{}", g.label());
        }
    }

    #[test]
    fn core_examples() {
        let s3 = make_symmetric(3).unwrap();
        assert_eq!(core_up_to_index(&s3, 4).unwrap().len(), 1);
        assert_eq!(core_up_to_index(&s3, 2).unwrap().len(), 6);
        assert_eq!(core_up_to_index(&make_cyclic(5).unwrap(), 5).unwrap().len(), 5);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(min_kappa(&make_cyclic(4).unwrap()).unwrap(), 3);
        assert_eq!(min_kappa(&make_trivial()).unwrap(), 1);
        for p in [2, 3, 5, 7] {
            assert_eq!(min_kappa(&make_cyclic(p).unwrap()).unwrap(), p + 1);
        }
    }

    #[test]
    fn chains_of_s3() {
        let s3 = make_symmetric(3).unwrap();
        let chains = chain_enumerate(&s3, 3).unwrap();
        assert!(chains.iter().any(|c| c.len() == 3 && c[1].len() == 3));
        assert!(chains.iter().any(|c| c.len() == 3 && c[1].len() == 2));
        assert!(chains.iter().any(|c| c.len() == 2));
        assert!(chain_enumerate(&s3, 0).unwrap().is_empty());
        assert_eq!(chain_enumerate(&make_cyclic(2).unwrap(), 3).unwrap().len(), 1);
    }

    #[test]
    fn maximal_chains() {
        let sizes = |g: &Group| maximal_subgroup_chain(g).unwrap().iter().map(|h| h.len()).collect::<Vec<_>>();
        assert_eq!(sizes(&make_symmetric(3).unwrap()), [6, 3, 1]);
        assert_eq!(sizes(&make_cyclic(8).unwrap()), [8, 4, 2, 1]);
        assert_eq!(sizes(&make_trivial()), [1]);
    }

    #[test]
    fn oracle_rejects_large_and_infinite() {
        assert!(matches!(all_subgroups(&make_symmetric(6).unwrap()), Err(OracleError::CapExceeded { .. })));
        assert!(matches!(all_subgroups(&crate::groups::make_integers()), Err(OracleError::Infinite(_))));
    }
}
