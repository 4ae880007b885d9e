use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{ChainError, ChainSchema, Index, MemberFn, Membership, StageRule, SubgroupDescriptor, TRANSVERSAL_CAP};
use crate::groups::{Element, Group, GroupError};
use crate::ordinal::CardinalBound;

fn divisible(x: &BigInt, n: u64) -> bool {
    let p = BigInt::one() << n;
    (x % p).is_zero()
}

/// `𝒞_n = 2^n ℤ`, length ω. The terminal limit is left to lazy evaluation.
pub fn two_adic_chain(z: &Group) -> ChainSchema {
    let owner = z.clone();
    let rule: StageRule = Arc::new(move |n| {
        let membership: MemberFn = Arc::new(move |e| match e {
            Element::Integer(x) => Membership::from_bool(divisible(x, n)),
            _ => Membership::NonMember,
        });
        let reps = vec![Element::Integer(BigInt::zero()), Element::Integer(BigInt::one() << (n - 1))];
        SubgroupDescriptor::new(&owner, format!("2^{n}Z"), membership, Index::finite(2), Some(reps))
    });
    ChainSchema::new(z, vec![rule], vec![None], Vec::new(), CardinalBound::Aleph0)
}

/// `𝒞_n` = translations by multiples of `2^n` in D∞, length ω. Step 1 has
/// index 4 (flip and parity), later steps index 2.
pub fn dihedral_chain(d: &Group) -> ChainSchema {
    let owner = d.clone();
    let rule: StageRule = Arc::new(move |n| {
        let membership: MemberFn = Arc::new(move |e| match e {
            Element::Dihedral { shift, flip } => Membership::from_bool(!flip && divisible(shift, n)),
            _ => Membership::NonMember,
        });
        let t = |s: BigInt, flip: bool| Element::Dihedral { shift: s, flip };
        let (index, reps) = if n == 1 {
            let (zero, one) = (BigInt::zero(), BigInt::one());
            (4, vec![t(zero.clone(), false), t(one.clone(), false), t(zero, true), t(one, true)])
        } else {
            (2, vec![t(BigInt::zero(), false), t(BigInt::one() << (n - 1), false)])
        };
        SubgroupDescriptor::new(&owner, format!("T(2^{n})"), membership, Index::finite(index), Some(reps))
    });
    ChainSchema::new(d, vec![rule], vec![None], Vec::new(), CardinalBound::Aleph0)
}

/// `G ⊃ 1` for a nontrivial finite group, the empty chain for the trivial
/// group. The transversal is the element list when it is small enough.
pub fn finite_group_chain(g: &Group) -> Result<ChainSchema, ChainError> {
    let Some(order) = g.order().finite() else {
        return Err(GroupError::Infinite(g.label().to_string()).into());
    };
    if g.is_trivial() {
        return Ok(ChainSchema::finite(g, Vec::new(), CardinalBound::Aleph0));
    }
    let reps = if *order <= BigUint::from(TRANSVERSAL_CAP) { Some(g.elements()?.to_vec()) } else { None };
    let stage = SubgroupDescriptor::trivial(g, Index::Finite(order.clone()), reps);
    Ok(ChainSchema::finite(g, vec![stage], CardinalBound::Aleph0))
}

/// Left coset representatives of `child` in `parent`: the least element of
/// each coset, in sorted order.
pub fn left_transversal(group: &Group, parent: &BTreeSet<Element>, child: &BTreeSet<Element>) -> Result<Vec<Element>, GroupError> {
    let mut covered = BTreeSet::new();
    let mut reps = Vec::new();
    for x in parent {
        if covered.contains(x) {
            continue;
        }
        for c in child {
            covered.insert(group.multiply(x, c)?);
        }
        reps.push(x.clone());
    }
    Ok(reps)
}

fn set_descriptor(owner: &Group, set: Arc<BTreeSet<Element>>, index: usize, reps: Vec<Element>) -> SubgroupDescriptor {
    let label = format!("<{} elements>", set.len());
    let membership: MemberFn = Arc::new(move |e| Membership::from_bool(set.contains(e)));
    SubgroupDescriptor::new(owner, label, membership, Index::finite(index as u64), Some(reps))
}

/// Finite chain through explicit element sets; `sets[0]` must be the
/// whole group.
pub fn from_subgroup_sets(group: &Group, sets: &[BTreeSet<Element>], kappa: CardinalBound) -> Result<ChainSchema, ChainError> {
    let all: BTreeSet<Element> = group.elements()?.iter().cloned().collect();
    if sets.first() != Some(&all) {
        return Err(ChainError::Precondition("stage 0 must be the whole group".into()));
    }
    let mut stages = Vec::new();
    for pair in sets.windows(2) {
        let (parent, child) = (&pair[0], &pair[1]);
        if !child.is_subset(parent) || child.is_empty() {
            return Err(ChainError::Precondition("stages must descend".into()));
        }
        let reps = left_transversal(group, parent, child)?;
        stages.push(set_descriptor(group, Arc::new(child.clone()), reps.len(), reps));
    }
    Ok(ChainSchema::finite(group, stages, kappa))
}

/// Extends a finite chain ending in `{1}` to length ω with trivial steps.
pub fn promote_to_omega(chain: &ChainSchema) -> Result<ChainSchema, ChainError> {
    if chain.blocks() != 0 {
        return Err(ChainError::Precondition("only finite chains are promoted".into()));
    }
    let tail: Vec<SubgroupDescriptor> = chain.tail_stages().to_vec();
    let group = chain.group().clone();
    let id = group.identity();
    let rule: StageRule = Arc::new(move |n| match tail.get((n - 1) as usize) {
        Some(stage) => stage.clone(),
        None => SubgroupDescriptor::trivial(&group, Index::finite(1), Some(vec![id.clone()])),
    });
    Ok(ChainSchema::new(chain.group(), vec![rule], vec![None], Vec::new(), chain.kappa()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::StagePos;
    use crate::groups::{make_cyclic, make_infinite_dihedral, make_integers, make_symmetric};

    #[test]
    fn two_adic_stages() {
        let chain = two_adic_chain(&make_integers());
        let s3 = chain.stage(StagePos::new(0, 3)).unwrap();
        assert!(s3.contains(&Element::int(-16)).is_member());
        assert_eq!(s3.contains(&Element::int(4)), Membership::NonMember);
        assert_eq!(s3.transversal().unwrap(), &[Element::int(0), Element::int(4)]);
    }

    #[test]
    fn dihedral_first_step_has_index_four() {
        let chain = dihedral_chain(&make_infinite_dihedral());
        let s1 = chain.stage(StagePos::new(0, 1)).unwrap();
        assert_eq!(s1.index(), &Index::finite(4));
        assert_eq!(s1.contains(&Element::dihedral(2, true)), Membership::NonMember);
        assert!(s1.contains(&Element::dihedral(-6, false)).is_member());
    }

    #[test]
    fn finite_chain_of_trivial_group_is_empty() {
        let chain = finite_group_chain(&crate::groups::make_trivial()).unwrap();
        assert_eq!(chain.length(), crate::Ordinal::zero());
        let c6 = finite_group_chain(&make_cyclic(6).unwrap()).unwrap();
        assert_eq!(c6.tail_stages()[0].index(), &Index::finite(6));
    }

    #[test]
    fn transversal_of_a3_in_s3() {
        let s3 = make_symmetric(3).unwrap();
        let all: BTreeSet<Element> = s3.elements().unwrap().iter().cloned().collect();
        let a3: BTreeSet<Element> =
            all.iter().filter(|p| Element::cycles(match p { Element::Perm(v) => v, _ => unreachable!() }).iter().all(|c| c.len() != 2)).cloned().collect();
        assert_eq!(a3.len(), 3);
        let reps = left_transversal(&s3, &all, &a3).unwrap();
        assert_eq!(reps.len(), 2);
    }
}
