//! Ordinal-indexed residual chains.
//!
//! A [`ChainSchema`] of length `ω·q + r` is described by `q` block rules
//! (stage `ω·b + n` for `n ≥ 1`), optional closed forms for the limit
//! stages `ω·b`, and `r` explicit tail stages. Limit stages without a
//! closed form are evaluated lazily as the intersection along the cofinal
//! sequence `ω·b + n`, with a per-element budget.

mod builtin;
mod combinators;
mod depth;
mod verify;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::groups::{Element, Group, GroupError};
use crate::ordinal::CardinalBound;
use crate::Ordinal;

pub use builtin::{dihedral_chain, finite_group_chain, from_subgroup_sets, left_transversal, promote_to_omega, two_adic_chain};
pub use combinators::{
    compress_successor_tail, concat_extension, core_sandwich, diagonal_power_chain, power_chain, pullback, tower_chain,
};
pub use depth::{depth_interval, DepthInterval, PaperClaim};
pub use verify::{verify_prefix, verify_with, ChainCertificate, IndexReport, LevelReport, SeparationReport, Verdict, VerifyOptions};

/// Steps of a block scanned when resolving a lazily evaluated limit stage.
pub const DEFAULT_LIMIT_BUDGET: u64 = 64;

/// Largest transversal materialized by the combinators.
pub const TRANSVERSAL_CAP: usize = 4096;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("stage {stage} is beyond the chain length {length}")]
    StageOutOfRange { stage: String, length: String },
    #[error("chain is over {found}, expected {expected}")]
    GroupMismatch { expected: String, found: String },
    #[error("extension has no kernel group attached")]
    MissingKernel,
    #[error("{0} has no enumeration of its points")]
    MissingEnumeration(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("step into stage {stage} has index {index}, which cannot be multiplied out")]
    UnboundedIndex { stage: String, index: String },
    #[error("no chain constructor registered for {0}")]
    NoConstructor(String),
    #[error("invalid depth {0} reported")]
    InvalidDepth(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NonMember,
    Unresolved,
}

impl Membership {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Membership::Member
        } else {
            Membership::NonMember
        }
    }

    /// Conjunction with `Unresolved` absorbing `Member` but not `NonMember`.
    pub fn and(self, other: Membership) -> Membership {
        match (self, other) {
            (Membership::NonMember, _) | (_, Membership::NonMember) => Membership::NonMember,
            (Membership::Unresolved, _) | (_, Membership::Unresolved) => Membership::Unresolved,
            _ => Membership::Member,
        }
    }

    pub fn is_member(self) -> bool {
        self == Membership::Member
    }
}

/// Index of a stage in the stage before it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Index {
    Finite(BigUint),
    Infinite,
    Unverified,
}

impl Index {
    pub fn finite(n: u64) -> Index {
        Index::Finite(BigUint::from(n))
    }

    pub fn as_finite(&self) -> Option<&BigUint> {
        match self {
            Index::Finite(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => f.write_str("infinite"),
            Index::Unverified => f.write_str("unverified"),
        }
    }
}

impl Serialize for Index {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Index::Finite(n) => match u64::try_from(n) {
                Ok(v) => s.serialize_u64(v),
                Err(_) => s.serialize_str(&n.to_string()),
            },
            other => s.serialize_str(&other.to_string()),
        }
    }
}

pub type MemberFn = Arc<dyn Fn(&Element) -> Membership + Send + Sync>;

/// One subgroup of a chain: membership test, index in the previous stage
/// and, when known, left coset representatives for that step.
#[derive(Clone)]
pub struct SubgroupDescriptor {
    owner: Group,
    label: String,
    membership: MemberFn,
    index: Index,
    transversal: Option<Arc<Vec<Element>>>,
}

impl fmt::Debug for SubgroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubgroupDescriptor")
            .field("owner", &self.owner)
            .field("label", &self.label)
            .field("index", &self.index)
            .field("transversal", &self.transversal.as_ref().map(|t| t.len()))
            .finish()
    }
}

impl SubgroupDescriptor {
    pub fn new(owner: &Group, label: impl Into<String>, membership: MemberFn, index: Index, transversal: Option<Vec<Element>>) -> Self {
        SubgroupDescriptor { owner: owner.clone(), label: label.into(), membership, index, transversal: transversal.map(Arc::new) }
    }

    /// The whole group, as stage 0.
    pub fn whole(owner: &Group) -> Self {
        Self::new(owner, owner.label(), Arc::new(|_| Membership::Member), Index::finite(1), Some(vec![owner.identity()]))
    }

    /// `{1}` with the given index in its predecessor.
    pub fn trivial(owner: &Group, index: Index, transversal: Option<Vec<Element>>) -> Self {
        let id = owner.identity();
        Self::new(owner, "1", Arc::new(move |e| Membership::from_bool(*e == id)), index, transversal)
    }

    pub fn owner(&self) -> &Group {
        &self.owner
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, e: &Element) -> Membership {
        (self.membership)(e)
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    pub fn transversal(&self) -> Option<&[Element]> {
        self.transversal.as_deref().map(Vec::as_slice)
    }

    pub(crate) fn membership_fn(&self) -> MemberFn {
        self.membership.clone()
    }

    pub(crate) fn transversal_arc(&self) -> Option<Arc<Vec<Element>>> {
        self.transversal.clone()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_index(mut self, index: Index, transversal: Option<Vec<Element>>) -> Self {
        self.index = index;
        self.transversal = transversal.map(Arc::new);
        self
    }
}

pub type StageRule = Arc<dyn Fn(u64) -> SubgroupDescriptor + Send + Sync>;

/// Position `ω·block + step` of a stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StagePos {
    pub block: u64,
    pub step: u64,
}

impl StagePos {
    pub fn new(block: u64, step: u64) -> Self {
        StagePos { block, step }
    }

    pub fn ordinal(&self) -> Ordinal {
        Ordinal::omega_affine(self.block, self.step)
    }

    pub fn is_limit(&self) -> bool {
        self.block > 0 && self.step == 0
    }
}

impl fmt::Display for StagePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ordinal())
    }
}

/// An `(ω·q + r)`-indexed chain of subgroups.
#[derive(Clone)]
pub struct ChainSchema {
    group: Group,
    blocks: Vec<StageRule>,
    limits: Vec<Option<SubgroupDescriptor>>,
    tail: Vec<SubgroupDescriptor>,
    kappa: CardinalBound,
    flags: Vec<String>,
}

impl fmt::Debug for ChainSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChainSchema").field("group", &self.group).field("length", &self.length().to_string()).finish()
    }
}

impl ChainSchema {
    /// `blocks[b]` gives stage `ω·b + n` for `n ≥ 1`; `limits[b]`, when
    /// present, is the closed form of stage `ω·(b+1)`.
    pub fn new(
        group: &Group,
        blocks: Vec<StageRule>,
        limits: Vec<Option<SubgroupDescriptor>>,
        tail: Vec<SubgroupDescriptor>,
        kappa: CardinalBound,
    ) -> Self {
        assert_eq!(blocks.len(), limits.len(), "one limit slot per block");
        ChainSchema { group: group.clone(), blocks, limits, tail, kappa, flags: Vec::new() }
    }

    /// Finite chain `G = 𝒞_0 ⊇ stages[0] ⊇ ...`.
    pub fn finite(group: &Group, stages: Vec<SubgroupDescriptor>, kappa: CardinalBound) -> Self {
        Self::new(group, Vec::new(), Vec::new(), stages, kappa)
    }

    pub fn with_flag(mut self, flag: impl Into<String>) -> Self {
        self.flags.push(flag.into());
        self
    }

    pub fn with_kappa(mut self, kappa: CardinalBound) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn kappa(&self) -> CardinalBound {
        self.kappa
    }

    pub fn flags(&self) -> &[String] {
        &self.flags
    }

    /// Number of ω-blocks.
    pub fn blocks(&self) -> u64 {
        self.blocks.len() as u64
    }

    /// Number of tail stages after the last limit.
    pub fn tail_len(&self) -> u64 {
        self.tail.len() as u64
    }

    pub fn length(&self) -> Ordinal {
        Ordinal::omega_affine(self.blocks(), self.tail_len())
    }

    pub(crate) fn block_rule(&self, b: u64) -> &StageRule {
        &self.blocks[b as usize]
    }

    pub(crate) fn limit_closed_form(&self, b: u64) -> Option<&SubgroupDescriptor> {
        self.limits[b as usize].as_ref()
    }

    pub(crate) fn tail_stages(&self) -> &[SubgroupDescriptor] {
        &self.tail
    }

    pub(crate) fn parts(&self) -> (&[StageRule], &[Option<SubgroupDescriptor>], &[SubgroupDescriptor]) {
        (&self.blocks, &self.limits, &self.tail)
    }

    pub fn contains_pos(&self, pos: StagePos) -> bool {
        let q = self.blocks();
        pos.block < q || (pos.block == q && pos.step <= self.tail_len())
    }

    /// Stage at `ω·b + n`, with the default limit budget.
    pub fn stage(&self, pos: StagePos) -> Result<SubgroupDescriptor, ChainError> {
        self.stage_with_budget(pos, DEFAULT_LIMIT_BUDGET)
    }

    pub fn stage_with_budget(&self, pos: StagePos, budget: u64) -> Result<SubgroupDescriptor, ChainError> {
        if !self.contains_pos(pos) {
            return Err(ChainError::StageOutOfRange { stage: pos.to_string(), length: self.length().to_string() });
        }
        if pos.block == 0 && pos.step == 0 {
            return Ok(SubgroupDescriptor::whole(&self.group));
        }
        if pos.step == 0 {
            return Ok(match self.limit_closed_form(pos.block - 1) {
                Some(d) => d.clone(),
                None => self.lazy_limit(pos.block, budget),
            });
        }
        if pos.block < self.blocks() {
            return Ok(self.block_rule(pos.block)(pos.step));
        }
        Ok(self.tail[(pos.step - 1) as usize].clone())
    }

    /// Intersection of block `b - 1`, evaluated along `ω·(b-1) + n` for
    /// `n = 1..=budget`. Never answers `Member`.
    pub fn lazy_limit(&self, b: u64, budget: u64) -> SubgroupDescriptor {
        let rule = self.block_rule(b - 1).clone();
        let membership: MemberFn = Arc::new(move |e| {
            for n in 1..=budget {
                match rule(n).contains(e) {
                    Membership::NonMember => return Membership::NonMember,
                    Membership::Member | Membership::Unresolved => {}
                }
            }
            Membership::Unresolved
        });
        SubgroupDescriptor::new(&self.group, format!("lim {}", StagePos::new(b, 0)), membership, Index::Infinite, None)
    }

    /// Stage at an arbitrary ordinal `i ≤ length`.
    pub fn chain_at(&self, i: &Ordinal) -> Result<SubgroupDescriptor, ChainError> {
        let (b, n) = i.as_omega_affine().ok_or_else(|| ChainError::StageOutOfRange {
            stage: i.to_string(),
            length: self.length().to_string(),
        })?;
        self.stage(StagePos::new(b, n))
    }

    /// The last stage, which must be `{1}`.
    pub fn terminal(&self) -> StagePos {
        StagePos::new(self.blocks(), self.tail_len())
    }

    /// Successor stages `ω·b + 1 ..= ω·b + levels` of every block, then the
    /// tail, in order; each paired with its predecessor.
    pub fn successor_steps(&self, levels: u64) -> Vec<(StagePos, StagePos)> {
        let mut out = Vec::new();
        for b in 0..self.blocks() {
            for n in 1..=levels {
                out.push((StagePos::new(b, n - 1), StagePos::new(b, n)));
            }
        }
        let q = self.blocks();
        for n in 1..=self.tail_len() {
            out.push((StagePos::new(q, n - 1), StagePos::new(q, n)));
        }
        out
    }
}

pub(crate) fn product_index(a: &Index, b: &Index) -> Index {
    match (a, b) {
        (Index::Finite(x), Index::Finite(y)) => Index::Finite(x * y),
        (Index::Infinite, _) | (_, Index::Infinite) => Index::Infinite,
        _ => Index::Unverified,
    }
}

pub(crate) fn one_index() -> Index {
    Index::Finite(BigUint::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_integers, Element};

    #[test]
    fn two_adic_limit_is_lazy() {
        let chain = two_adic_chain(&make_integers());
        let at_omega = chain.chain_at(&Ordinal::omega()).unwrap();
        assert_eq!(at_omega.contains(&Element::int(6)), Membership::NonMember);
        assert_eq!(at_omega.contains(&Element::int(0)), Membership::Unresolved);
        let s0 = chain.chain_at(&Ordinal::zero()).unwrap();
        assert!(s0.contains(&Element::int(12345)).is_member());
        assert!(matches!(
            chain.chain_at(&Ordinal::omega().successor()),
            Err(ChainError::StageOutOfRange { .. })
        ));
        assert_eq!(chain.length(), Ordinal::omega());
    }

    #[test]
    fn membership_conjunction() {
        use Membership::*;
        assert_eq!(Member.and(Unresolved), Unresolved);
        assert_eq!(Unresolved.and(NonMember), NonMember);
        assert_eq!(Member.and(Member), Member);
    }
}
