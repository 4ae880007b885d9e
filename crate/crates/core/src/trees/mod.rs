//! Rooted coset trees of residual chains.
//!
//! Level `k` of block `b` holds the cosets of `𝒞_{ω·b+k}` inside
//! `𝒞_{ω·b}`. A vertex is the tuple of transversal digits `(d_1, ..., d_k)`
//! naming the coset `t_{d_1} ... t_{d_k} 𝒞_{ω·b+k}`, stored in mixed radix so
//! the parent of `v` is `v / f_k` for the fibre size `f_k`.

mod emit;

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::chains::{from_subgroup_sets, ChainError, ChainSchema, Index, MemberFn, Membership, StagePos, SubgroupDescriptor};
use crate::groups::{probe_elements, Element, ProbeConfig};
use crate::ordinal::CardinalBound;
use crate::Ordinal;

pub use emit::{emit, parse_json, Format};

/// Most vertices a truncation may hold.
pub const VERTEX_CAP: usize = 1 << 20;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("level {0} cannot be materialized: {1}")]
    NonMaterializable(String, String),
    #[error("element {0} does not act on this truncation")]
    Foreign(String),
    #[error("thread is not coherent: {0}")]
    Incoherent(String),
    #[error("level {level} is not materialized (depth {depth})")]
    Unmaterialized { level: usize, depth: usize },
    #[error("membership of {element} in stage {stage} could not be decided")]
    Unresolved { element: String, stage: String },
    #[error("truncation has no chain attached")]
    Detached,
    #[error("malformed truncation: {0}")]
    Parse(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// The coset tree of a chain, evaluated on demand.
#[derive(Clone, Debug)]
pub struct AlphaTreeSchema {
    chain: ChainSchema,
}

pub fn coset_tree(chain: &ChainSchema) -> AlphaTreeSchema {
    AlphaTreeSchema { chain: chain.clone() }
}

impl AlphaTreeSchema {
    pub fn chain(&self) -> &ChainSchema {
        &self.chain
    }

    pub fn depth(&self) -> Ordinal {
        self.chain.length()
    }

    pub fn kappa(&self) -> CardinalBound {
        self.chain.kappa()
    }

    /// Number of children of a level-`pos` vertex, when finite.
    pub fn fibre_size(&self, pos: StagePos) -> Result<usize, TreeError> {
        let stage = self.chain.stage(pos)?;
        materializable(pos, &stage).map(|t| t.len())
    }
}

fn materializable(pos: StagePos, stage: &SubgroupDescriptor) -> Result<Vec<Element>, TreeError> {
    let bad = |why: &str| TreeError::NonMaterializable(pos.to_string(), why.to_string());
    if pos.is_limit() {
        return Err(bad("limit levels are threads, not finite fibres"));
    }
    match (stage.index(), stage.transversal()) {
        (Index::Finite(k), Some(t)) if k.to_usize() == Some(t.len()) => Ok(t.to_vec()),
        (Index::Finite(_), None) => Err(bad("no coset representatives")),
        (Index::Finite(_), Some(_)) => Err(bad("transversal size disagrees with index")),
        (Index::Infinite, _) => Err(bad("infinite index")),
        (Index::Unverified, _) => Err(bad("unverified index")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub size: usize,
    /// Parent of each vertex, as an index into the previous level.
    pub parents: Vec<usize>,
}

/// Levels `0..=depth` of one ω-block of a coset tree.
#[derive(Clone)]
pub struct TreeTruncation {
    block: u64,
    levels: Vec<Level>,
    provenance: String,
    source: Option<Source>,
}

#[derive(Clone)]
struct Source {
    chain: ChainSchema,
    /// Transversal for each step `1..=depth`.
    reps: Vec<Arc<Vec<Element>>>,
    stages: Vec<SubgroupDescriptor>,
}

impl std::fmt::Debug for TreeTruncation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TreeTruncation").field("block", &self.block).field("levels", &self.levels).field("provenance", &self.provenance).finish()
    }
}

impl PartialEq for TreeTruncation {
    fn eq(&self, other: &Self) -> bool {
        self.block == other.block && self.levels == other.levels && self.provenance == other.provenance
    }
}

/// Materializes the first `d` finite levels of block `block`.
pub fn truncate(tree: &AlphaTreeSchema, d: usize, block: u64) -> Result<TreeTruncation, TreeError> {
    let chain = tree.chain();
    let available = if block < chain.blocks() {
        None
    } else if block == chain.blocks() {
        Some(chain.tail_len() as usize)
    } else {
        return Err(TreeError::NonMaterializable(StagePos::new(block, 0).to_string(), format!("chain has length {}", chain.length())));
    };
    if let Some(a) = available {
        if d > a {
            return Err(TreeError::NonMaterializable(
                StagePos::new(block, d as u64).to_string(),
                format!("chain has length {}", chain.length()),
            ));
        }
    }
    let mut levels = vec![Level { size: 1, parents: Vec::new() }];
    let mut reps = Vec::with_capacity(d);
    let mut stages = vec![chain.stage(StagePos::new(block, 0))?];
    for k in 1..=d {
        let pos = StagePos::new(block, k as u64);
        let stage = chain.stage(pos)?;
        let t = materializable(pos, &stage)?;
        let prev = levels[k - 1].size;
        let size = prev.checked_mul(t.len()).filter(|&s| s <= VERTEX_CAP).ok_or_else(|| {
            TreeError::NonMaterializable(pos.to_string(), format!("more than {VERTEX_CAP} vertices"))
        })?;
        let f = t.len();
        levels.push(Level { size, parents: (0..size).map(|v| v / f).collect() });
        reps.push(Arc::new(t));
        stages.push(stage);
    }
    let provenance = format!("coset tree of {} (chain length {}), block {block}", chain.group().label(), chain.length());
    Ok(TreeTruncation { block, levels, provenance, source: Some(Source { chain: chain.clone(), reps, stages }) })
}

impl TreeTruncation {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn block(&self) -> u64 {
        self.block
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.size).collect()
    }

    /// Children per vertex at each step `1..=depth`.
    pub fn fibre_sizes(&self) -> Vec<usize> {
        self.levels.windows(2).map(|w| w[1].size / w[0].size.max(1)).collect()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn parent(&self, level: usize, v: usize) -> usize {
        self.levels[level].parents[v]
    }

    fn source(&self) -> Result<&Source, TreeError> {
        self.source.as_ref().ok_or(TreeError::Detached)
    }

    fn check_level(&self, level: usize) -> Result<(), TreeError> {
        if level > self.depth() {
            return Err(TreeError::Unmaterialized { level, depth: self.depth() });
        }
        Ok(())
    }

    /// `E_i^j`: the level-`i` ancestor of every level-`j` vertex.
    pub fn restriction_map(&self, i: usize, j: usize) -> Result<Vec<usize>, TreeError> {
        self.check_level(j)?;
        if i > j {
            return Err(TreeError::Unmaterialized { level: i, depth: j });
        }
        Ok((0..self.levels[j].size)
            .map(|mut v| {
                for l in (i + 1..=j).rev() {
                    v = self.parent(l, v);
                }
                v
            })
            .collect())
    }

    /// Group element whose left coset is vertex `v` at `level`.
    pub fn representative(&self, level: usize, v: usize) -> Result<Element, TreeError> {
        self.check_level(level)?;
        let src = self.source()?;
        let group = src.chain.group();
        let mut digits = Vec::with_capacity(level);
        let mut u = v;
        for k in (1..=level).rev() {
            let f = src.reps[k - 1].len();
            digits.push(u % f);
            u /= f;
        }
        digits.reverse();
        let mut acc = group.identity();
        for (k, d) in digits.into_iter().enumerate() {
            acc = group.multiply(&acc, &src.reps[k][d]).map_err(ChainError::from)?;
        }
        Ok(acc)
    }

    /// Vertex at `level` holding `x`; `x` must lie in the block's root stage.
    pub fn locate(&self, x: &Element, level: usize) -> Result<usize, TreeError> {
        self.check_level(level)?;
        let src = self.source()?;
        let group = src.chain.group();
        let unresolved = |k: usize| TreeError::Unresolved { element: x.to_string(), stage: StagePos::new(self.block, k as u64).to_string() };
        match src.stages[0].contains(x) {
            Membership::Member => {}
            Membership::NonMember => return Err(TreeError::Foreign(x.to_string())),
            Membership::Unresolved => return Err(unresolved(0)),
        }
        let mut y = x.clone();
        let mut v = 0usize;
        for k in 1..=level {
            let reps = &src.reps[k - 1];
            let mut found = None;
            for (d, t) in reps.iter().enumerate() {
                let cand = group.multiply(&group.invert(t).map_err(ChainError::from)?, &y).map_err(ChainError::from)?;
                match src.stages[k].contains(&cand) {
                    Membership::Member => {
                        found = Some((d, cand));
                        break;
                    }
                    Membership::NonMember => {}
                    Membership::Unresolved => return Err(unresolved(k)),
                }
            }
            let (d, rest) = found.ok_or_else(|| unresolved(k))?;
            v = v * reps.len() + d;
            y = rest;
        }
        Ok(v)
    }

    /// Left translation by `g` on every materialized level.
    pub fn act(&self, g: &Element) -> Result<TreeAutomorphism, TreeError> {
        let src = self.source()?;
        let group = src.chain.group();
        if !group.contains(g) {
            return Err(TreeError::Foreign(g.to_string()));
        }
        if src.stages[0].contains(g) != Membership::Member {
            return Err(TreeError::Foreign(format!("{g} (does not fix the root of block {})", self.block)));
        }
        let mut tables = Vec::with_capacity(self.levels.len());
        for (level, l) in self.levels.iter().enumerate() {
            let mut row = Vec::with_capacity(l.size);
            for v in 0..l.size {
                let r = self.representative(level, v)?;
                let gr = group.multiply(g, &r).map_err(ChainError::from)?;
                row.push(self.locate(&gr, level)?);
            }
            tables.push(row);
        }
        Ok(TreeAutomorphism { tables })
    }

    /// Stabilizers of the vertices along `thread` (one vertex per level,
    /// starting at the root), as a finite chain. Needs block 0.
    pub fn stabilizer_chain(&self, thread: &[usize]) -> Result<ChainSchema, TreeError> {
        let src = self.source()?;
        if self.block != 0 {
            return Err(TreeError::Incoherent("stabilizer chains start at the root of block 0".into()));
        }
        if thread.len() != self.levels.len() || thread[0] != 0 {
            return Err(TreeError::Incoherent(format!("expected {} vertices starting at the root", self.levels.len())));
        }
        for k in 1..thread.len() {
            if thread[k] >= self.levels[k].size || self.parent(k, thread[k]) != thread[k - 1] {
                return Err(TreeError::Incoherent(format!("vertex {} at level {k} is not a child of {}", thread[k], thread[k - 1])));
            }
        }
        let group = src.chain.group().clone();
        let kappa = src.chain.kappa();
        if let Ok(elements) = group.elements() {
            let mut sets = vec![elements.iter().cloned().collect::<BTreeSet<Element>>()];
            for (k, &v) in thread.iter().enumerate().skip(1) {
                let mut stab = BTreeSet::new();
                for g in elements.iter() {
                    let r = self.representative(k, v)?;
                    if self.locate(&group.multiply(g, &r).map_err(ChainError::from)?, k)? == v {
                        stab.insert(g.clone());
                    }
                }
                sets.push(stab);
            }
            return Ok(from_subgroup_sets(&group, &sets, kappa)?);
        }
        let mut stages = Vec::new();
        for (k, &v) in thread.iter().enumerate().skip(1) {
            let r = self.representative(k, v)?;
            let r_inv = group.invert(&r).map_err(ChainError::from)?;
            let inner = src.stages[k].membership_fn();
            let g2 = group.clone();
            let (r2, ri2) = (r.clone(), r_inv.clone());
            let membership: MemberFn = Arc::new(move |g| match g2.product([&ri2, g, &r2]) {
                Ok(c) => inner(&c),
                Err(_) => Membership::NonMember,
            });
            let reps = src.reps[k - 1]
                .iter()
                .map(|t| group.product([&r, t, &r_inv]))
                .collect::<Result<Vec<_>, _>>()
                .map_err(ChainError::from)?;
            let index = Index::finite(reps.len() as u64);
            stages.push(SubgroupDescriptor::new(&group, format!("Stab(v{k})"), membership, index, Some(reps)));
        }
        Ok(ChainSchema::finite(&group, stages, kappa))
    }

    /// The thread through the identity: vertex 0 at every level.
    pub fn identity_thread(&self) -> Vec<usize> {
        vec![0; self.levels.len()]
    }
}

/// Bijections of each materialized level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeAutomorphism {
    tables: Vec<Vec<usize>>,
}

impl TreeAutomorphism {
    pub fn apply(&self, level: usize, v: usize) -> usize {
        self.tables[level][v]
    }

    pub fn level(&self, level: usize) -> &[usize] {
        &self.tables[level]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TreeAutomorphism) -> TreeAutomorphism {
        let tables = self.tables.iter().zip(&other.tables).map(|(a, b)| b.iter().map(|&v| a[v]).collect()).collect();
        TreeAutomorphism { tables }
    }

    pub fn is_identity(&self) -> bool {
        self.tables.iter().all(|t| t.iter().enumerate().all(|(i, &v)| i == v))
    }

    /// `E_k ∘ g_{k+1} = g_k ∘ E_k` on every materialized edge.
    pub fn commutes_with(&self, tr: &TreeTruncation) -> bool {
        (1..self.tables.len()).all(|k| (0..self.tables[k].len()).all(|v| tr.parent(k, self.tables[k][v]) == self.tables[k - 1][tr.parent(k, v)]))
    }

    pub fn is_bijective(&self) -> bool {
        self.tables.iter().all(|t| {
            let set: BTreeSet<usize> = t.iter().copied().collect();
            set.len() == t.len() && set.iter().all(|&v| v < t.len())
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeMove {
    pub probe: String,
    /// First stage whose identity-coset vertex the probe moves.
    pub moved_at: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplicityReport {
    /// Every element was checked against every deepest vertex.
    pub exhaustive: bool,
    /// Only ever set by an exhaustive check.
    pub simple: bool,
    /// A nontrivial element fixing a deepest vertex.
    pub violation: Option<String>,
    pub probes: Vec<ProbeMove>,
}

impl SimplicityReport {
    pub fn unresolved(&self) -> usize {
        self.probes.iter().filter(|p| p.moved_at.is_none()).count()
    }
}

/// Fixed-point-freeness on the deepest level.
///
/// When the truncation reaches the end of a finite chain over a finite
/// group, every element is checked against every deepest vertex.
/// Otherwise each probe is reported with the first stage `𝒞_i` it leaves,
/// i.e. the first level where it moves the identity thread, scanning at
/// most `budget` steps per block.
pub fn verify_simple(tr: &TreeTruncation, probes: usize, seed: u64, budget: u64) -> Result<SimplicityReport, TreeError> {
    let src = tr.source()?;
    let chain = &src.chain;
    let group = chain.group();
    let complete = chain.blocks() == 0 && tr.block == 0 && tr.depth() as u64 == chain.tail_len();
    if complete {
        if let Ok(elements) = group.elements() {
            let deepest = tr.depth();
            let mut violation = None;
            for g in elements.iter().filter(|g| !group.is_identity(g)) {
                let aut = tr.act(g)?;
                if let Some(v) = (0..tr.levels[deepest].size).find(|&v| aut.apply(deepest, v) == v) {
                    violation = Some(format!("{g} fixes vertex {deepest}:{v}"));
                    break;
                }
            }
            return Ok(SimplicityReport { exhaustive: true, simple: violation.is_none(), violation, probes: Vec::new() });
        }
    }
    let probes = probe_elements(group, &ProbeConfig { count: probes, max_len: 8, seed });
    let mut moves = Vec::with_capacity(probes.len());
    let mut violation = None;
    let last = chain.stage(chain.terminal()).ok();
    for p in &probes {
        let terminal = last.as_ref().map(|d| d.contains(p));
        let moved_at = first_moved(chain, p, budget);
        if moved_at.is_none() && violation.is_none() && !group.is_identity(p) && terminal == Some(Membership::Member) {
            violation = Some(format!("{p} fixes the identity thread"));
        }
        moves.push(ProbeMove { probe: p.to_string(), moved_at: moved_at.map(|s| s.to_string()) });
    }
    Ok(SimplicityReport { exhaustive: false, simple: false, violation, probes: moves })
}

fn first_moved(chain: &ChainSchema, p: &Element, budget: u64) -> Option<StagePos> {
    let q = chain.blocks();
    for b in 0..=q {
        let steps = if b < q { budget } else { chain.tail_len() };
        let start = if b > 0 { 0 } else { 1 };
        for n in start..=steps {
            let pos = StagePos::new(b, n);
            if chain.stage_with_budget(pos, budget).map(|d| d.contains(p)) == Ok(Membership::NonMember) {
                return Some(pos);
            }
        }
    }
    None
}
