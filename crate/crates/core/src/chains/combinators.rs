use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use super::{
    one_index, product_index, ChainError, ChainSchema, Index, MemberFn, Membership, StagePos, StageRule, SubgroupDescriptor,
    TRANSVERSAL_CAP,
};
use crate::groups::{commutator_subgroup, finite_support_power, wreath_self, Element, ExtensionHandle, Group, GroupKind, PointSet};
use crate::ordinal::add;

fn check_group(chain: &ChainSchema, expected: &Group) -> Result<(), ChainError> {
    if chain.group() != expected {
        return Err(ChainError::GroupMismatch { expected: expected.label().to_string(), found: chain.group().label().to_string() });
    }
    Ok(())
}

/// Applies `f` to every stage of `chain`, producing a chain over `group`
/// with the same shape.
fn map_stages<F>(chain: &ChainSchema, group: &Group, f: F) -> ChainSchema
where
    F: Fn(&SubgroupDescriptor) -> SubgroupDescriptor + Send + Sync + 'static,
{
    let f = Arc::new(f);
    let (blocks, limits, tail) = chain.parts();
    let blocks = blocks
        .iter()
        .map(|rule| {
            let (rule, f) = (rule.clone(), f.clone());
            Arc::new(move |n| f(&rule(n))) as StageRule
        })
        .collect();
    let limits = limits.iter().map(|l| l.as_ref().map(|d| f(d))).collect();
    let tail = tail.iter().map(|d| f(d)).collect();
    let mut out = ChainSchema::new(group, blocks, limits, tail, chain.kappa());
    out.flags = chain.flags.clone();
    out
}

fn pull(ext: &Arc<ExtensionHandle>, d: &SubgroupDescriptor) -> SubgroupDescriptor {
    let inner = d.membership_fn();
    let e2 = ext.clone();
    let membership: MemberFn = Arc::new(move |e| match e2.project(e) {
        Ok(q) => inner(&q),
        Err(_) => Membership::NonMember,
    });
    let reps = d.transversal().and_then(|t| t.iter().map(|q| ext.lift(q).and_then(Result::ok)).collect::<Option<Vec<_>>>());
    SubgroupDescriptor::new(ext.total(), format!("pi^-1({})", d.label()), membership, d.index().clone(), reps)
}

fn embed(ext: &Arc<ExtensionHandle>, d: &SubgroupDescriptor) -> SubgroupDescriptor {
    let inner = d.membership_fn();
    let e2 = ext.clone();
    let membership: MemberFn = Arc::new(move |e| match e2.restrict(e) {
        Some(k) => inner(&k),
        None => Membership::NonMember,
    });
    let reps = d.transversal().and_then(|t| t.iter().map(|k| ext.include(k).and_then(Result::ok)).collect::<Option<Vec<_>>>());
    SubgroupDescriptor::new(ext.total(), format!("N:{}", d.label()), membership, d.index().clone(), reps)
}

/// `π^{-1}` of every stage of a chain on the quotient.
pub fn pullback(ext: &ExtensionHandle, chain_q: &ChainSchema) -> Result<ChainSchema, ChainError> {
    check_group(chain_q, ext.quotient())?;
    let ext = Arc::new(ext.clone());
    let total = ext.total().clone();
    Ok(map_stages(chain_q, &total, move |d| pull(&ext, d)))
}

/// Chain on the total group of `1 → N → G → Q → 1`: the pullback of the
/// `Q`-chain, followed by the `N`-chain inside the kernel. Length is the
/// ordinal sum of the two lengths.
pub fn concat_extension(ext: &ExtensionHandle, chain_q: &ChainSchema, chain_n: &ChainSchema) -> Result<ChainSchema, ChainError> {
    check_group(chain_q, ext.quotient())?;
    let kernel = ext.kernel().ok_or(ChainError::MissingKernel)?.clone();
    check_group(chain_n, &kernel)?;
    let ext = Arc::new(ext.clone());
    let total = ext.total().clone();
    let kappa = chain_q.kappa().max(chain_n.kappa());

    let pulled = map_stages(chain_q, &total, {
        let ext = ext.clone();
        move |d| pull(&ext, d)
    });
    let embedded = map_stages(chain_n, &total, {
        let ext = ext.clone();
        move |d| embed(&ext, d)
    });
    let (q_blocks, q_limits, q_tail) = pulled.parts();
    let (n_blocks, n_limits, n_tail) = embedded.parts();
    let (q1, r1) = (q_blocks.len(), q_tail.len());

    let kernel_stage = {
        let e2 = ext.clone();
        let membership: MemberFn = Arc::new(move |e| match e2.kernel_contains(e) {
            Ok(b) => Membership::from_bool(b),
            Err(_) => Membership::NonMember,
        });
        SubgroupDescriptor::new(&total, "ker pi", membership, Index::Infinite, None)
    };

    let mut blocks: Vec<StageRule> = q_blocks.to_vec();
    let mut limits: Vec<Option<SubgroupDescriptor>> = q_limits.to_vec();
    if r1 == 0 && q1 > 0 {
        limits[q1 - 1] = Some(kernel_stage);
    }
    let tail = if n_blocks.is_empty() {
        q_tail.iter().chain(n_tail).cloned().collect()
    } else {
        let q_tail_owned: Vec<SubgroupDescriptor> = q_tail.to_vec();
        let first = n_blocks[0].clone();
        let merged: StageRule = Arc::new(move |n| {
            let n_usize = n as usize;
            if n_usize <= q_tail_owned.len() {
                q_tail_owned[n_usize - 1].clone()
            } else {
                first(n - q_tail_owned.len() as u64)
            }
        });
        blocks.push(merged);
        limits.push(n_limits[0].clone());
        blocks.extend(n_blocks[1..].iter().cloned());
        limits.extend(n_limits[1..].iter().cloned());
        n_tail.to_vec()
    };
    let mut out = ChainSchema::new(&total, blocks, limits, tail, kappa);
    out.flags = chain_q.flags.iter().chain(&chain_n.flags).cloned().collect();
    out.flags.dedup();
    debug_assert_eq!(out.length(), add(&chain_q.length(), &chain_n.length()));
    Ok(out)
}

/// Replaces a tail of `n ≥ 2` finite steps after the last limit by one step
/// straight to the final stage.
pub fn compress_successor_tail(chain: &ChainSchema) -> Result<ChainSchema, ChainError> {
    let (blocks, limits, tail) = chain.parts();
    if tail.len() < 2 {
        return Err(ChainError::Precondition(format!("tail of length {} has nothing to compress", tail.len())));
    }
    let base = StagePos::new(chain.blocks(), 0);
    let mut index = BigUint::one();
    for (k, d) in tail.iter().enumerate() {
        match d.index() {
            Index::Finite(i) => index *= i,
            other => {
                let stage = StagePos::new(base.block, k as u64 + 1);
                return Err(ChainError::UnboundedIndex { stage: stage.to_string(), index: other.to_string() });
            }
        }
    }
    let group = chain.group();
    let reps = if index <= BigUint::from(TRANSVERSAL_CAP) && tail.iter().all(|d| d.transversal().is_some()) {
        let mut acc = vec![group.identity()];
        for d in tail {
            let mut next = Vec::with_capacity(acc.len() * d.transversal().map_or(0, |t| t.len()));
            for a in &acc {
                for t in d.transversal().unwrap_or_default() {
                    next.push(group.multiply(a, t)?);
                }
            }
            acc = next;
        }
        Some(acc)
    } else {
        None
    };
    let last = tail[tail.len() - 1].clone().with_index(Index::Finite(index), reps);
    let mut out = ChainSchema::new(group, blocks.to_vec(), limits.to_vec(), vec![last], chain.kappa());
    out.flags = chain.flags.clone();
    Ok(out)
}

/// Finite-support functions in `set`, one factor transversal per point.
fn product_transversal(base: &Group, factors: &[(Element, Arc<Vec<Element>>)]) -> Option<Vec<Element>> {
    let size = factors.iter().try_fold(1usize, |acc, (_, t)| acc.checked_mul(t.len()))?;
    if size > TRANSVERSAL_CAP {
        return None;
    }
    let mut acc: Vec<BTreeMap<Element, Element>> = vec![BTreeMap::new()];
    for (point, reps) in factors {
        let mut next = Vec::with_capacity(acc.len() * reps.len());
        for f in &acc {
            for r in reps.iter() {
                let mut g = f.clone();
                if !base.is_identity(r) {
                    g.insert(point.clone(), r.clone());
                }
                next.push(g);
            }
        }
        acc = next;
    }
    Some(acc.into_iter().map(Element::FinSupport).collect())
}

fn all_values_in(owner: &Group, d: &SubgroupDescriptor, label: String, index: Index, reps: Option<Vec<Element>>) -> SubgroupDescriptor {
    let inner = d.membership_fn();
    let membership: MemberFn = Arc::new(move |e| match e {
        Element::FinSupport(f) => f.values().fold(Membership::Member, |acc, v| acc.and(inner(v))),
        _ => Membership::NonMember,
    });
    SubgroupDescriptor::new(owner, label, membership, index, reps)
}

/// Chain on `G^(X)` from an `ω·q` chain on `G` and an enumeration
/// `x_0, x_1, ...` of `X`. Within block `b`, stage `ω·b + n` asks
/// `f(x_i) ∈ 𝒞_{ω·b + n - i}` for `i < n` and `f(x) ∈ 𝒞_{ω·b}` elsewhere.
pub fn power_chain(base_chain: &ChainSchema, points: PointSet) -> Result<ChainSchema, ChainError> {
    if base_chain.tail_len() != 0 || base_chain.blocks() == 0 {
        return Err(ChainError::Precondition(format!(
            "power_chain needs a base chain of length w*q with q >= 1, got {}",
            base_chain.length()
        )));
    }
    let enumeration = points.enumeration().ok_or_else(|| ChainError::MissingEnumeration(points.label().to_string()))?.clone();
    let base_group = base_chain.group().clone();
    let group = finite_support_power(&base_group, points.clone());
    let base = Arc::new(base_chain.clone());

    let mut blocks: Vec<StageRule> = Vec::new();
    for b in 0..base_chain.blocks() {
        let (base, group, base_group, enumeration) = (base.clone(), group.clone(), base_group.clone(), enumeration.clone());
        blocks.push(Arc::new(move |n| {
            let b2 = base.clone();
            let en = enumeration.clone();
            let membership: MemberFn = Arc::new(move |e| {
                let Element::FinSupport(f) = e else { return Membership::NonMember };
                let mut acc = Membership::Member;
                for (p, v) in f {
                    let Some(i) = en.index_of(p) else { return Membership::NonMember };
                    let pos = if i < n { StagePos::new(b, n - i) } else { StagePos::new(b, 0) };
                    let m = match b2.stage(pos) {
                        Ok(d) => d.contains(v),
                        Err(_) => Membership::NonMember,
                    };
                    acc = acc.and(m);
                    if acc == Membership::NonMember {
                        break;
                    }
                }
                acc
            });
            let mut index = one_index();
            let mut factors = Vec::new();
            let mut complete = true;
            for i in 0..n {
                let stage = base.stage(StagePos::new(b, n - i)).expect("block stage in range");
                index = product_index(&index, stage.index());
                match stage.transversal_arc() {
                    Some(t) => factors.push((enumeration.nth(i), t)),
                    None => complete = false,
                }
            }
            let reps = if complete { product_transversal(&base_group, &factors) } else { None };
            SubgroupDescriptor::new(&group, format!("H({})", StagePos::new(b, n)), membership, index, reps)
        }));
    }
    let limits = (0..base_chain.blocks())
        .map(|b| {
            base.limit_closed_form(b)
                .map(|d| all_values_in(&group, d, format!("H({})", StagePos::new(b + 1, 0)), Index::Infinite, None))
        })
        .collect();
    let mut out = ChainSchema::new(&group, blocks, limits, Vec::new(), base_chain.kappa());
    out.flags = base_chain.flags.clone();
    Ok(out)
}

/// Chain on `G^m` (functions on a finite point set) with stage `i` the
/// functions taking every value in `𝒞_i`.
pub fn diagonal_power_chain(base_chain: &ChainSchema, points: PointSet) -> Result<ChainSchema, ChainError> {
    let PointSet::Finite { points: pts, .. } = &points else {
        return Err(ChainError::Precondition(format!("{} is not a finite point set", points.label())));
    };
    let pts = pts.clone();
    let m = pts.len();
    let base_group = base_chain.group().clone();
    let group = finite_support_power(&base_group, points.clone());
    let g2 = group.clone();
    let out = map_stages(base_chain, &group, move |d| {
        let index = match d.index() {
            Index::Finite(i) if m > 0 => Index::Finite(num_traits::pow(i.clone(), m)),
            Index::Finite(_) => one_index(),
            other => other.clone(),
        };
        let reps = d.transversal_arc().and_then(|t| {
            let factors: Vec<_> = pts.iter().map(|p| (p.clone(), t.clone())).collect();
            product_transversal(&base_group, &factors)
        });
        all_values_in(&g2, d, format!("{}^{m}", d.label()), index, reps)
    });
    Ok(out)
}

/// Chain of length `ω·n` on `G_n` where `G_1 = G`, `G_{i+1} = G_i ≀ G`.
pub fn tower_chain(g: &Group, g_chain: &ChainSchema, n: u64) -> Result<ChainSchema, ChainError> {
    if n == 0 {
        return Err(ChainError::Precondition("tower height must be at least 1".into()));
    }
    check_group(g_chain, g)?;
    if g_chain.blocks() != 1 || g_chain.tail_len() != 0 {
        return Err(ChainError::Precondition(format!("tower needs a chain of length w on the base group, got {}", g_chain.length())));
    }
    if g.order().is_finite() {
        return Err(ChainError::Precondition(format!("{} is finite", g.label())));
    }
    if !g.claims().residually_finite {
        return Err(ChainError::Precondition(format!("{} is not flagged residually finite", g.label())));
    }
    let points = PointSet::of_group(g);
    if points.enumeration().is_none() {
        return Err(ChainError::MissingEnumeration(g.label().to_string()));
    }
    let mut chain = g_chain.clone();
    for _ in 1..n {
        let wreath = wreath_self(chain.group(), g)?;
        let ext = ExtensionHandle::of_wreath(&wreath)?;
        let chain_n = power_chain(&chain, points.clone())?;
        chain = concat_extension(&ext, g_chain, &chain_n)?;
    }
    let claims = g.claims();
    Ok(chain
        .with_flag("length is an upper bound on depth")
        .with_flag(format!(
            "exact depth w*{n} is claimed when {} is residually finite ({}) with finite abelianization ({}); both asserted, not verified",
            g.label(),
            claims.residually_finite,
            claims.finite_abelianization
        )))
}

/// Lower and upper bounds `[K,K]^(G) ≤ Core ≤ K^(G)` inside `K ≀ G`.
pub fn core_sandwich(wreath: &Group) -> Result<(SubgroupDescriptor, SubgroupDescriptor), ChainError> {
    let GroupKind::Wreath { base, top, .. } = wreath.kind() else {
        return Err(ChainError::Precondition(format!("{} is not a wreath product", wreath.label())));
    };
    if top.order().is_finite() || !top.claims().residually_finite {
        return Err(ChainError::Precondition(format!("top group {} must be infinite and residually finite", top.label())));
    }
    if !base.order().is_finite() {
        return Err(ChainError::Precondition(format!("base {} is not finite", base.label())));
    }
    let derived = commutator_subgroup(base)?;
    let top_id = top.identity();
    let lower: MemberFn = {
        let top_id = top_id.clone();
        Arc::new(move |e| match e {
            Element::Wreath { fs, top } if **top == top_id => {
                Membership::from_bool(fs.as_fin_support().is_some_and(|f| f.values().all(|v| derived.contains(v))))
            }
            _ => Membership::NonMember,
        })
    };
    let upper: MemberFn = Arc::new(move |e| Membership::from_bool(e.top_part() == Some(&top_id)));
    let lower = SubgroupDescriptor::new(wreath, format!("[{0},{0}]^({1})", base.label(), top.label()), lower, Index::Unverified, None);
    let upper = SubgroupDescriptor::new(wreath, format!("{}^({})", base.label(), top.label()), upper, Index::Infinite, None);
    Ok((lower, upper))
}
