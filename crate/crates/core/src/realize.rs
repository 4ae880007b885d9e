//! Groups and chains for parsed expressions.

use crate::chains::{
    concat_extension, diagonal_power_chain, dihedral_chain, finite_group_chain, power_chain, promote_to_omega, tower_chain, two_adic_chain, ChainError,
    ChainSchema,
};
use crate::dsl::{GroupExpr, Points};
use crate::groups::{
    finite_support_power, make_alternating, make_cyclic, make_infinite_dihedral, make_integers, make_perm, make_product,
    make_symmetric, make_tower, make_trivial, perm_from_cycles, wreath_self, ExtensionHandle, Group, PointSet,
};

/// Named fixtures that are documented but have no computable model.
pub const DOCUMENTED_FIXTURES: &[&str] = &["higman", "deligne"];

fn unregistered(name: &str) -> ChainError {
    if DOCUMENTED_FIXTURES.contains(&name) {
        ChainError::NoConstructor(format!("{name} (documented fixture without a computable model)"))
    } else {
        ChainError::NoConstructor(name.to_string())
    }
}

fn size(n: u64) -> Result<usize, ChainError> {
    usize::try_from(n).map_err(|_| ChainError::Precondition(format!("{n} is too large")))
}

fn points(p: &Points) -> PointSet {
    match p {
        Points::Naturals => PointSet::naturals(),
        Points::Finite(m) => PointSet::finite_range(*m),
    }
}

pub fn realize_group(e: &GroupExpr) -> Result<Group, ChainError> {
    Ok(match e {
        GroupExpr::Trivial => make_trivial(),
        GroupExpr::Cyclic(n) => make_cyclic(*n)?,
        GroupExpr::Symmetric(n) => make_symmetric(size(*n)?)?,
        GroupExpr::Alternating(n) => make_alternating(size(*n)?)?,
        GroupExpr::Perm { degree, generators } => {
            let d = *degree as usize;
            let gens = generators.iter().map(|cycles| perm_from_cycles(d, cycles)).collect::<Result<Vec<_>, _>>()?;
            make_perm(d, gens)?
        }
        GroupExpr::Int => make_integers(),
        GroupExpr::Dinf => make_infinite_dihedral(),
        GroupExpr::Product(fs) => make_product(fs.iter().map(realize_group).collect::<Result<_, _>>()?),
        GroupExpr::Power(b, p) => finite_support_power(&realize_group(b)?, points(p)),
        GroupExpr::Wreath(k, g) => wreath_self(&realize_group(k)?, &realize_group(g)?)?,
        GroupExpr::Tower(g, n) => make_tower(&realize_group(g)?, *n)?,
        GroupExpr::ExtensionRef(name) => return Err(unregistered(name)),
    })
}

/// The chain the library builds for an expression, together with its
/// group. Finite groups get `G ⊃ 1`.
pub fn realize_chain(e: &GroupExpr) -> Result<ChainSchema, ChainError> {
    let group = realize_group(e)?;
    if group.order().is_finite() {
        return finite_group_chain(&group);
    }
    match e {
        GroupExpr::Int => Ok(two_adic_chain(&group)),
        GroupExpr::Dinf => Ok(dihedral_chain(&group)),
        GroupExpr::Product(fs) => product_chain(&group, fs),
        GroupExpr::Power(b, p) => {
            let base = realize_chain(b)?;
            match p {
                Points::Naturals => power_chain(&omega_ready(&base)?, PointSet::naturals()),
                Points::Finite(m) => diagonal_power_chain(&base, PointSet::finite_range(*m)),
            }
        }
        GroupExpr::Wreath(k, g) => wreath_chain(&group, k, g),
        GroupExpr::Tower(g, n) => {
            let base = realize_group(g)?;
            tower_chain(&base, &realize_chain(g)?, *n)
        }
        _ => Err(ChainError::NoConstructor(e.to_string())),
    }
}

/// A chain usable as a power-chain base: finite chains ending in `{1}` are
/// padded to length ω.
fn omega_ready(chain: &ChainSchema) -> Result<ChainSchema, ChainError> {
    if chain.blocks() == 0 && chain.group().order().is_finite() {
        promote_to_omega(chain)
    } else {
        Ok(chain.clone())
    }
}

fn wreath_chain(group: &Group, k: &GroupExpr, g: &GroupExpr) -> Result<ChainSchema, ChainError> {
    let ext = ExtensionHandle::of_wreath(group)?;
    let top = realize_group(g)?;
    let chain_q = realize_chain(g)?;
    let chain_k = realize_chain(k)?;
    let pts = PointSet::of_group(&top);
    let chain_n = if top.order().is_finite() {
        diagonal_power_chain(&chain_k, pts)?
    } else {
        power_chain(&omega_ready(&chain_k)?, pts)?
    };
    concat_extension(&ext, &chain_q, &chain_n)
}

/// Splits off the factor with the shortest chain as the quotient; the
/// kernel is the product of the rest.
fn product_chain(group: &Group, fs: &[GroupExpr]) -> Result<ChainSchema, ChainError> {
    if fs.is_empty() {
        return finite_group_chain(group);
    }
    let chains = fs.iter().map(realize_chain).collect::<Result<Vec<_>, _>>()?;
    let j = (0..chains.len()).min_by(|&a, &b| chains[a].length().cmp(&chains[b].length())).expect("nonempty");
    let ext = ExtensionHandle::of_product(group, j)?;
    let rest: Vec<GroupExpr> = fs.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, f)| f.clone()).collect();
    let chain_n = realize_chain(&GroupExpr::Product(rest))?;
    concat_extension(&ext, &chains[j], &chain_n)
}
