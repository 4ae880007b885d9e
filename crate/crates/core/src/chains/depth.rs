use serde::Serialize;

use super::ChainError;
use crate::dsl::GroupExpr;
use crate::ordinal::{classify, DepthClass};
use crate::realize::{realize_chain, realize_group};
use crate::Ordinal;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PaperClaim {
    pub value: Ordinal,
    pub citation: String,
}

/// Bounds on the residual finiteness depth of an expression's group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthInterval {
    /// From registered facts only.
    pub lower: Ordinal,
    /// Length of an explicitly constructed chain.
    pub upper: Ordinal,
    pub paper_claimed: Option<PaperClaim>,
    pub flags: Vec<String>,
}

const TOWER_CITATION: &str = "iterated wreath tower G_1 = G, G_(i+1) = G_i wr G";
const TOWER_WREATH_CITATION: &str = "iterated wreath tower wreathed with a finite group";

/// `(G, n)` when the expression is `G_n` for an infinite `G` carrying both
/// claims; a plain such `G` counts as `G_1`.
fn tower_parts(e: &GroupExpr) -> Option<(GroupExpr, u64)> {
    let (g, n) = match e {
        GroupExpr::Tower(g, n) => ((**g).clone(), *n),
        other => (other.clone(), 1),
    };
    let group = realize_group(&g).ok()?;
    let claims = group.claims();
    (!group.order().is_finite() && claims.residually_finite && claims.finite_abelianization).then_some((g, n))
}

pub fn depth_interval(e: &GroupExpr) -> Result<DepthInterval, ChainError> {
    let group = realize_group(e)?;
    let chain = realize_chain(e)?;
    let lower = if group.is_trivial() {
        Ordinal::zero()
    } else if group.order().is_finite() {
        Ordinal::one()
    } else {
        Ordinal::omega()
    };
    let upper = chain.length();
    let mut flags = chain.flags().to_vec();

    let paper_claimed = match e {
        GroupExpr::Tower(..) => tower_parts(e).map(|(_, n)| PaperClaim { value: Ordinal::omega_affine(n, 0), citation: TOWER_CITATION.into() }),
        GroupExpr::Wreath(inner, h) if realize_group(h)?.order().is_finite() => tower_parts(inner).map(|(_, n)| PaperClaim {
            value: Ordinal::omega_affine(n, 1),
            citation: TOWER_WREATH_CITATION.into(),
        }),
        _ => None,
    };
    if let Some(claim) = &paper_claimed {
        if claim.value < lower || claim.value > upper {
            flags.push(format!(
                "discrepancy: claimed depth {} lies outside the certified interval [{lower}, {upper}]",
                claim.value
            ));
        }
    }
    for v in [Some(&lower), Some(&upper), paper_claimed.as_ref().map(|c| &c.value)].into_iter().flatten() {
        if classify(v) == DepthClass::Invalid {
            return Err(ChainError::InvalidDepth(v.to_string()));
        }
    }
    if lower > upper {
        return Err(ChainError::InvalidDepth(format!("[{lower}, {upper}]")));
    }
    Ok(DepthInterval { lower, upper, paper_claimed, flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_expr;

    fn interval(text: &str) -> DepthInterval {
        depth_interval(&parse_expr(text).unwrap()).unwrap()
    }

    #[test]
    fn finite_facts() {
        let t = interval("1");
        assert_eq!((t.lower, t.upper), (Ordinal::zero(), Ordinal::zero()));
        let c = interval("C(6)");
        assert_eq!((c.lower, c.upper), (Ordinal::one(), Ordinal::one()));
        assert!(c.paper_claimed.is_none());
    }

    #[test]
    fn tower_is_claimed_exact() {
        let t = interval("tower(Dinf, 2)");
        assert_eq!(t.lower, Ordinal::omega());
        assert_eq!(t.upper, Ordinal::omega_affine(2, 0));
        assert_eq!(t.paper_claimed.unwrap().value, Ordinal::omega_affine(2, 0));
        assert!(t.flags.iter().all(|f| !f.starts_with("discrepancy")));
    }

    #[test]
    fn integers_have_no_finite_abelianization_claim() {
        assert!(interval("tower(Z, 2)").paper_claimed.is_none());
    }

    #[test]
    fn tower_wreath_finite_is_flagged() {
        let t = interval("wreath(tower(Dinf, 2), C(2))");
        assert_eq!(t.upper, Ordinal::omega_affine(2, 0));
        assert_eq!(t.paper_claimed.unwrap().value, Ordinal::omega_affine(2, 1));
        assert!(t.flags.iter().any(|f| f.starts_with("discrepancy")));
    }
}
