use std::collections::BTreeMap;
use std::sync::Arc;

use super::probe::{probe_elements, ProbeConfig};
use super::{finite_support_power, make_product, Element, Group, GroupError, GroupKind};

pub type ElementMap = Arc<dyn Fn(&Element) -> Result<Element, GroupError> + Send + Sync>;
pub type PartialMap = Arc<dyn Fn(&Element) -> Option<Element> + Send + Sync>;

#[derive(Clone)]
struct KernelView {
    group: Group,
    include: ElementMap,
    restrict: PartialMap,
}

/// A short exact sequence `1 → N → G → Q → 1` given by its projection.
///
/// The kernel is always available as a membership test. A kernel group
/// handle (with inclusion and restriction maps) and a set-theoretic
/// section of the projection are optional extras some constructions need.
#[derive(Clone)]
pub struct ExtensionHandle {
    total: Group,
    quotient: Group,
    projection: ElementMap,
    kernel: Option<KernelView>,
    section: Option<ElementMap>,
}

const HOMOMORPHISM_PROBES: usize = 48;

/// Builds an extension after probing that `projection` is a homomorphism
/// reaching every quotient generator.
pub fn extension_from_quotient(total: &Group, projection: ElementMap, quotient: &Group, seed: u64) -> Result<ExtensionHandle, GroupError> {
    let id = projection(&total.identity())?;
    if !quotient.is_identity(&id) {
        return Err(GroupError::NotHomomorphism(format!("identity maps to {id}")));
    }
    let probes = probe_elements(total, &ProbeConfig { count: HOMOMORPHISM_PROBES, max_len: 6, seed });
    for a in &probes {
        for b in probes.iter().take(16) {
            let lhs = projection(&total.multiply(a, b)?)?;
            let rhs = quotient.multiply(&projection(a)?, &projection(b)?)?;
            if lhs != rhs {
                return Err(GroupError::NotHomomorphism(format!("π({a}·{b}) = {lhs} but π({a})·π({b}) = {rhs}")));
            }
        }
    }
    let images = total.generators().iter().map(|g| projection(g)).collect::<Result<Vec<_>, _>>()?;
    for q in quotient.generators() {
        let q_inv = quotient.invert(q)?;
        if !images.iter().any(|x| x == q || *x == q_inv) {
            return Err(GroupError::NotSurjective(q.to_string()));
        }
    }
    Ok(ExtensionHandle { total: total.clone(), quotient: quotient.clone(), projection, kernel: None, section: None })
}

impl ExtensionHandle {
    /// Attaches a kernel group with inclusion into the total group and
    /// restriction back (returning `None` off the kernel).
    pub fn with_kernel(mut self, group: Group, include: ElementMap, restrict: PartialMap) -> Self {
        self.kernel = Some(KernelView { group, include, restrict });
        self
    }

    pub fn with_section(mut self, section: ElementMap) -> Self {
        self.section = Some(section);
        self
    }

    /// `K^(X) → K ≀_X G → G` for a wreath product.
    pub fn of_wreath(wreath: &Group) -> Result<ExtensionHandle, GroupError> {
        let GroupKind::Wreath { base, top, points, .. } = wreath.kind() else {
            return Err(GroupError::InvalidArgument(format!("{} is not a wreath product", wreath.label())));
        };
        let kernel = finite_support_power(base, points.clone());
        let top_id = top.identity();
        let projection: ElementMap = {
            let w = wreath.clone();
            Arc::new(move |e| e.top_part().cloned().ok_or_else(|| GroupError::Foreign { group: w.label().into(), element: e.to_string() }))
        };
        let ext = extension_from_quotient(wreath, projection, top, 0)?;
        let include: ElementMap = {
            let k = kernel.clone();
            let top_id = top_id.clone();
            Arc::new(move |f| {
                if !matches!(f, Element::FinSupport(_)) {
                    return Err(GroupError::Foreign { group: k.label().into(), element: f.to_string() });
                }
                Ok(Element::wreath(f.clone(), top_id.clone()))
            })
        };
        let restrict: PartialMap = Arc::new(move |e| match e {
            Element::Wreath { fs, top } if **top == top_id => Some((**fs).clone()),
            _ => None,
        });
        let section: ElementMap = Arc::new(|g| Ok(Element::wreath(Element::FinSupport(BTreeMap::new()), g.clone())));
        Ok(ext.with_kernel(kernel, include, restrict).with_section(section))
    }

    /// Projection of a direct product onto one factor; the kernel is the
    /// product of the others (or the trivial group for a single factor).
    pub fn of_product(product: &Group, factor: usize) -> Result<ExtensionHandle, GroupError> {
        let GroupKind::Product(factors) = product.kind() else {
            return Err(GroupError::InvalidArgument(format!("{} is not a product", product.label())));
        };
        if factor >= factors.len() {
            return Err(GroupError::InvalidArgument(format!("factor {factor} out of range")));
        }
        let quotient = factors[factor].clone();
        let rest: Vec<Group> = factors.iter().enumerate().filter(|(i, _)| *i != factor).map(|(_, g)| g.clone()).collect();
        let kernel = make_product(rest);
        let n = factors.len();
        let projection: ElementMap = {
            let p = product.clone();
            Arc::new(move |e| match e {
                Element::Tuple(xs) if xs.len() == n => Ok(xs[factor].clone()),
                _ => Err(GroupError::Foreign { group: p.label().into(), element: e.to_string() }),
            })
        };
        let ext = extension_from_quotient(product, projection, &quotient, 0)?;
        let q_id = quotient.identity();
        let include: ElementMap = {
            let q_id = q_id.clone();
            let k = kernel.clone();
            Arc::new(move |e| match e {
                Element::Tuple(xs) if xs.len() == n - 1 => {
                    let mut parts = xs.clone();
                    parts.insert(factor, q_id.clone());
                    Ok(Element::Tuple(parts))
                }
                _ => Err(GroupError::Foreign { group: k.label().into(), element: e.to_string() }),
            })
        };
        let restrict: PartialMap = Arc::new(move |e| match e {
            Element::Tuple(xs) if xs.len() == n && xs[factor] == q_id => {
                let mut parts = xs.clone();
                parts.remove(factor);
                Some(Element::Tuple(parts))
            }
            _ => None,
        });
        let others: Vec<Element> = factors.iter().map(Group::identity).collect();
        let section: ElementMap = Arc::new(move |q| {
            let mut parts = others.clone();
            parts[factor] = q.clone();
            Ok(Element::Tuple(parts))
        });
        Ok(ext.with_kernel(kernel, include, restrict).with_section(section))
    }

    pub fn total(&self) -> &Group {
        &self.total
    }

    pub fn quotient(&self) -> &Group {
        &self.quotient
    }

    pub fn project(&self, e: &Element) -> Result<Element, GroupError> {
        (self.projection)(e)
    }

    pub fn kernel_contains(&self, e: &Element) -> Result<bool, GroupError> {
        Ok(self.quotient.is_identity(&self.project(e)?))
    }

    pub fn kernel(&self) -> Option<&Group> {
        self.kernel.as_ref().map(|k| &k.group)
    }

    pub fn include(&self, k: &Element) -> Option<Result<Element, GroupError>> {
        self.kernel.as_ref().map(|view| (view.include)(k))
    }

    pub fn restrict(&self, e: &Element) -> Option<Element> {
        self.kernel.as_ref().and_then(|view| (view.restrict)(e))
    }

    /// A preimage of `q` under the projection, when a section is known.
    pub fn lift(&self, q: &Element) -> Option<Result<Element, GroupError>> {
        self.section.as_ref().map(|s| s(q))
    }
}

/// Injection of the base group at one point of a power or wreath group.
#[derive(Clone, Debug)]
pub struct Embedding {
    target: Group,
    base: Group,
    point: Element,
}

impl Embedding {
    pub fn point(&self) -> &Element {
        &self.point
    }

    pub fn target(&self) -> &Group {
        &self.target
    }

    pub fn apply(&self, k: &Element) -> Result<Element, GroupError> {
        if !self.base.contains(k) {
            return Err(GroupError::Foreign { group: self.base.label().into(), element: k.to_string() });
        }
        let f = if self.base.is_identity(k) {
            Element::FinSupport(BTreeMap::new())
        } else {
            Element::support([(self.point.clone(), k.clone())])
        };
        Ok(match self.target.top() {
            Some(top) => Element::wreath(f, top.identity()),
            None => f,
        })
    }
}

/// `G^(g)`: functions supported in `{point}`.
pub fn embed_at_point(group: &Group, point: &Element) -> Result<Embedding, GroupError> {
    let (Some(base), Some(points)) = (group.base(), group.points()) else {
        return Err(GroupError::InvalidArgument(format!("{} has no point set", group.label())));
    };
    if !points.contains(point) {
        return Err(GroupError::InvalidPoint { point: point.to_string(), set: points.label().to_string() });
    }
    Ok(Embedding { target: group.clone(), base: base.clone(), point: point.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_cyclic, make_infinite_dihedral, make_integers, wreath_self};

    fn lamplighter() -> Group {
        wreath_self(&make_cyclic(2).unwrap(), &make_integers()).unwrap()
    }

    #[test]
    fn lamplighter_projection_and_kernel() {
        let w = lamplighter();
        let ext = ExtensionHandle::of_wreath(&w).unwrap();
        let e = Element::wreath(Element::support([(Element::int(4), Element::residue(1, 2))]), Element::int(-3));
        assert_eq!(ext.project(&e).unwrap(), Element::int(-3));
        let k = Element::wreath(Element::support([(Element::int(4), Element::residue(1, 2))]), Element::int(0));
        assert!(ext.kernel_contains(&k).unwrap());
        assert!(!ext.kernel_contains(&e).unwrap());
        assert_eq!(ext.project(&w.identity()).unwrap(), Element::int(0));
        assert_eq!(ext.kernel().unwrap().label(), "power(C(2), Z)");
    }

    #[test]
    fn dihedral_parity_extension() {
        let d = make_infinite_dihedral();
        let c2 = make_cyclic(2).unwrap();
        let parity: ElementMap = Arc::new(|e| match e {
            Element::Dihedral { flip, .. } => Ok(Element::residue(u64::from(*flip), 2)),
            _ => Err(GroupError::InvalidArgument("not dihedral".into())),
        });
        let ext = extension_from_quotient(&d, parity, &c2, 1).unwrap();
        assert!(ext.kernel_contains(&Element::dihedral(5, false)).unwrap());
        assert!(!ext.kernel_contains(&Element::dihedral(5, true)).unwrap());
        let sign: ElementMap = Arc::new(|e| match e {
            Element::Dihedral { shift, .. } => Ok(Element::residue(u64::from(shift.sign() == num_bigint::Sign::Plus), 2)),
            _ => unreachable!(),
        });
        assert!(matches!(extension_from_quotient(&d, sign, &c2, 1), Err(GroupError::NotHomomorphism(_))));
    }

    #[test]
    fn embedding_lights_one_lamp() {
        let w = lamplighter();
        let emb = embed_at_point(&w, &Element::int(0)).unwrap();
        let lit = emb.apply(&Element::residue(1, 2)).unwrap();
        assert_eq!(lit, Element::wreath(Element::support([(Element::int(0), Element::residue(1, 2))]), Element::int(0)));
        assert_eq!(lit.top_part().unwrap(), &Element::int(0));
        assert!(matches!(embed_at_point(&w, &Element::residue(0, 2)), Err(GroupError::InvalidPoint { .. })));
    }

    #[test]
    fn conjugation_moves_the_copy() {
        let w = lamplighter();
        let at_zero = embed_at_point(&w, &Element::int(0)).unwrap();
        let x = at_zero.apply(&Element::residue(1, 2)).unwrap();
        let g = Element::wreath(Element::FinSupport(BTreeMap::new()), Element::int(5));
        let moved = w.conjugate(&g, &x).unwrap();
        let at_five = embed_at_point(&w, &Element::int(5)).unwrap();
        assert_eq!(moved, at_five.apply(&Element::residue(1, 2)).unwrap());
    }
}
