use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::{Element, Group, GroupKind};

type NthFn = Arc<dyn Fn(u64) -> Element + Send + Sync>;
type IndexFn = Arc<dyn Fn(&Element) -> Option<u64> + Send + Sync>;
type MemberFn = Arc<dyn Fn(&Element) -> bool + Send + Sync>;

/// Injective enumeration `ℕ → points` together with its inverse.
#[derive(Clone)]
pub struct Enumeration {
    label: String,
    nth: NthFn,
    index_of: IndexFn,
}

impl Enumeration {
    pub fn new(label: impl Into<String>, nth: NthFn, index_of: IndexFn) -> Self {
        Enumeration { label: label.into(), nth, index_of }
    }

    pub fn nth(&self, i: u64) -> Element {
        (self.nth)(i)
    }

    pub fn index_of(&self, p: &Element) -> Option<u64> {
        (self.index_of)(p)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Set a group acts on, or indexes a finite-support power by.
#[derive(Clone)]
pub enum PointSet {
    Finite { label: String, points: Vec<Element> },
    Countable(Enumeration),
    /// Elements of an infinite group that has no enumeration here.
    Opaque { label: String, member: MemberFn },
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointSet({})", self.label())
    }
}

fn z_nth(k: u64) -> BigInt {
    // 0, 1, -1, 2, -2, ...
    if k % 2 == 1 {
        BigInt::from(k.div_ceil(2))
    } else {
        -BigInt::from(k / 2)
    }
}

fn z_index(z: &BigInt) -> Option<u64> {
    let m = z.abs().to_u64()?;
    if z.is_positive() {
        m.checked_mul(2).map(|v| v - 1)
    } else {
        m.checked_mul(2)
    }
}

impl PointSet {
    /// `{0, 1, ..., n-1}` as integer labels.
    pub fn finite_range(n: u64) -> Self {
        PointSet::Finite { label: n.to_string(), points: (0..n as i64).map(Element::int).collect() }
    }

    pub fn finite(label: impl Into<String>, points: Vec<Element>) -> Self {
        PointSet::Finite { label: label.into(), points }
    }

    /// ℕ with the identity enumeration, points labelled by integers.
    pub fn naturals() -> Self {
        PointSet::Countable(Enumeration::new(
            "N",
            Arc::new(|i| Element::Integer(BigInt::from(i))),
            Arc::new(|p| match p {
                Element::Integer(v) if !v.is_negative() => v.to_u64(),
                _ => None,
            }),
        ))
    }

    /// ℤ enumerated as 0, 1, -1, 2, -2, ...
    pub fn integers() -> Self {
        PointSet::Countable(Enumeration::new(
            "Z",
            Arc::new(|i| Element::Integer(z_nth(i))),
            Arc::new(|p| match p {
                Element::Integer(v) => z_index(v),
                _ => None,
            }),
        ))
    }

    /// D∞ enumerated by interleaving translations and reflections over the
    /// enumeration of ℤ.
    pub fn dihedral() -> Self {
        PointSet::Countable(Enumeration::new(
            "Dinf",
            Arc::new(|i| Element::Dihedral { shift: z_nth(i / 2), flip: i % 2 == 1 }),
            Arc::new(|p| match p {
                Element::Dihedral { shift, flip } => {
                    z_index(shift).and_then(|k| k.checked_mul(2)).map(|k| k + u64::from(*flip))
                }
                _ => None,
            }),
        ))
    }

    /// Points for the left-regular action of `group` on itself.
    pub fn of_group(group: &Group) -> Self {
        match group.kind() {
            GroupKind::Integers => Self::integers(),
            GroupKind::InfiniteDihedral => Self::dihedral(),
            _ => {
                if group.order().is_finite() {
                    if let Ok(elements) = group.elements() {
                        return PointSet::finite(group.label(), elements.to_vec());
                    }
                }
                let g = group.clone();
                PointSet::Opaque { label: group.label().to_string(), member: Arc::new(move |p| g.contains(p)) }
            }
        }
    }

    pub fn label(&self) -> &str {
        match self {
            PointSet::Finite { label, .. } | PointSet::Opaque { label, .. } => label,
            PointSet::Countable(e) => e.label(),
        }
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            PointSet::Finite { points, .. } => Some(points.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn contains(&self, p: &Element) -> bool {
        match self {
            PointSet::Finite { points, .. } => points.contains(p),
            PointSet::Countable(e) => e.index_of(p).is_some(),
            PointSet::Opaque { member, .. } => member(p),
        }
    }

    pub fn enumeration(&self) -> Option<&Enumeration> {
        match self {
            PointSet::Countable(e) => Some(e),
            _ => None,
        }
    }

    /// Position of a point in the set's fixed order.
    pub fn index_of(&self, p: &Element) -> Option<u64> {
        match self {
            PointSet::Finite { points, .. } => points.iter().position(|q| q == p).map(|i| i as u64),
            PointSet::Countable(e) => e.index_of(p),
            PointSet::Opaque { .. } => None,
        }
    }

    /// The first `n` points in the set's order (all of them if finite and
    /// shorter). Empty for opaque sets.
    pub fn first(&self, n: usize) -> Vec<Element> {
        match self {
            PointSet::Finite { points, .. } => points.iter().take(n).cloned().collect(),
            PointSet::Countable(e) => (0..n as u64).map(|i| e.nth(i)).collect(),
            PointSet::Opaque { .. } => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerations_are_injective_and_inverse() {
        for set in [PointSet::naturals(), PointSet::integers(), PointSet::dihedral()] {
            let e = set.enumeration().unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for i in 0..500 {
                let p = e.nth(i);
                assert!(seen.insert(p.clone()), "repeat in {}", e.label());
                assert_eq!(e.index_of(&p), Some(i));
            }
        }
    }

    #[test]
    fn integer_order() {
        let z = PointSet::integers();
        let first: Vec<String> = z.first(5).iter().map(|p| p.to_string()).collect();
        assert_eq!(first, ["0", "1", "-1", "2", "-2"]);
    }
}
