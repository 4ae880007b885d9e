use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

/// Element of one of the computable groups in [`super`].
///
/// The variant (and, for permutations and residues, the degree or modulus)
/// acts as the group tag; operations reject mismatched tags.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Element {
    Trivial,
    /// Image array of a bijection of `0..degree`.
    Perm(Vec<u32>),
    Integer(BigInt),
    Modular { residue: u64, modulus: u64 },
    /// The map `x ↦ shift + (-1)^flip · x` on ℤ.
    Dihedral { shift: BigInt, flip: bool },
    /// Finitely supported function; never stores identity values.
    FinSupport(BTreeMap<Element, Element>),
    /// `(f, g)` with `f` a `FinSupport` element and `g` in the top group.
    Wreath { fs: Box<Element>, top: Box<Element> },
    Tuple(Vec<Element>),
}

impl Element {
    pub fn int(v: i64) -> Element {
        Element::Integer(BigInt::from(v))
    }

    pub fn dihedral(shift: i64, flip: bool) -> Element {
        Element::Dihedral { shift: BigInt::from(shift), flip }
    }

    pub fn residue(residue: u64, modulus: u64) -> Element {
        Element::Modular { residue: residue % modulus, modulus }
    }

    /// Finitely supported function from `(point, value)` pairs; identity
    /// values must already be filtered by the caller.
    pub fn support<I: IntoIterator<Item = (Element, Element)>>(pairs: I) -> Element {
        Element::FinSupport(pairs.into_iter().collect())
    }

    pub fn wreath(fs: Element, top: Element) -> Element {
        Element::Wreath { fs: Box::new(fs), top: Box::new(top) }
    }

    /// Top component of a wreath element.
    pub fn top_part(&self) -> Option<&Element> {
        match self {
            Element::Wreath { top, .. } => Some(top),
            _ => None,
        }
    }

    pub fn fin_support_part(&self) -> Option<&BTreeMap<Element, Element>> {
        match self {
            Element::Wreath { fs, .. } => fs.as_fin_support(),
            Element::FinSupport(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_fin_support(&self) -> Option<&BTreeMap<Element, Element>> {
        match self {
            Element::FinSupport(m) => Some(m),
            _ => None,
        }
    }

    /// Cycle notation for a permutation image array.
    pub fn cycles(images: &[u32]) -> Vec<Vec<u32>> {
        let mut seen = vec![false; images.len()];
        let mut out = Vec::new();
        for start in 0..images.len() {
            if seen[start] || images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i as u32);
                i = images[i] as usize;
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Trivial => f.write_str("e"),
            Element::Perm(images) => {
                let cycles = Element::cycles(images);
                if cycles.is_empty() {
                    return f.write_str("()");
                }
                for c in cycles {
                    let parts: Vec<String> = c.iter().map(u32::to_string).collect();
                    write!(f, "({})", parts.join(" "))?;
                }
                Ok(())
            }
            Element::Integer(v) => write!(f, "{v}"),
            Element::Modular { residue, .. } => write!(f, "{residue}"),
            Element::Dihedral { shift, flip } => {
                write!(f, "t{shift}")?;
                if *flip {
                    f.write_str("s")?;
                }
                Ok(())
            }
            Element::FinSupport(map) => {
                f.write_str("{")?;
                for (i, (p, v)) in map.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}: {v}")?;
                }
                f.write_str("}")
            }
            Element::Wreath { fs, top } => write!(f, "<{fs} | {top}>"),
            Element::Tuple(parts) => {
                f.write_str("[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("]")
            }
        }
    }
}

struct BigIntOut<'a>(&'a BigInt);

impl Serialize for BigIntOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Element::Trivial => s.serialize_str("e"),
            Element::Perm(images) => images.serialize(s),
            Element::Integer(v) => BigIntOut(v).serialize(s),
            Element::Modular { residue, modulus } => {
                let mut st = s.serialize_struct("Modular", 2)?;
                st.serialize_field("residue", residue)?;
                st.serialize_field("modulus", modulus)?;
                st.end()
            }
            Element::Dihedral { shift, flip } => {
                let mut st = s.serialize_struct("Dihedral", 2)?;
                st.serialize_field("shift", &BigIntOut(shift))?;
                st.serialize_field("flip", flip)?;
                st.end()
            }
            Element::FinSupport(map) => {
                let mut m = s.serialize_map(Some(map.len()))?;
                for (p, v) in map {
                    m.serialize_entry(&p.to_string(), v)?;
                }
                m.end()
            }
            Element::Wreath { fs, top } => {
                let mut st = s.serialize_struct("Wreath", 2)?;
                st.serialize_field("fs", fs)?;
                st.serialize_field("top", top)?;
                st.end()
            }
            Element::Tuple(parts) => {
                let mut st = s.serialize_struct("Tuple", 1)?;
                st.serialize_field("tuple", parts)?;
                st.end()
            }
        }
    }
}
