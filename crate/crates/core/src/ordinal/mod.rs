//! Ordinals below ε₀ in Cantor normal form.
//!
//! An ordinal is stored as a strictly decreasing list of terms `ω^e · c`
//! where every exponent is itself an ordinal and every coefficient is
//! positive. The representation is canonical after every operation, so
//! structural equality coincides with ordinal equality.
//!
//! The coefficient type is generic; [`crate::Ordinal`] fixes it to
//! arbitrary-precision integers.

mod cardinal;
mod serde_impl;
mod text;

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_traits::{FromPrimitive, ToPrimitive, Unsigned};

pub use cardinal::CardinalBound;
pub use text::ParseOrdinalError;

/// Scalar used for Cantor-normal-form coefficients.
pub trait Coefficient:
    Unsigned + Clone + Ord + Hash + Debug + Display + FromStr + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

impl<T> Coefficient for T where
    T: Unsigned + Clone + Ord + Hash + Debug + Display + FromStr + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("zero has no successor decomposition")]
    ZeroDecomposition,
    #[error(transparent)]
    Parse(#[from] ParseOrdinalError),
}

/// One `ω^exp · coeff` summand.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Term<C> {
    pub exp: Cnf<C>,
    pub coeff: C,
}

/// An ordinal in Cantor normal form with coefficients of type `C`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cnf<C> {
    terms: Vec<Term<C>>,
}

/// Position of an ordinal relative to the depths a group can have.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DepthClass {
    Zero,
    One,
    Limit,
    LimitPlusOne,
    Invalid,
}

impl<C: Coefficient> Cnf<C> {
    pub fn zero() -> Self {
        Cnf { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::finite(C::one())
    }

    pub fn finite(n: C) -> Self {
        if n.is_zero() {
            return Self::zero();
        }
        Cnf { terms: vec![Term { exp: Self::zero(), coeff: n }] }
    }

    pub fn from_u64(n: u64) -> Self {
        Self::finite(C::from_u64(n).expect("coefficient type holds u64"))
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `ω^exp`.
    pub fn omega_pow(exp: Self) -> Self {
        Cnf { terms: vec![Term { exp, coeff: C::one() }] }
    }

    /// `ω^exp · coeff`, zero when `coeff` is zero.
    pub fn monomial(exp: Self, coeff: C) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        Cnf { terms: vec![Term { exp, coeff }] }
    }

    /// `ω·q + r`.
    pub fn omega_affine(q: u64, r: u64) -> Self {
        let mut terms = Vec::new();
        if q > 0 {
            terms.push(Term { exp: Self::one(), coeff: C::from_u64(q).expect("u64 coefficient") });
        }
        if r > 0 {
            terms.push(Term { exp: Self::zero(), coeff: C::from_u64(r).expect("u64 coefficient") });
        }
        Cnf { terms }
    }

    /// Builds from raw terms, checking the canonical-form invariants.
    pub fn from_terms(terms: Vec<Term<C>>) -> Option<Self> {
        if terms.iter().any(|t| t.coeff.is_zero()) {
            return None;
        }
        if terms.windows(2).any(|w| w[0].exp <= w[1].exp) {
            return None;
        }
        Some(Cnf { terms })
    }

    pub fn terms(&self) -> &[Term<C>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exp.is_zero())
    }

    /// The natural-number value, if the ordinal is finite.
    pub fn finite_value(&self) -> Option<C> {
        match self.terms.as_slice() {
            [] => Some(C::zero()),
            [t] if t.exp.is_zero() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    /// Reads `ω·q + r` if the ordinal has that shape and both fit in `u64`.
    pub fn as_omega_affine(&self) -> Option<(u64, u64)> {
        let mut q = 0;
        let mut r = 0;
        for t in &self.terms {
            if t.exp.is_zero() {
                r = t.coeff.to_u64()?;
            } else if t.exp == Self::one() {
                q = t.coeff.to_u64()?;
            } else {
                return None;
            }
        }
        Some((q, r))
    }

    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| !t.exp.is_zero())
    }

    pub fn successor(&self) -> Self {
        self + &Self::one()
    }

    /// Nesting depth of exponents; 0 for finite ordinals.
    pub fn height(&self) -> usize {
        self.terms.iter().map(|t| if t.exp.is_zero() { 0 } else { 1 + t.exp.height() }).max().unwrap_or(0)
    }
}

impl<C: Coefficient> PartialOrd for Cnf<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: Coefficient> Ord for Cnf<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a.exp.cmp(&b.exp).then_with(|| a.coeff.cmp(&b.coeff));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl<C: Coefficient> Add for &Cnf<C> {
    type Output = Cnf<C>;

    fn add(self, rhs: &Cnf<C>) -> Cnf<C> {
        let Some(head) = rhs.terms.first() else {
            return self.clone();
        };
        // Terms of the left operand below the right's leading exponent vanish.
        let mut terms: Vec<Term<C>> = self.terms.iter().take_while(|t| t.exp > head.exp).cloned().collect();
        let mut rest = rhs.terms.iter();
        if let Some(same) = self.terms.iter().find(|t| t.exp == head.exp) {
            terms.push(Term { exp: head.exp.clone(), coeff: same.coeff.clone() + head.coeff.clone() });
            rest.next();
        }
        terms.extend(rest.cloned());
        Cnf { terms }
    }
}

impl<C: Coefficient> Add for Cnf<C> {
    type Output = Cnf<C>;

    fn add(self, rhs: Cnf<C>) -> Cnf<C> {
        &self + &rhs
    }
}

impl<C: Coefficient> Mul for &Cnf<C> {
    type Output = Cnf<C>;

    fn mul(self, rhs: &Cnf<C>) -> Cnf<C> {
        let Some(lead) = self.terms.first() else {
            return Cnf::zero();
        };
        // Left distributivity: a·(Σ ω^e c) = Σ a·ω^e·c.
        let mut acc = Cnf::zero();
        for t in &rhs.terms {
            let piece = if t.exp.is_zero() {
                let mut terms = self.terms.clone();
                terms[0].coeff = lead.coeff.clone() * t.coeff.clone();
                Cnf { terms }
            } else {
                Cnf::monomial(&lead.exp + &t.exp, t.coeff.clone())
            };
            acc = &acc + &piece;
        }
        acc
    }
}

impl<C: Coefficient> Mul for Cnf<C> {
    type Output = Cnf<C>;

    fn mul(self, rhs: Cnf<C>) -> Cnf<C> {
        &self * &rhs
    }
}

pub fn compare<C: Coefficient>(a: &Cnf<C>, b: &Cnf<C>) -> Ordering {
    a.cmp(b)
}

pub fn add<C: Coefficient>(a: &Cnf<C>, b: &Cnf<C>) -> Cnf<C> {
    a + b
}

pub fn multiply<C: Coefficient>(a: &Cnf<C>, b: &Cnf<C>) -> Cnf<C> {
    a * b
}

pub fn classify<C: Coefficient>(a: &Cnf<C>) -> DepthClass {
    let terms = a.terms();
    match terms.last() {
        None => DepthClass::Zero,
        Some(last) if !last.exp.is_zero() => DepthClass::Limit,
        Some(last) => {
            if terms.len() == 1 {
                if last.coeff.is_one() {
                    DepthClass::One
                } else {
                    DepthClass::Invalid
                }
            } else if last.coeff.is_one() {
                DepthClass::LimitPlusOne
            } else {
                DepthClass::Invalid
            }
        }
    }
}

/// Splits `a` as `limit_part + tail` with `limit_part` zero or a limit.
pub fn decompose_successor<C: Coefficient>(a: &Cnf<C>) -> Result<(Cnf<C>, C), OrdinalError> {
    let Some(last) = a.terms().last() else {
        return Err(OrdinalError::ZeroDecomposition);
    };
    if last.exp.is_zero() {
        let limit = Cnf { terms: a.terms()[..a.terms().len() - 1].to_vec() };
        Ok((limit, last.coeff.clone()))
    } else {
        Ok((a.clone(), C::zero()))
    }
}

/// Whether `ω + a == a`.
pub fn omega_absorbs<C: Coefficient>(a: &Cnf<C>) -> bool {
    &Cnf::<C>::omega() + a == *a
}

pub fn format<C: Coefficient>(a: &Cnf<C>) -> String {
    a.to_string()
}

pub fn parse<C: Coefficient>(text: &str) -> Result<Cnf<C>, ParseOrdinalError> {
    text.parse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Ordinal;

    fn n(v: u64) -> Ordinal {
        Ordinal::from_u64(v)
    }

    fn w() -> Ordinal {
        Ordinal::omega()
    }

    #[test]
    fn left_absorption() {
        assert_eq!(compare(&add(&n(1), &w()), &w()), Ordering::Equal);
        assert_eq!(add(&w(), &w()), Ordinal::omega_affine(2, 0));
        let ww = Ordinal::omega_pow(w());
        assert_eq!(add(&w(), &ww), ww);
        assert_ne!(add(&w(), &n(1)), w());
    }

    #[test]
    fn products() {
        assert_eq!(multiply(&w(), &n(2)), add(&w(), &w()));
        assert_eq!(multiply(&w(), &n(0)), Ordinal::zero());
        assert_eq!(compare(&Ordinal::omega_affine(2, 0), &multiply(&n(2), &w())), Ordering::Greater);
        // (ω+1)·ω = ω²
        let w_plus_1 = w().successor();
        assert_eq!(multiply(&w_plus_1, &w()), Ordinal::omega_pow(n(2)));
        // (ω+1)·2 = ω·2 + 1
        assert_eq!(multiply(&w_plus_1, &n(2)), Ordinal::omega_affine(2, 1));
    }

    /// Order type of {0,1}×ℕ under the reverse-lexicographic order, compared
    /// against ℕ by an explicit isomorphism (a, b) ↦ 2b + a.
    #[test]
    fn two_times_omega_is_omega_by_enumeration() {
        let bound = 200u64;
        let mut pairs: Vec<(u64, u64)> = (0..bound).flat_map(|b| [(0, b), (1, b)]).collect();
        pairs.sort_by_key(|&(a, b)| (b, a));
        for (pos, &(a, b)) in pairs.iter().enumerate() {
            assert_eq!(pos as u64, 2 * b + a);
        }
        // Every element has finitely many predecessors and there is no maximum
        // in the unbounded set, which is the order type of ℕ.
        assert_eq!(multiply(&n(2), &w()), w());
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&w()), DepthClass::Limit);
        assert_eq!(classify(&w().successor()), DepthClass::LimitPlusOne);
        assert_eq!(classify(&Ordinal::omega_affine(1, 2)), DepthClass::Invalid);
        assert_eq!(classify(&n(0)), DepthClass::Zero);
        assert_eq!(classify(&n(1)), DepthClass::One);
        assert_eq!(classify(&n(2)), DepthClass::Invalid);
    }

    #[test]
    fn successor_decomposition() {
        let (l, t) = decompose_successor(&Ordinal::omega_affine(2, 3)).unwrap();
        assert_eq!((l, t), (Ordinal::omega_affine(2, 0), 3u32.into()));
        let (l, t) = decompose_successor(&w()).unwrap();
        assert_eq!((l, t), (w(), 0u32.into()));
        let (l, t) = decompose_successor(&n(5)).unwrap();
        assert_eq!((l, t), (Ordinal::zero(), 5u32.into()));
        assert_eq!(decompose_successor(&Ordinal::zero()), Err(OrdinalError::ZeroDecomposition));
    }

    #[test]
    fn absorption_threshold() {
        assert!(!omega_absorbs(&Ordinal::omega_affine(5, 0)));
        assert!(omega_absorbs(&Ordinal::omega_pow(w())));
        assert!(!omega_absorbs(&Ordinal::zero()));
        // ω + ω² = ω·(1 + ω) = ω², so absorption starts at ω², not ω^ω.
        assert!(omega_absorbs(&Ordinal::omega_pow(n(2))));
        assert!(omega_absorbs(&Ordinal::omega_pow(n(7))));
        assert!(!omega_absorbs(&Ordinal::omega_affine(9, 3)));
    }

    #[test]
    fn small_coefficients_work() {
        type Small = Cnf<u32>;
        let a = Small::omega_affine(3, 1);
        assert_eq!(&a * &Small::from_u64(2), Small::omega_affine(6, 1));
        assert_eq!(a.to_string(), "w*3 + 1");
    }

    #[test]
    fn from_terms_rejects_non_canonical() {
        let t = |e: u64, c: u32| Term { exp: n(e), coeff: num_bigint::BigUint::from(c) };
        assert!(Ordinal::from_terms(vec![t(1, 1), t(2, 1)]).is_none());
        assert!(Ordinal::from_terms(vec![t(1, 0)]).is_none());
        assert!(Ordinal::from_terms(vec![t(2, 1), t(0, 4)]).is_some());
    }
}
