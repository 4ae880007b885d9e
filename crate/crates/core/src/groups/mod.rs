//! Computable groups: finite permutation groups, cyclic groups, ℤ, the
//! infinite dihedral group, direct products, finite-support powers,
//! restricted wreath products and the iterated wreath tower.
//!
//! A [`Group`] is a cheap, shareable handle. Elements are plain values
//! ([`Element`]) and every operation validates that its arguments have the
//! shape of the handle's group.

mod element;
mod extension;
mod points;
mod probe;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

pub use element::Element;
pub use extension::{embed_at_point, extension_from_quotient, Embedding, ExtensionHandle};
pub use points::{Enumeration, PointSet};
pub use probe::{probe_elements, random_word, ProbeConfig};

/// Largest group that is ever enumerated element by element.
pub const ENUMERATION_CAP: usize = 1 << 18;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("generator is not a permutation of degree {degree}: {images:?}")]
    NotBijective { degree: usize, images: Vec<u32> },
    #[error("element {element} does not belong to {group}")]
    Foreign { group: String, element: String },
    #[error("{0} is infinite")]
    Infinite(String),
    #[error("{group} has {order} elements, more than the enumeration cap {cap}")]
    TooLarge { group: String, order: String, cap: usize },
    #[error("supplied map is not a group action: {0}")]
    NotAnAction(String),
    #[error("projection is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("projection does not reach quotient generator {0}")]
    NotSurjective(String),
    #[error("{point} is not a point of {set}")]
    InvalidPoint { point: String, set: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(BigUint),
    Infinite,
}

impl Order {
    pub fn is_finite(&self) -> bool {
        matches!(self, Order::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("infinite"),
        }
    }
}

/// Hypotheses asserted at construction and never verified.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct Claims {
    pub residually_finite: bool,
    pub finite_abelianization: bool,
}

impl Claims {
    const FINITE: Claims = Claims { residually_finite: true, finite_abelianization: true };
}

/// Action of a top group on a point set.
#[derive(Clone)]
pub enum Action {
    /// Left multiplication of a group on its own elements.
    LeftRegular,
    Explicit(ActionFn),
}

/// `(g, x) ↦ g·x`.
pub type ActionFn = Arc<dyn Fn(&Element, &Element) -> Element + Send + Sync>;

#[derive(Clone)]
pub enum GroupKind {
    Trivial,
    Cyclic(u64),
    Integers,
    Permutation { degree: usize },
    InfiniteDihedral,
    Product(Vec<Group>),
    FinSupportPower { base: Group, points: PointSet },
    Wreath { base: Group, top: Group, points: PointSet, action: Action },
    Subgroup { parent: Group, members: Arc<BTreeSet<Element>> },
}

pub struct GroupHandle {
    kind: GroupKind,
    label: String,
    generators: Vec<Element>,
    identity: Element,
    order: Order,
    claims: Claims,
    elements: OnceLock<Result<Arc<Vec<Element>>, GroupError>>,
}

/// Shared handle to a computable group.
#[derive(Clone)]
pub struct Group(Arc<GroupHandle>);

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.0.label)
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.label == other.0.label
    }
}

fn new_group(kind: GroupKind, label: String, generators: Vec<Element>, identity: Element, order: Order, claims: Claims) -> Group {
    Group(Arc::new(GroupHandle { kind, label, generators, identity, order, claims, elements: OnceLock::new() }))
}

fn pow_order(base: &BigUint, exp: usize) -> BigUint {
    num_traits::pow(base.clone(), exp)
}

impl Group {
    pub fn kind(&self) -> &GroupKind {
        &self.0.kind
    }

    /// Canonical description, also used to compare handles.
    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn generators(&self) -> &[Element] {
        &self.0.generators
    }

    pub fn identity(&self) -> Element {
        self.0.identity.clone()
    }

    pub fn is_identity(&self, e: &Element) -> bool {
        *e == self.0.identity
    }

    pub fn order(&self) -> &Order {
        &self.0.order
    }

    pub fn claims(&self) -> Claims {
        self.0.claims
    }

    pub fn is_trivial(&self) -> bool {
        self.0.order == Order::Finite(BigUint::one())
    }

    fn foreign(&self, e: &Element) -> GroupError {
        GroupError::Foreign { group: self.0.label.clone(), element: e.to_string() }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element, GroupError> {
        use Element as E;
        match (&self.0.kind, a, b) {
            (GroupKind::Trivial, E::Trivial, E::Trivial) => Ok(E::Trivial),
            (GroupKind::Cyclic(n), E::Modular { residue: x, modulus: m1 }, E::Modular { residue: y, modulus: m2 })
                if m1 == n && m2 == n =>
            {
                let r = (u128::from(*x) + u128::from(*y)) % u128::from(*n);
                Ok(E::Modular { residue: r as u64, modulus: *n })
            }
            (GroupKind::Integers, E::Integer(x), E::Integer(y)) => Ok(E::Integer(x + y)),
            (GroupKind::Permutation { degree }, E::Perm(p), E::Perm(q)) if p.len() == *degree && q.len() == *degree => {
                Ok(E::Perm(q.iter().map(|&i| p[i as usize]).collect()))
            }
            (GroupKind::InfiniteDihedral, E::Dihedral { shift: t1, flip: f1 }, E::Dihedral { shift: t2, flip: f2 }) => {
                let shift = if *f1 { t1 - t2 } else { t1 + t2 };
                Ok(E::Dihedral { shift, flip: f1 ^ f2 })
            }
            (GroupKind::Product(factors), E::Tuple(xs), E::Tuple(ys))
                if xs.len() == factors.len() && ys.len() == factors.len() =>
            {
                let parts = factors.iter().zip(xs.iter().zip(ys)).map(|(g, (x, y))| g.multiply(x, y));
                Ok(E::Tuple(parts.collect::<Result<_, _>>()?))
            }
            (GroupKind::FinSupportPower { base, .. }, E::FinSupport(f), E::FinSupport(g)) => {
                Ok(E::FinSupport(pointwise(base, f.clone(), g.iter().map(|(p, v)| (p.clone(), v)))?))
            }
            (
                GroupKind::Wreath { base, top, action, .. },
                E::Wreath { fs: fs1, top: g1 },
                E::Wreath { fs: fs2, top: g2 },
            ) => {
                let (Some(f1), Some(f2)) = (fs1.as_fin_support(), fs2.as_fin_support()) else {
                    return Err(self.foreign(a));
                };
                // (f1, g1)(f2, g2) = (f1 · (g1 · f2), g1 g2), (g·f)(x) = f(g⁻¹x).
                let shifted = f2
                    .iter()
                    .map(|(x, v)| Ok((act(top, action, g1, x)?, v)))
                    .collect::<Result<Vec<_>, GroupError>>()?;
                let fs = pointwise(base, f1.clone(), shifted)?;
                Ok(Element::wreath(E::FinSupport(fs), top.multiply(g1, g2)?))
            }
            (GroupKind::Subgroup { parent, .. }, _, _) => parent.multiply(a, b),
            _ => Err(if self.shape_matches(a) { self.foreign(b) } else { self.foreign(a) }),
        }
    }

    pub fn invert(&self, a: &Element) -> Result<Element, GroupError> {
        use Element as E;
        match (&self.0.kind, a) {
            (GroupKind::Trivial, E::Trivial) => Ok(E::Trivial),
            (GroupKind::Cyclic(n), E::Modular { residue, modulus }) if modulus == n => {
                Ok(E::Modular { residue: (n - residue) % n, modulus: *n })
            }
            (GroupKind::Integers, E::Integer(x)) => Ok(E::Integer(-x)),
            (GroupKind::Permutation { degree }, E::Perm(p)) if p.len() == *degree => {
                let mut inv = vec![0u32; p.len()];
                for (i, &img) in p.iter().enumerate() {
                    inv[img as usize] = i as u32;
                }
                Ok(E::Perm(inv))
            }
            (GroupKind::InfiniteDihedral, E::Dihedral { shift, flip }) => {
                Ok(E::Dihedral { shift: if *flip { shift.clone() } else { -shift }, flip: *flip })
            }
            (GroupKind::Product(factors), E::Tuple(xs)) if xs.len() == factors.len() => {
                Ok(E::Tuple(factors.iter().zip(xs).map(|(g, x)| g.invert(x)).collect::<Result<_, _>>()?))
            }
            (GroupKind::FinSupportPower { base, .. }, E::FinSupport(f)) => {
                let inv = f.iter().map(|(p, v)| Ok((p.clone(), base.invert(v)?))).collect::<Result<_, GroupError>>()?;
                Ok(E::FinSupport(inv))
            }
            (GroupKind::Wreath { base, top, action, .. }, E::Wreath { fs, top: g }) => {
                let Some(f) = fs.as_fin_support() else {
                    return Err(self.foreign(a));
                };
                // (f, g)⁻¹ = (g⁻¹ · f⁻¹, g⁻¹)
                let g_inv = top.invert(g)?;
                let mut out = BTreeMap::new();
                for (x, v) in f {
                    out.insert(act(top, action, &g_inv, x)?, base.invert(v)?);
                }
                Ok(Element::wreath(E::FinSupport(out), g_inv))
            }
            (GroupKind::Subgroup { parent, .. }, _) => parent.invert(a),
            _ => Err(self.foreign(a)),
        }
    }

    pub fn equals(&self, a: &Element, b: &Element) -> bool {
        a == b
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: &Element, b: &Element) -> Result<Element, GroupError> {
        let ab = self.multiply(a, b)?;
        let ai = self.invert(a)?;
        let bi = self.invert(b)?;
        self.multiply(&self.multiply(&ab, &ai)?, &bi)
    }

    /// `g x g⁻¹`.
    pub fn conjugate(&self, g: &Element, x: &Element) -> Result<Element, GroupError> {
        let gi = self.invert(g)?;
        self.multiply(&self.multiply(g, x)?, &gi)
    }

    /// Left-to-right product of a word.
    pub fn product<'a, I: IntoIterator<Item = &'a Element>>(&self, word: I) -> Result<Element, GroupError> {
        word.into_iter().try_fold(self.identity(), |acc, x| self.multiply(&acc, x))
    }

    fn shape_matches(&self, e: &Element) -> bool {
        use Element as E;
        matches!(
            (&self.0.kind, e),
            (GroupKind::Trivial, E::Trivial)
                | (GroupKind::Cyclic(_), E::Modular { .. })
                | (GroupKind::Integers, E::Integer(_))
                | (GroupKind::Permutation { .. }, E::Perm(_))
                | (GroupKind::InfiniteDihedral, E::Dihedral { .. })
                | (GroupKind::Product(_), E::Tuple(_))
                | (GroupKind::FinSupportPower { .. }, E::FinSupport(_))
                | (GroupKind::Wreath { .. }, E::Wreath { .. })
                | (GroupKind::Subgroup { .. }, _)
        )
    }

    /// Full recursive membership check.
    pub fn contains(&self, e: &Element) -> bool {
        use Element as E;
        match (&self.0.kind, e) {
            (GroupKind::Trivial, E::Trivial) => true,
            (GroupKind::Cyclic(n), E::Modular { residue, modulus }) => modulus == n && residue < n,
            (GroupKind::Integers, E::Integer(_)) => true,
            (GroupKind::Permutation { degree }, E::Perm(p)) => {
                p.len() == *degree && is_bijection(p) && self.elements().map_or(true, |els| els.binary_search(e).is_ok())
            }
            (GroupKind::InfiniteDihedral, E::Dihedral { .. }) => true,
            (GroupKind::Product(factors), E::Tuple(xs)) => {
                xs.len() == factors.len() && factors.iter().zip(xs).all(|(g, x)| g.contains(x))
            }
            (GroupKind::FinSupportPower { base, points }, E::FinSupport(f)) => fin_support_valid(base, points, f),
            (GroupKind::Wreath { base, top, points, .. }, E::Wreath { fs, top: g }) => {
                top.contains(g) && fs.as_fin_support().is_some_and(|f| fin_support_valid(base, points, f))
            }
            (GroupKind::Subgroup { members, .. }, _) => members.contains(e),
            _ => false,
        }
    }

    /// All elements, sorted, for finite groups under [`ENUMERATION_CAP`].
    pub fn elements(&self) -> Result<Arc<Vec<Element>>, GroupError> {
        self.0.elements.get_or_init(|| self.enumerate()).clone()
    }

    fn enumerate(&self) -> Result<Arc<Vec<Element>>, GroupError> {
        let Order::Finite(n) = &self.0.order else {
            return Err(GroupError::Infinite(self.0.label.clone()));
        };
        if n.to_usize().is_none_or(|n| n > ENUMERATION_CAP) {
            return Err(GroupError::TooLarge { group: self.0.label.clone(), order: n.to_string(), cap: ENUMERATION_CAP });
        }
        if let GroupKind::Subgroup { members, .. } = &self.0.kind {
            return Ok(Arc::new(members.iter().cloned().collect()));
        }
        let set = closure(self, &self.0.generators, ENUMERATION_CAP)?;
        Ok(Arc::new(set.into_iter().collect()))
    }

    /// Points of a power or wreath group.
    pub fn points(&self) -> Option<&PointSet> {
        match &self.0.kind {
            GroupKind::FinSupportPower { points, .. } | GroupKind::Wreath { points, .. } => Some(points),
            _ => None,
        }
    }

    /// Base group of a power or wreath group.
    pub fn base(&self) -> Option<&Group> {
        match &self.0.kind {
            GroupKind::FinSupportPower { base, .. } | GroupKind::Wreath { base, .. } => Some(base),
            _ => None,
        }
    }

    /// Top group of a wreath product.
    pub fn top(&self) -> Option<&Group> {
        match &self.0.kind {
            GroupKind::Wreath { top, .. } => Some(top),
            _ => None,
        }
    }

    /// Action of the top group of a wreath product on its points.
    pub fn act_on_point(&self, g: &Element, x: &Element) -> Result<Element, GroupError> {
        match &self.0.kind {
            GroupKind::Wreath { top, action, .. } => act(top, action, g, x),
            _ => Err(GroupError::InvalidArgument(format!("{} is not a wreath product", self.0.label))),
        }
    }
}

fn act(top: &Group, action: &Action, g: &Element, x: &Element) -> Result<Element, GroupError> {
    match action {
        Action::LeftRegular => top.multiply(g, x),
        Action::Explicit(f) => Ok(f(g, x)),
    }
}

fn pointwise<'a, I>(base: &Group, mut acc: BTreeMap<Element, Element>, rhs: I) -> Result<BTreeMap<Element, Element>, GroupError>
where
    I: IntoIterator<Item = (Element, &'a Element)>,
{
    for (p, v) in rhs {
        let next = match acc.get(&p) {
            Some(cur) => base.multiply(cur, v)?,
            None => v.clone(),
        };
        if base.is_identity(&next) {
            acc.remove(&p);
        } else {
            acc.insert(p, next);
        }
    }
    Ok(acc)
}

fn fin_support_valid(base: &Group, points: &PointSet, f: &BTreeMap<Element, Element>) -> bool {
    f.iter().all(|(p, v)| points.contains(p) && !base.is_identity(v) && base.contains(v))
}

fn is_bijection(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&i| (i as usize) < p.len() && !std::mem::replace(&mut seen[i as usize], true))
}

/// Subgroup generated by `gens`, by breadth-first right multiplication.
fn closure(group: &Group, gens: &[Element], cap: usize) -> Result<BTreeSet<Element>, GroupError> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    let id = group.identity();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = group.multiply(&x, g)?;
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(GroupError::TooLarge { group: group.label().to_string(), order: format!("> {cap}"), cap });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

pub fn make_trivial() -> Group {
    new_group(GroupKind::Trivial, "1".into(), Vec::new(), Element::Trivial, Order::Finite(BigUint::one()), Claims::FINITE)
}

pub fn make_cyclic(n: u64) -> Result<Group, GroupError> {
    if n == 0 {
        return Err(GroupError::InvalidArgument("cyclic order must be at least 1".into()));
    }
    let gens = if n > 1 { vec![Element::residue(1, n)] } else { Vec::new() };
    Ok(new_group(
        GroupKind::Cyclic(n),
        format!("C({n})"),
        gens,
        Element::residue(0, n),
        Order::Finite(BigUint::from(n)),
        Claims::FINITE,
    ))
}

pub fn make_integers() -> Group {
    new_group(
        GroupKind::Integers,
        "Z".into(),
        vec![Element::int(1)],
        Element::Integer(BigInt::zero()),
        Order::Infinite,
        Claims { residually_finite: true, finite_abelianization: false },
    )
}

/// ⟨r, s⟩ with `r` the unit translation and `s` the reflection `x ↦ -x`.
pub fn make_infinite_dihedral() -> Group {
    new_group(
        GroupKind::InfiniteDihedral,
        "Dinf".into(),
        vec![Element::dihedral(1, false), Element::dihedral(0, true)],
        Element::dihedral(0, false),
        Order::Infinite,
        Claims { residually_finite: true, finite_abelianization: true },
    )
}

/// Permutation group of the given degree generated by image arrays.
pub fn make_perm(degree: usize, generators: Vec<Vec<u32>>) -> Result<Group, GroupError> {
    let label = format!(
        "perm({degree}; {})",
        generators
            .iter()
            .map(|g| {
                let s = Element::Perm(g.clone()).to_string();
                if g.len() == degree && is_bijection(g) { s } else { format!("{g:?}") }
            })
            .collect::<Vec<_>>()
            .join(", ")
    );
    make_perm_labelled(degree, generators, label)
}

fn make_perm_labelled(degree: usize, generators: Vec<Vec<u32>>, label: String) -> Result<Group, GroupError> {
    for g in &generators {
        if g.len() != degree || !is_bijection(g) {
            return Err(GroupError::NotBijective { degree, images: g.clone() });
        }
    }
    let gens: Vec<Element> = generators.into_iter().map(Element::Perm).collect();
    let identity = Element::Perm((0..degree as u32).collect());
    let probe = new_group(GroupKind::Permutation { degree }, label.clone(), gens.clone(), identity.clone(), Order::Infinite, Claims::FINITE);
    let elements = closure(&probe, &gens, ENUMERATION_CAP)?;
    let g = new_group(
        GroupKind::Permutation { degree },
        label,
        gens,
        identity,
        Order::Finite(BigUint::from(elements.len())),
        Claims::FINITE,
    );
    let _ = g.0.elements.set(Ok(Arc::new(elements.into_iter().collect())));
    Ok(g)
}

/// Permutation image array from disjoint cycles.
pub fn perm_from_cycles(degree: usize, cycles: &[Vec<u32>]) -> Result<Vec<u32>, GroupError> {
    let mut images: Vec<u32> = (0..degree as u32).collect();
    let mut touched = vec![false; degree];
    for c in cycles {
        for (i, &a) in c.iter().enumerate() {
            let b = c[(i + 1) % c.len()];
            if a as usize >= degree || b as usize >= degree || std::mem::replace(&mut touched[a as usize], true) {
                return Err(GroupError::NotBijective { degree, images: c.clone() });
            }
            images[a as usize] = b;
        }
    }
    Ok(images)
}

/// Symmetric group on `n` points.
pub fn make_symmetric(n: usize) -> Result<Group, GroupError> {
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(perm_from_cycles(n, &[vec![0, 1]])?);
    }
    if n >= 3 {
        gens.push(perm_from_cycles(n, &[(0..n as u32).collect()])?);
    }
    make_perm_labelled(n, gens, format!("S({n})"))
}

/// Alternating group on `n` points, generated by the 3-cycles `(0 1 k)`.
pub fn make_alternating(n: usize) -> Result<Group, GroupError> {
    let gens = (2..n as u32).map(|k| perm_from_cycles(n, &[vec![0, 1, k]])).collect::<Result<Vec<_>, _>>()?;
    make_perm_labelled(n, gens, format!("A({n})"))
}

pub fn make_product(factors: Vec<Group>) -> Group {
    let label = format!("prod({})", factors.iter().map(Group::label).collect::<Vec<_>>().join(", "));
    let identity = Element::Tuple(factors.iter().map(Group::identity).collect());
    let mut gens = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        for g in f.generators() {
            let mut parts: Vec<Element> = factors.iter().map(Group::identity).collect();
            parts[i] = g.clone();
            gens.push(Element::Tuple(parts));
        }
    }
    let order = factors.iter().try_fold(BigUint::one(), |acc, f| f.order().finite().map(|n| acc * n));
    let claims = Claims {
        residually_finite: factors.iter().all(|f| f.claims().residually_finite),
        finite_abelianization: factors.iter().all(|f| f.claims().finite_abelianization),
    };
    new_group(GroupKind::Product(factors), label, gens, identity, order.map_or(Order::Infinite, Order::Finite), claims)
}

/// Number of points that carry probe generators of a power over an
/// infinite point set.
pub const PROBE_POINTS: usize = 8;

/// Functions `points → base` with finite support, multiplied pointwise.
pub fn finite_support_power(base: &Group, points: PointSet) -> Group {
    let label = format!("power({}, {})", base.label(), points.label());
    let carriers = match &points {
        PointSet::Finite { points, .. } => points.clone(),
        other => other.first(PROBE_POINTS),
    };
    let gens = carriers
        .iter()
        .flat_map(|p| base.generators().iter().map(move |g| Element::support([(p.clone(), g.clone())])))
        .collect();
    let order = match (base.order(), points.len()) {
        _ if base.is_trivial() => Order::Finite(BigUint::one()),
        (Order::Finite(b), Some(m)) => Order::Finite(pow_order(b, m)),
        _ => Order::Infinite,
    };
    let claims = if order.is_finite() { Claims::FINITE } else { Claims::default() };
    new_group(
        GroupKind::FinSupportPower { base: base.clone(), points },
        label,
        gens,
        Element::FinSupport(BTreeMap::new()),
        order,
        claims,
    )
}

/// Number of probe pairs used to check a supplied action.
const ACTION_PROBES: usize = 32;

/// Restricted wreath product `K ≀_X G = K^(X) ⋊ G`.
///
/// With [`Action::Explicit`] the action is probed on finite point sets:
/// the identity must fix every point and `g·(h·x) = (gh)·x` must hold for
/// seeded probe pairs.
pub fn wreath_product(base: &Group, top: &Group, points: PointSet, action: Action) -> Result<Group, GroupError> {
    if let Action::Explicit(f) = &action {
        let PointSet::Finite { points: pts, .. } = &points else {
            return Err(GroupError::NotAnAction("explicit actions need a finite point set".into()));
        };
        let id = top.identity();
        for x in pts {
            if f(&id, x) != *x {
                return Err(GroupError::NotAnAction(format!("identity moves point {x}")));
            }
        }
        let probes = probe_elements(top, &ProbeConfig { count: ACTION_PROBES, max_len: 6, seed: 0 });
        for g in &probes {
            for h in &probes {
                let gh = top.multiply(g, h)?;
                for x in pts {
                    let lhs = f(g, &f(h, x));
                    if !pts.contains(&lhs) {
                        return Err(GroupError::NotAnAction(format!("{g} sends {x} outside the point set")));
                    }
                    if lhs != f(&gh, x) {
                        return Err(GroupError::NotAnAction(format!("g·(h·x) ≠ (gh)·x for g={g}, h={h}, x={x}")));
                    }
                }
            }
        }
    }
    let label = match &action {
        Action::LeftRegular => format!("wreath({}, {})", base.label(), top.label()),
        Action::Explicit(_) => format!("wreath({}, {}; {})", base.label(), top.label(), points.label()),
    };
    let mut gens = Vec::new();
    let carriers: Vec<Element> = match (&action, &points) {
        (Action::LeftRegular, _) => vec![top.identity()],
        (_, PointSet::Finite { points, .. }) => points.clone(),
        _ => Vec::new(),
    };
    for p in &carriers {
        for k in base.generators() {
            gens.push(Element::wreath(Element::support([(p.clone(), k.clone())]), top.identity()));
        }
    }
    for g in top.generators() {
        gens.push(Element::wreath(Element::FinSupport(BTreeMap::new()), g.clone()));
    }
    let order = match (base.order(), top.order(), points.len()) {
        (_, Order::Finite(t), _) if base.is_trivial() => Order::Finite(t.clone()),
        (Order::Finite(b), Order::Finite(t), Some(m)) => Order::Finite(pow_order(b, m) * t),
        _ => Order::Infinite,
    };
    let claims = if order.is_finite() { Claims::FINITE } else { Claims::default() };
    let identity = Element::wreath(Element::FinSupport(BTreeMap::new()), top.identity());
    Ok(new_group(GroupKind::Wreath { base: base.clone(), top: top.clone(), points, action }, label, gens, identity, order, claims))
}

/// `K ≀ G`: the top group acting on itself by left multiplication.
pub fn wreath_self(base: &Group, top: &Group) -> Result<Group, GroupError> {
    wreath_product(base, top, PointSet::of_group(top), Action::LeftRegular)
}

/// `G_1 = G`, `G_{i+1} = G_i ≀ G`.
pub fn make_tower(g: &Group, n: u64) -> Result<Group, GroupError> {
    if n == 0 {
        return Err(GroupError::InvalidArgument("tower height must be at least 1".into()));
    }
    let mut current = g.clone();
    for _ in 1..n {
        current = wreath_self(&current, g)?;
    }
    Ok(current)
}

/// Derived subgroup of a finite group: the normal closure of the
/// commutators of generator pairs.
pub fn commutator_subgroup(g: &Group) -> Result<Group, GroupError> {
    if !g.order().is_finite() {
        return Err(GroupError::Infinite(g.label().to_string()));
    }
    let elements = g.elements()?;
    let gens = g.generators();
    let mut seeds: Vec<Element> = Vec::new();
    for a in gens {
        for b in gens {
            let c = g.commutator(a, b)?;
            if !g.is_identity(&c) && !seeds.contains(&c) {
                seeds.push(c);
            }
        }
    }
    let mut members = closure(g, &seeds, elements.len())?;
    loop {
        let mut grew = false;
        for h in seeds.clone() {
            for x in gens {
                let c = g.conjugate(x, &h)?;
                if !members.contains(&c) {
                    seeds.push(c);
                    members = closure(g, &seeds, elements.len())?;
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    Ok(subgroup_from_members(g, members, seeds, format!("[{0}, {0}]", g.label())))
}

/// Subgroup handle over an explicitly listed, already closed element set.
pub fn subgroup_from_members(parent: &Group, members: BTreeSet<Element>, generators: Vec<Element>, label: String) -> Group {
    let order = Order::Finite(BigUint::from(members.len()));
    new_group(
        GroupKind::Subgroup { parent: parent.clone(), members: Arc::new(members) },
        label,
        generators,
        parent.identity(),
        order,
        Claims::FINITE,
    )
}
