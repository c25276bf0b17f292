//! Convex converging linear orders on finite branch sets, their product
//! encoding over component orders, treeable semi-lattices, order transport
//! and the invariant measure.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iso::IsoError;
use crate::label::{EndId, PointId};
use crate::universe::{ComponentRef, Target, Universe, UniverseError};

mod ct;
mod example;
mod measure;
mod transport;

pub use ct::{from_ct, to_ct, CtError, CtStructure};
pub use example::{nonconvex_example, NonconvexExample};
pub use measure::{
    chi_square_two_sample, chi_square_uniform, component_representatives, pattern_counts, perm_index, sample_invariant,
    xi_fixing_preimage, ChiSquareReport, InvariantSampler,
};
pub use transport::{transport_order, verify_transport, Transport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("{0} appears twice in the order")]
    Duplicate(PointId),
    #[error("{0} is not a branch point")]
    NotBranch(PointId),
    #[error("point set is not c-closed")]
    NotCClosed,
    #[error("not converging: {1} lies between {0} and {2} but comes after both")]
    NotConverging(PointId, PointId, PointId),
    #[error("{0} lies on the arc from the root to {1} but comes after it")]
    RootIncompatible(PointId, PointId),
    #[error("components at {at} are not compared uniformly: {witness:?}")]
    DichotomyViolated { at: PointId, witness: Vec<PointId> },
    #[error("no order given for component {0:?}")]
    MissingComponent(ComponentRef),
    #[error("the order is not rooted at {0}")]
    NotRootedAtXi(EndId),
    #[error("{0} is not in the order")]
    NotInOrder(PointId),
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error(transparent)]
    Universe(#[from] UniverseError),
}

/// A linear order on a finite c-closed branch set with its root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloWitness {
    pub points: BTreeSet<PointId>,
    /// increasing
    pub order: Vec<PointId>,
    pub root: Target,
}

impl CloWitness {
    pub fn new(u: &Universe, order: Vec<PointId>, root: Target) -> Result<Self, OrderError> {
        let mut points = BTreeSet::new();
        for &p in &order {
            if !u.label(p)?.is_branch() {
                return Err(OrderError::NotBranch(p));
            }
            if !points.insert(p) {
                return Err(OrderError::Duplicate(p));
            }
        }
        u.proxy(root)?;
        if !u.is_c_closed(&points) {
            return Err(OrderError::NotCClosed);
        }
        Ok(CloWitness { points, order, root })
    }

    pub fn rank(&self) -> BTreeMap<PointId, usize> {
        self.order.iter().enumerate().map(|(i, &p)| (p, i)).collect()
    }

    pub fn minimum(&self) -> Option<PointId> {
        self.order.first().copied()
    }

    /// The order induced on a c-closed subset, rooted at the first point of
    /// its hull seen from the old root.
    pub fn restrict(&self, u: &Universe, sub: &BTreeSet<PointId>) -> Result<CloWitness, OrderError> {
        if let Some(p) = sub.iter().find(|p| !self.points.contains(p)) {
            return Err(OrderError::NotInOrder(*p));
        }
        let root = u.first_point(sub, u.proxy(self.root)?)?;
        let order = self.order.iter().copied().filter(|p| sub.contains(p)).collect();
        CloWitness::new(u, order, Target::Point(root))
    }
}

/// A total order on some components at `at`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentOrder {
    pub at: PointId,
    pub order: Vec<ComponentRef>,
}

impl ComponentOrder {
    pub fn position(&self, c: ComponentRef) -> Option<usize> {
        self.order.iter().position(|&d| d == c)
    }
}

pub type ComponentOrders = BTreeMap<PointId, ComponentOrder>;

/// Points a, a′, b, b′ with a ≺ a′ and b′ ≺ b although a ∈ [b, center[ and
/// a′ ∈ [b′, center[.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityWitness {
    pub a: PointId,
    pub a_prime: PointId,
    pub b: PointId,
    pub b_prime: PointId,
    pub center: PointId,
}

/// Outcome of all checks on a witness; `None` fields passed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloCheck {
    pub not_converging: Option<[PointId; 3]>,
    pub root_incompatible: Option<[PointId; 2]>,
    pub not_convex: Option<ConvexityWitness>,
}

impl CloCheck {
    pub fn ok(&self) -> bool {
        self.not_converging.is_none() && self.root_incompatible.is_none() && self.not_convex.is_none()
    }
}

/// A triple (x, y, z) with y ∈ ]x, z[, x ≺ y and z ≺ y.
pub fn converging_violation(u: &Universe, order: &[PointId]) -> Option<[PointId; 3]> {
    for (j, &y) in order.iter().enumerate() {
        let before = &order[..j];
        for (i, &x) in before.iter().enumerate() {
            for &z in &before[i + 1..] {
                if u.strictly_between(y, x, z) {
                    return Some([x, y, z]);
                }
            }
        }
    }
    None
}

pub fn is_converging(u: &Universe, w: &CloWitness) -> bool {
    converging_violation(u, &w.order).is_none()
}

/// The ≺-minimum of a converging order and the first pair (a, b) with
/// a ∈ [m, b] but b ≺ a, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootReport {
    pub root: PointId,
    pub incompatible: Option<[PointId; 2]>,
}

pub fn root_of(u: &Universe, order: &[PointId]) -> Result<RootReport, OrderError> {
    if let Some([x, y, z]) = converging_violation(u, order) {
        return Err(OrderError::NotConverging(x, y, z));
    }
    let Some(&m) = order.first() else { return Err(UniverseError::Empty.into()) };
    Ok(RootReport { root: m, incompatible: root_violation(u, order, m) })
}

/// (a, b) with a ∈ [p, b] and b ≺ a.
fn root_violation(u: &Universe, order: &[PointId], p: PointId) -> Option<[PointId; 2]> {
    for (j, &a) in order.iter().enumerate() {
        for &b in &order[..j] {
            if u.between(a, p, b) {
                return Some([a, b]);
            }
        }
    }
    None
}

pub fn convexity_violation(u: &Universe, w: &CloWitness) -> Result<Option<ConvexityWitness>, OrderError> {
    if let Some([x, y, z]) = converging_violation(u, &w.order) {
        return Err(OrderError::NotConverging(x, y, z));
    }
    let p = u.proxy(w.root)?;
    let rank = w.rank();
    let mut pairs = Vec::new();
    for (i, &x) in w.order.iter().enumerate() {
        for &y in &w.order[i + 1..] {
            let c = u.c(x, y, p);
            if c == x || c == y {
                continue;
            }
            let side = |s: PointId| -> Result<Vec<PointId>, OrderError> {
                let mut v = u.path(s, c)?;
                v.pop();
                v.retain(|q| w.points.contains(q));
                Ok(v)
            };
            pairs.push((x, y, c, side(x)?, side(y)?));
        }
    }
    // violations on four distinct points are the informative ones
    for distinct in [true, false] {
        for (x, y, c, xs, ys) in &pairs {
            for &xp in xs {
                for &yp in ys {
                    if rank[&yp] < rank[&xp] && (!distinct || (xp != *x && yp != *y)) {
                        return Ok(Some(ConvexityWitness { a: yp, a_prime: xp, b: *y, b_prime: *x, center: *c }));
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn is_convex(u: &Universe, w: &CloWitness) -> Result<bool, OrderError> {
    Ok(convexity_violation(u, w)?.is_none())
}

pub fn check_clo(u: &Universe, w: &CloWitness) -> Result<CloCheck, OrderError> {
    let mut r = CloCheck { not_converging: converging_violation(u, &w.order), ..CloCheck::default() };
    r.root_incompatible = root_violation(u, &w.order, u.proxy(w.root)?);
    if r.not_converging.is_none() {
        r.not_convex = convexity_violation(u, w)?;
    }
    Ok(r)
}

/// Components at b not containing the root.
pub fn open_components(u: &Universe, root: Target, b: PointId) -> Result<Vec<ComponentRef>, OrderError> {
    let mut cs = u.components_at(b)?;
    if root != Target::Point(b) {
        let r = u.component_of(b, root)?;
        cs.retain(|&c| c != r);
    }
    Ok(cs)
}

/// Components at x away from the root that meet the points, in the order
/// the witness induces on them.
pub fn induced_component_order(u: &Universe, w: &CloWitness, x: PointId) -> Result<ComponentOrder, OrderError> {
    let open = open_components(u, w.root, x)?;
    let mut first: Vec<(ComponentRef, PointId)> = Vec::new();
    let mut comp_of = BTreeMap::new();
    for &p in &w.order {
        if p == x {
            continue;
        }
        let c = u.component_of(x, Target::Point(p))?;
        if !open.contains(&c) {
            continue;
        }
        comp_of.insert(p, c);
        if !first.iter().any(|(d, _)| *d == c) {
            first.push((c, p));
        }
    }
    let co = ComponentOrder { at: x, order: first.iter().map(|(c, _)| *c).collect() };
    let pos = |p: &PointId| co.position(comp_of[p]).unwrap();
    let members: Vec<PointId> = w.order.iter().copied().filter(|p| comp_of.contains_key(p)).collect();
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            if pos(a) > pos(b) {
                let fa = first[pos(a)].1;
                let fb = first[pos(b)].1;
                return Err(OrderError::DichotomyViolated { at: x, witness: vec![fb, fa, a.to_owned(), b.to_owned()] });
            }
        }
    }
    Ok(co)
}

/// a ≺ b iff c(a, b, root) = a, or the components of a and b at that center
/// are ordered so.
pub(crate) fn compare(
    u: &Universe,
    proxy: PointId,
    comps: &ComponentOrders,
    a: PointId,
    b: PointId,
) -> Result<Ordering, OrderError> {
    if a == b {
        return Ok(Ordering::Equal);
    }
    let c = u.c(a, b, proxy);
    if c == a {
        return Ok(Ordering::Less);
    }
    if c == b {
        return Ok(Ordering::Greater);
    }
    let ca = u.component_of(c, Target::Point(a))?;
    let cb = u.component_of(c, Target::Point(b))?;
    let co = comps.get(&c).ok_or(OrderError::MissingComponent(ca))?;
    let pa = co.position(ca).ok_or(OrderError::MissingComponent(ca))?;
    let pb = co.position(cb).ok_or(OrderError::MissingComponent(cb))?;
    Ok(pa.cmp(&pb))
}

pub(crate) fn sort_points(
    u: &Universe,
    proxy: PointId,
    comps: &ComponentOrders,
    points: impl IntoIterator<Item = PointId>,
) -> Result<Vec<PointId>, OrderError> {
    let mut out: Vec<PointId> = Vec::new();
    for p in points {
        let (mut lo, mut hi) = (0, out.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if compare(u, proxy, comps, out[mid], p)? == Ordering::Less {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        out.insert(lo, p);
    }
    Ok(out)
}

/// The order on `points` determined by the root and the component orders.
pub fn decode(
    u: &Universe,
    root: Target,
    comps: &ComponentOrders,
    points: &BTreeSet<PointId>,
) -> Result<CloWitness, OrderError> {
    let order = sort_points(u, u.proxy(root)?, comps, points.iter().copied())?;
    CloWitness::new(u, order, root)
}

/// The component orders at every center c(a, b, root) ∉ {a, b}, restricted
/// to components that meet the points. Fails unless decoding gives back the
/// same order.
pub fn rooted_encoding(u: &Universe, w: &CloWitness) -> Result<ComponentOrders, OrderError> {
    let p = u.proxy(w.root)?;
    let mut firsts: BTreeMap<PointId, Vec<ComponentRef>> = BTreeMap::new();
    for (i, &a) in w.order.iter().enumerate() {
        for &b in &w.order[i + 1..] {
            let c = u.c(a, b, p);
            if c == b {
                return Err(OrderError::RootIncompatible(b, a));
            }
            if c == a {
                continue;
            }
            let e = firsts.entry(c).or_default();
            for x in [a, b] {
                let cx = u.component_of(c, Target::Point(x))?;
                if !e.contains(&cx) {
                    e.push(cx);
                }
            }
        }
    }
    let comps: ComponentOrders =
        firsts.into_iter().map(|(at, order)| (at, ComponentOrder { at, order })).collect();
    for (i, &a) in w.order.iter().enumerate() {
        for &b in &w.order[i + 1..] {
            if compare(u, p, &comps, a, b)? != Ordering::Less {
                let c = u.c(a, b, p);
                let ca = u.component_of(c, Target::Point(a))?;
                let cb = u.component_of(c, Target::Point(b))?;
                let lead = |k: ComponentRef| {
                    w.order.iter().copied().find(|&q| q != c && u.component_of(c, Target::Point(q)).ok() == Some(k))
                };
                let witness = [lead(cb), lead(ca), Some(a), Some(b)].into_iter().flatten().collect();
                return Err(OrderError::DichotomyViolated { at: c, witness });
            }
        }
    }
    Ok(comps)
}

/// Component orders at every point of a convex converging witness rooted at
/// ξ, each over the components that meet the points.
pub fn product_encode(u: &Universe, w: &CloWitness, xi: EndId) -> Result<ComponentOrders, OrderError> {
    if w.root != Target::End(xi) {
        return Err(OrderError::NotRootedAtXi(xi));
    }
    convexity_violation(u, w)?;
    w.points.iter().map(|&b| Ok((b, induced_component_order(u, w, b)?))).collect()
}

pub fn product_decode(
    u: &Universe,
    xi: EndId,
    comps: &ComponentOrders,
    points: &BTreeSet<PointId>,
) -> Result<CloWitness, OrderError> {
    decode(u, Target::End(xi), comps, points)
}

pub fn branch_points(u: &Universe) -> BTreeSet<PointId> {
    u.points().filter(|&p| u.label(p).map(|l| l.is_branch()).unwrap_or(false)).collect()
}

/// The order ≺₀ on all materialized branch points.
pub fn build_clo(u: &Universe, xi: EndId, comps: &ComponentOrders) -> Result<CloWitness, OrderError> {
    decode(u, Target::End(xi), comps, &branch_points(u))
}

/// A uniformly random order on the open components at every branch point.
pub fn random_component_orders<R: Rng>(u: &Universe, root: Target, rng: &mut R) -> Result<ComponentOrders, OrderError> {
    let mut out = ComponentOrders::new();
    for b in branch_points(u) {
        let mut order = open_components(u, root, b)?;
        order.shuffle(rng);
        out.insert(b, ComponentOrder { at: b, order });
    }
    Ok(out)
}

/// Keeps, at each point, only the components that meet `points`.
pub fn restrict_orders(
    u: &Universe,
    comps: &ComponentOrders,
    points: &BTreeSet<PointId>,
) -> Result<ComponentOrders, OrderError> {
    let mut out = ComponentOrders::new();
    for &b in points {
        let mut met = BTreeSet::new();
        for &p in points {
            if p != b {
                met.insert(u.component_of(b, Target::Point(p))?);
            }
        }
        let order = comps.get(&b).map(|co| co.order.iter().copied().filter(|c| met.contains(c)).collect());
        out.insert(b, ComponentOrder { at: b, order: order.unwrap_or_default() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
