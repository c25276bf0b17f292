//! Finite treeable semi-lattices with a convex linear extension, and the
//! passage to and from orders rooted at an end.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{convexity_violation, CloWitness, OrderError};
use crate::label::{EndId, OrderSet, PointId};
use crate::universe::{Target, Universe, UniverseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CtError {
    #[error("not a treeable semi-lattice: {0}")]
    NotTreeable(String),
    #[error("not a convex linear extension: {0:?}")]
    NotConvexExtension(Vec<PointId>),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Universe(#[from] UniverseError),
}

/// A partial order given by its strict pairs, and a linear order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtStructure {
    pub carrier: BTreeSet<PointId>,
    /// (a, b) with a < b
    pub less: BTreeSet<(PointId, PointId)>,
    /// increasing
    pub order: Vec<PointId>,
}

impl CtStructure {
    pub fn le(&self, a: PointId, b: PointId) -> bool {
        a == b || self.less.contains(&(a, b))
    }

    pub fn down(&self, a: PointId) -> BTreeSet<PointId> {
        self.carrier.iter().copied().filter(|&x| self.le(x, a)).collect()
    }

    /// The greatest common lower bound.
    pub fn meet(&self, a: PointId, b: PointId) -> Option<PointId> {
        let common: Vec<PointId> = self.down(a).intersection(&self.down(b)).copied().collect();
        common.iter().copied().find(|&m| common.iter().all(|&x| self.le(x, m)))
    }

    pub fn minimum(&self) -> Option<PointId> {
        self.carrier.iter().copied().find(|&m| self.carrier.iter().all(|&x| self.le(m, x)))
    }

    pub fn check(&self) -> Result<(), CtError> {
        let bad = |s: String| Err(CtError::NotTreeable(s));
        for &(a, b) in &self.less {
            if !self.carrier.contains(&a) || !self.carrier.contains(&b) || a == b {
                return bad(format!("pair ({a}, {b}) outside the carrier"));
            }
            if self.less.contains(&(b, a)) {
                return bad(format!("{a} and {b} are both below each other"));
            }
            for &(b2, c) in self.less.range((b, PointId(0))..) {
                if b2 != b {
                    break;
                }
                if !self.less.contains(&(a, c)) {
                    return bad(format!("{a} < {b} < {c} but not {a} < {c}"));
                }
            }
        }
        if self.carrier.is_empty() {
            return bad("empty carrier".into());
        }
        if self.minimum().is_none() {
            return bad("no minimum".into());
        }
        for &a in &self.carrier {
            let d: Vec<PointId> = self.down(a).into_iter().collect();
            for (i, &x) in d.iter().enumerate() {
                for &y in &d[i + 1..] {
                    if !self.le(x, y) && !self.le(y, x) {
                        return bad(format!("{x} and {y} below {a} are incomparable"));
                    }
                }
            }
        }
        let placed: BTreeSet<PointId> = self.order.iter().copied().collect();
        if placed != self.carrier || placed.len() != self.order.len() {
            return bad("linear order is not a permutation of the carrier".into());
        }
        let rank: BTreeMap<PointId, usize> = self.order.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        for &(a, b) in &self.less {
            if rank[&a] > rank[&b] {
                return Err(CtError::NotConvexExtension(vec![a, b]));
            }
        }
        // a, b incomparable with m = a ∧ b; any m < a′ ≤ a, m < b′ ≤ b
        // must compare like a and b
        for (i, &a) in self.order.iter().enumerate() {
            for &b in &self.order[i + 1..] {
                if self.le(a, b) || self.le(b, a) {
                    continue;
                }
                let m = self.meet(a, b).expect("chains below points");
                for ap in self.down(a) {
                    if !self.less.contains(&(m, ap)) {
                        continue;
                    }
                    for bp in self.down(b) {
                        if self.less.contains(&(m, bp)) && rank[&bp] < rank[&ap] {
                            return Err(CtError::NotConvexExtension(vec![a, b, ap, bp]));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// a ≤ b iff a ∈ [ξ, b]; the carrier must be closed under meets.
pub fn to_ct(u: &Universe, w: &CloWitness, xi: EndId) -> Result<CtStructure, CtError> {
    if w.root != Target::End(xi) {
        return Err(OrderError::NotRootedAtXi(xi).into());
    }
    if let Some(v) = convexity_violation(u, w)? {
        return Err(CtError::NotConvexExtension(vec![v.a, v.a_prime, v.b, v.b_prime]));
    }
    let anchor = u.end_anchor(xi)?;
    let mut less = BTreeSet::new();
    for &a in &w.points {
        for &b in &w.points {
            let m = u.c(a, b, anchor);
            if !w.points.contains(&m) {
                return Err(CtError::NotTreeable(format!("{a} ∧ {b} = {m} is outside the carrier")));
            }
            if a != b && m == a {
                less.insert((a, b));
            }
        }
    }
    let ct = CtStructure { carrier: w.points.clone(), less, order: w.order.clone() };
    ct.check()?;
    Ok(ct)
}

/// Realizes the semi-lattice as a rooted tree in a fresh universe: the
/// minimum carries the end, every other element hangs off its immediate
/// predecessor. Returns the images of the carrier as well.
pub fn from_ct(ct: &CtStructure) -> Result<(Universe, EndId, CloWitness, BTreeMap<PointId, PointId>), CtError> {
    ct.check()?;
    let mut u = Universe::new(OrderSet::infinite());
    let r = ct.minimum().expect("checked");
    let mut img = BTreeMap::from([(r, u.root())]);
    let xi = u.register_end(u.root())?;
    let mut rest: Vec<PointId> = ct.carrier.iter().copied().filter(|&a| a != r).collect();
    rest.sort_by_key(|&a| (ct.down(a).len(), a));
    for a in rest {
        let below = ct.down(a);
        let parent = below.iter().copied().filter(|&p| p != a).max_by_key(|&p| ct.down(p).len()).expect("minimum below");
        let v = u.add_branch(img[&parent])?;
        img.insert(a, v);
    }
    let order = ct.order.iter().map(|a| img[a]).collect();
    let w = CloWitness::new(&u, order, Target::End(xi))?;
    Ok((u, xi, w, img))
}
