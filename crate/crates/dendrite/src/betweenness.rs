//! Ternary betweenness relations, their positive-type check and realization
//! as finite trees.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::{Label, PointId};
use crate::tree::FiniteTree;

/// A betweenness relation on a finite carrier. Only the non-trivial triples
/// (z strictly between distinct x and y) are stored; `B(x;x,y)` always holds.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetweennessRel {
    pub carrier: BTreeSet<PointId>,
    triples: BTreeSet<(PointId, PointId, PointId)>,
}

/// Why a relation fails to be realizable by a tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub points: Vec<PointId>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BetweennessError {
    #[error("relation is not of positive type: {}", .0.reason)]
    NotPositiveType(Violation),
}

impl BetweennessRel {
    pub fn new(carrier: impl IntoIterator<Item = PointId>) -> Self {
        BetweennessRel { carrier: carrier.into_iter().collect(), triples: BTreeSet::new() }
    }

    /// Declares z strictly between x and y.
    pub fn insert(&mut self, z: PointId, x: PointId, y: PointId) {
        assert!(z != x && z != y && x != y, "only strict triples are stored");
        for v in [x, y, z] {
            self.carrier.insert(v);
        }
        self.triples.insert((z, x.min(y), x.max(y)));
    }

    /// B(z; x, y).
    pub fn holds(&self, z: PointId, x: PointId, y: PointId) -> bool {
        if z == x || z == y {
            return true;
        }
        if x == y {
            return false;
        }
        self.triples.contains(&(z, x.min(y), x.max(y)))
    }

    /// The path-betweenness of `t` restricted to `carrier`.
    pub fn from_tree(t: &FiniteTree, carrier: &BTreeSet<PointId>) -> Self {
        let v: Vec<PointId> = carrier.iter().copied().collect();
        let mut b = BetweennessRel::new(v.iter().copied());
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                for &z in &v {
                    if z != v[i] && z != v[j] && t.between_unchecked(z, v[i], v[j]) {
                        b.insert(z, v[i], v[j]);
                    }
                }
            }
        }
        b
    }

    pub fn triples(&self) -> impl Iterator<Item = (PointId, PointId, PointId)> + '_ {
        self.triples.iter().copied()
    }

    fn axiom_violation(&self) -> Option<Violation> {
        let v: Vec<PointId> = self.carrier.iter().copied().collect();
        for &(z, x, y) in &self.triples {
            // Strict betweenness is antisymmetric: z ∈ ]x,y[ excludes x ∈ ]z,y[.
            if self.holds(x, z, y) {
                return Some(Violation {
                    points: vec![x, y, z],
                    reason: format!("{z} and {x} are each strictly between the other and {y}"),
                });
            }
        }
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let (x, y) = (v[i], v[j]);
                let inner: Vec<PointId> =
                    v.iter().copied().filter(|&w| w != x && w != y && self.holds(w, x, y)).collect();
                for a in 0..inner.len() {
                    for b in a + 1..inner.len() {
                        let (u, w) = (inner[a], inner[b]);
                        if !self.holds(u, x, w) && !self.holds(w, x, u) {
                            return Some(Violation {
                                points: vec![x, y, u, w],
                                reason: format!(
                                    "{u} and {w} both lie between {x} and {y} without being ordered (two medians for the triple)"
                                ),
                            });
                        }
                    }
                }
            }
        }
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                for k in j + 1..v.len() {
                    let (x, y, z) = (v[i], v[j], v[k]);
                    let meds: Vec<PointId> = v
                        .iter()
                        .copied()
                        .filter(|&w| self.holds(w, x, y) && self.holds(w, y, z) && self.holds(w, z, x))
                        .collect();
                    if meds.len() > 1 {
                        return Some(Violation {
                            points: vec![x, y, z, meds[0], meds[1]],
                            reason: format!("triple ({x},{y},{z}) has medians {} and {}", meds[0], meds[1]),
                        });
                    }
                }
            }
        }
        None
    }

    /// `None` when the relation is the path-betweenness of some tree,
    /// otherwise a counterexample.
    pub fn positive_type_violation(&self) -> Option<Violation> {
        if let Some(v) = self.axiom_violation() {
            return Some(v);
        }
        let mut next = u64::MAX / 2;
        match realize_inner(self, &mut || {
            next += 1;
            PointId(next)
        }) {
            Ok(_) => None,
            Err(v) => Some(v),
        }
    }
}

/// True iff `b` is realized by a finite tree (every triple has exactly one
/// median in the realization and intervals are linearly ordered).
pub fn verify_positive_type(b: &BetweennessRel) -> bool {
    b.positive_type_violation().is_none()
}

/// A tree whose path-betweenness restricted to the carrier is `b`. Added
/// vertices are medians of carrier points and get ids from `alloc`.
pub fn realize_tree(
    b: &BetweennessRel,
    alloc: &mut dyn FnMut() -> PointId,
) -> Result<FiniteTree, BetweennessError> {
    if let Some(v) = b.axiom_violation() {
        return Err(BetweennessError::NotPositiveType(v));
    }
    realize_inner(b, alloc).map_err(BetweennessError::NotPositiveType)
}

/// Temporary id of the Steiner point created while placing the i-th point.
fn tmp(i: usize) -> PointId {
    PointId(u64::MAX - i as u64)
}

/// Inserts the carrier points one at a time, backtracking when no position
/// for the next point fits: a relation on a set that is not c-closed can have
/// several realizations, and an early choice may rule out a later point.
fn realize_inner(b: &BetweennessRel, alloc: &mut dyn FnMut() -> PointId) -> Result<FiniteTree, Violation> {
    let pts: Vec<PointId> = b.carrier.iter().copied().collect();
    let Some(&first) = pts.first() else { return Ok(FiniteTree::new()) };
    let mut deepest = 0;
    let Some(mut t) = place(b, &pts, 1, FiniteTree::single(first, Label::Infinite), BTreeSet::new(), &mut deepest) else {
        let p = pts[deepest];
        return Err(Violation {
            points: pts[..=deepest].to_vec(),
            reason: format!("no tree position for {p} reproduces the relation"),
        });
    };
    let mut steiner: Vec<PointId> = t.vertices().filter(|v| !b.carrier.contains(v)).collect();
    steiner.sort_by(|a, c| c.cmp(a));
    for s in steiner {
        t = rename(&t, s, alloc());
    }
    Ok(t)
}

fn place(
    b: &BetweennessRel,
    pts: &[PointId],
    i: usize,
    t: FiniteTree,
    steiner: BTreeSet<PointId>,
    deepest: &mut usize,
) -> Option<FiniteTree> {
    if i == pts.len() {
        return Some(t);
    }
    *deepest = (*deepest).max(i);
    let p = pts[i];
    for cand in candidates(&t, &steiner) {
        let t2 = apply(&t, cand, p, tmp(i));
        if !consistent(&t2, b, &pts[..i], p) {
            continue;
        }
        let mut s2 = steiner.clone();
        match cand {
            Cand::Identify(s) => {
                s2.remove(&s);
            }
            Cand::Fork(..) => {
                s2.insert(tmp(i));
            }
            _ => {}
        }
        if let Some(done) = place(b, pts, i + 1, t2, s2, deepest) {
            return Some(done);
        }
    }
    None
}

#[derive(Clone, Copy)]
enum Cand {
    Identify(PointId),
    Leaf(PointId),
    Split(PointId, PointId),
    Fork(PointId, PointId),
}

fn candidates(t: &FiniteTree, steiner: &BTreeSet<PointId>) -> Vec<Cand> {
    let mut out: Vec<Cand> = steiner.iter().map(|&s| Cand::Identify(s)).collect();
    out.extend(t.vertices().map(Cand::Leaf));
    for (a, c) in t.edges() {
        out.push(Cand::Split(a, c));
        out.push(Cand::Fork(a, c));
    }
    out
}

fn apply(t: &FiniteTree, c: Cand, p: PointId, fresh: PointId) -> FiniteTree {
    let mut t2 = t.clone();
    match c {
        Cand::Identify(s) => return rename(t, s, p),
        Cand::Leaf(v) => t2.add_leaf(v, p, Label::Infinite).unwrap(),
        Cand::Split(a, c) => t2.subdivide(a, c, p, Label::Infinite).unwrap(),
        Cand::Fork(a, c) => {
            t2.subdivide(a, c, fresh, Label::Infinite).unwrap();
            t2.add_leaf(fresh, p, Label::Infinite).unwrap();
        }
    }
    t2
}

fn rename(t: &FiniteTree, from: PointId, to: PointId) -> FiniteTree {
    let f = |v: PointId| if v == from { to } else { v };
    FiniteTree::from_parts(
        t.labels().iter().map(|(&v, &l)| (f(v), l)),
        t.edges().into_iter().map(|(a, c)| (f(a), f(c))),
    )
    .expect("renaming preserves tree shape")
}

fn consistent(t: &FiniteTree, b: &BetweennessRel, placed: &[PointId], p: PointId) -> bool {
    for i in 0..placed.len() {
        let x = placed[i];
        for &y in &placed[i + 1..] {
            if t.between_unchecked(p, x, y) != b.holds(p, x, y) {
                return false;
            }
        }
        for &y in placed {
            if y != x && t.between_unchecked(x, p, y) != b.holds(x, p, y) {
                return false;
            }
        }
    }
    true
}
