//! A lazily growing finite model of the branch points of a Ważewski dendrite,
//! with registered ideal ends.
//!
//! Points are only ever added, never removed or moved, so every query answered
//! at one time gives the same answer later. An end is kept as an anchor vertex
//! plus a reserved, still empty component of that anchor; refining the end
//! materializes a point inside the reserved component and moves the anchor
//! there.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::{EndId, Label, OrderSet, PointId};
use crate::tree::{FiniteTree, TreeError, TreeJson};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("label {0} is not in the order set")]
    LabelNotInS(Label),
    #[error("{0} has no free component left")]
    OrderExhausted(PointId),
    #[error("point set is not c-closed")]
    NotCClosed,
    #[error("component of a point at itself")]
    SamePoint,
    #[error("unknown end {0}")]
    UnknownEnd(EndId),
    #[error("{0} and {1} coincide")]
    Degenerate(PointId, PointId),
    #[error("empty point set")]
    Empty,
}

/// A point of the universe or a registered end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Point(PointId),
    End(EndId),
}

impl From<PointId> for Target {
    fn from(p: PointId) -> Self {
        Target::Point(p)
    }
}

impl From<EndId> for Target {
    fn from(e: EndId) -> Self {
        Target::End(e)
    }
}

/// Stable name for a component of the complement of `at`: the smallest
/// entity id (point or end) the component contains. Ids grow monotonically
/// and components never merge, so the name never changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentRef {
    pub at: PointId,
    pub key: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndData {
    pub anchor: PointId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    order_set: OrderSet,
    tree: FiniteTree,
    ends: BTreeMap<EndId, EndData>,
    next_id: u64,
}

/// One growth primitive, as stored in replay scripts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum GrowthOp {
    AddBetween { x: PointId, y: PointId, label: Label },
    AddBranch { x: PointId },
    RegisterEnd { anchor: PointId },
    RefineEnd { end: EndId },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniverseJson {
    pub order_set: OrderSet,
    pub tree: TreeJson,
    pub ends: BTreeMap<EndId, EndData>,
    pub next_id: u64,
}

impl Universe {
    /// A universe with a single point labelled by the default order of `s`.
    pub fn new(s: OrderSet) -> Self {
        let l = s.default_label();
        Universe { order_set: s, tree: FiniteTree::single(PointId(0), l), ends: BTreeMap::new(), next_id: 1 }
    }

    pub fn order_set(&self) -> &OrderSet {
        &self.order_set
    }

    pub fn tree(&self) -> &FiniteTree {
        &self.tree
    }

    pub fn root(&self) -> PointId {
        PointId(0)
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> + '_ {
        self.tree.vertices()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.tree.contains(p)
    }

    pub fn label(&self, p: PointId) -> Result<Label, UniverseError> {
        Ok(self.tree.label(p)?)
    }

    pub fn ends(&self) -> impl Iterator<Item = (EndId, &EndData)> + '_ {
        self.ends.iter().map(|(&e, d)| (e, d))
    }

    pub fn end_anchor(&self, e: EndId) -> Result<PointId, UniverseError> {
        self.ends.get(&e).map(|d| d.anchor).ok_or(UniverseError::UnknownEnd(e))
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    fn fresh(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    fn slots_at(&self, v: PointId) -> usize {
        self.ends.values().filter(|d| d.anchor == v).count()
    }

    /// Degree counting reserved end components.
    pub fn effective_degree(&self, v: PointId) -> usize {
        self.tree.degree(v) + self.slots_at(v)
    }

    fn has_room(&self, v: PointId) -> Result<bool, UniverseError> {
        let l = self.tree.label(v)?;
        Ok(l.degree_cap().is_none_or(|c| self.effective_degree(v) < c))
    }

    /// A new point strictly between x and y, splitting the edge of the x–y
    /// arc that is nearest to x.
    pub fn add_between(&mut self, x: PointId, y: PointId, label: Label) -> Result<PointId, UniverseError> {
        if label != Label::Regular && !self.order_set.contains(label) {
            return Err(UniverseError::LabelNotInS(label));
        }
        if x == y {
            return Err(UniverseError::Degenerate(x, y));
        }
        let next = self.tree.step_toward(x, y)?;
        let v = PointId(self.fresh());
        self.tree.subdivide(x, next, v, label)?;
        Ok(v)
    }

    /// A new point adjacent to x in a fresh component of x.
    pub fn add_branch(&mut self, x: PointId) -> Result<PointId, UniverseError> {
        let l = self.order_set.default_label();
        self.add_branch_labeled(x, l)
    }

    pub fn add_branch_labeled(&mut self, x: PointId, label: Label) -> Result<PointId, UniverseError> {
        if label != Label::Regular && !self.order_set.contains(label) {
            return Err(UniverseError::LabelNotInS(label));
        }
        if !self.has_room(x)? {
            return Err(UniverseError::OrderExhausted(x));
        }
        let v = PointId(self.fresh());
        self.tree.add_leaf(x, v, label)?;
        Ok(v)
    }

    /// Registers an end lying beyond `anchor` in a fresh component.
    pub fn register_end(&mut self, anchor: PointId) -> Result<EndId, UniverseError> {
        if !self.has_room(anchor)? {
            return Err(UniverseError::OrderExhausted(anchor));
        }
        let e = EndId(self.fresh());
        self.ends.insert(e, EndData { anchor });
        Ok(e)
    }

    /// Materializes the next point on the way to `e` and returns it.
    pub fn refine_end(&mut self, e: EndId) -> Result<PointId, UniverseError> {
        let a = self.end_anchor(e)?;
        let v = PointId(self.fresh());
        let l = self.order_set.default_label();
        self.tree.add_leaf(a, v, l)?;
        self.ends.get_mut(&e).unwrap().anchor = v;
        Ok(v)
    }

    pub fn apply_op(&mut self, op: &GrowthOp) -> Result<Target, UniverseError> {
        match *op {
            GrowthOp::AddBetween { x, y, label } => self.add_between(x, y, label).map(Target::Point),
            GrowthOp::AddBranch { x } => self.add_branch(x).map(Target::Point),
            GrowthOp::RegisterEnd { anchor } => self.register_end(anchor).map(Target::End),
            GrowthOp::RefineEnd { end } => self.refine_end(end).map(Target::Point),
        }
    }

    /// Replays a script, returning the created entities in order.
    pub fn replay(&mut self, script: &[GrowthOp]) -> Result<Vec<Target>, UniverseError> {
        script.iter().map(|op| self.apply_op(op)).collect()
    }

    pub fn center(&self, x: PointId, y: PointId, z: PointId) -> Result<PointId, UniverseError> {
        Ok(self.tree.center(x, y, z)?)
    }

    /// Center map on points, panicking on unknown ids. For internal use on
    /// ids that are known to be materialized.
    pub fn c(&self, x: PointId, y: PointId, z: PointId) -> PointId {
        self.tree.center_unchecked(x, y, z)
    }

    /// z ∈ [x, y].
    pub fn between(&self, z: PointId, x: PointId, y: PointId) -> bool {
        self.tree.between_unchecked(z, x, y)
    }

    /// z ∈ ]x, y[.
    pub fn strictly_between(&self, z: PointId, x: PointId, y: PointId) -> bool {
        z != x && z != y && self.between(z, x, y)
    }

    pub fn path(&self, x: PointId, y: PointId) -> Result<Vec<PointId>, UniverseError> {
        Ok(self.tree.path(x, y)?)
    }

    pub fn c_closure(&self, ys: &BTreeSet<PointId>) -> Result<BTreeSet<PointId>, UniverseError> {
        Ok(self.tree.c_closure(ys)?)
    }

    pub fn cl(&self, ys: &BTreeSet<PointId>) -> BTreeSet<PointId> {
        self.tree.c_closure_unchecked(ys)
    }

    pub fn is_c_closed(&self, ys: &BTreeSet<PointId>) -> bool {
        self.cl(ys).len() == ys.len()
    }

    /// Proxy point for a target: an end is represented by its anchor, which
    /// is valid for every query whose other arguments are materialized points.
    pub fn proxy(&self, t: Target) -> Result<PointId, UniverseError> {
        match t {
            Target::Point(p) => {
                if self.contains(p) {
                    Ok(p)
                } else {
                    Err(TreeError::UnknownVertex(p).into())
                }
            }
            Target::End(e) => self.end_anchor(e),
        }
    }

    /// a ∧ b for the order with minimum toward ξ, i.e. c(a, b, ξ).
    pub fn meet(&self, a: PointId, b: PointId, xi: EndId) -> Result<PointId, UniverseError> {
        let anchor = self.end_anchor(xi)?;
        self.center(a, b, anchor)
    }

    /// The first point of hull(sub) met from x.
    pub fn first_point(&self, sub: &BTreeSet<PointId>, x: PointId) -> Result<PointId, UniverseError> {
        let mut it = sub.iter();
        let Some(&y0) = it.next() else { return Err(UniverseError::Empty) };
        if !self.c_closure(sub)?.is_subset(sub) {
            return Err(UniverseError::NotCClosed);
        }
        let mut p = y0;
        self.center(x, y0, y0)?;
        for &y in it {
            p = self.c(x, p, y);
        }
        Ok(p)
    }

    /// The first point of hull(sub) met from an end.
    pub fn first_point_of_end(&self, sub: &BTreeSet<PointId>, e: EndId) -> Result<PointId, UniverseError> {
        self.first_point(sub, self.end_anchor(e)?)
    }

    fn component_entities(&self, b: PointId, start: PointId) -> u64 {
        let mut min = start.0;
        let mut seen = BTreeSet::from([b, start]);
        let mut q = VecDeque::from([start]);
        let mut inside = BTreeSet::new();
        while let Some(v) = q.pop_front() {
            inside.insert(v);
            min = min.min(v.0);
            for w in self.tree.neighbors(v) {
                if seen.insert(w) {
                    q.push_back(w);
                }
            }
        }
        for (e, d) in &self.ends {
            if inside.contains(&d.anchor) {
                min = min.min(e.0);
            }
        }
        min
    }

    /// The component of the complement of b containing x.
    pub fn component_of(&self, b: PointId, x: Target) -> Result<ComponentRef, UniverseError> {
        self.tree.label(b)?;
        match x {
            Target::Point(p) => {
                if p == b {
                    return Err(UniverseError::SamePoint);
                }
                let w = self.tree.step_toward(b, p)?;
                Ok(ComponentRef { at: b, key: self.component_entities(b, w) })
            }
            Target::End(e) => {
                let a = self.end_anchor(e)?;
                if a == b {
                    Ok(ComponentRef { at: b, key: e.0 })
                } else {
                    let w = self.tree.step_toward(b, a)?;
                    Ok(ComponentRef { at: b, key: self.component_entities(b, w) })
                }
            }
        }
    }

    /// All currently materialized components at b (including reserved end
    /// slots), in materialization order.
    pub fn components_at(&self, b: PointId) -> Result<Vec<ComponentRef>, UniverseError> {
        self.tree.label(b)?;
        let mut out: Vec<ComponentRef> =
            self.tree.neighbors(b).map(|w| ComponentRef { at: b, key: self.component_entities(b, w) }).collect();
        for (e, d) in &self.ends {
            if d.anchor == b {
                out.push(ComponentRef { at: b, key: e.0 });
            }
        }
        out.sort();
        Ok(out)
    }

    /// True when x lies in the component `c`.
    pub fn in_component(&self, c: ComponentRef, x: Target) -> Result<bool, UniverseError> {
        match x {
            Target::Point(p) if p == c.at => Ok(false),
            _ => Ok(self.component_of(c.at, x)? == c),
        }
    }

    /// The labelled tree ⟨F⟩ spanned by `f`.
    pub fn labeled_tree_of(&self, f: &BTreeSet<PointId>) -> Result<FiniteTree, UniverseError> {
        let cl = self.c_closure(f)?;
        Ok(self.tree.contracted(&cl)?)
    }

    pub fn to_json(&self) -> UniverseJson {
        UniverseJson {
            order_set: self.order_set.clone(),
            tree: self.tree.to_json(),
            ends: self.ends.clone(),
            next_id: self.next_id,
        }
    }

    pub fn from_json(j: &UniverseJson) -> Result<Self, UniverseError> {
        let tree = FiniteTree::from_json(&j.tree)?;
        let max_id = tree.vertices().map(|p| p.0).chain(j.ends.keys().map(|e| e.0)).max().unwrap_or(0);
        if j.next_id <= max_id {
            return Err(TreeError::NotATree("id counter behind existing ids".into()).into());
        }
        for d in j.ends.values() {
            tree.label(d.anchor)?;
        }
        Ok(Universe { order_set: j.order_set.clone(), tree, ends: j.ends.clone(), next_id: j.next_id })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_between_is_between() {
        let mut u = Universe::new(OrderSet::infinite());
        let a = u.root();
        let b = u.add_branch(a).unwrap();
        let m = u.add_between(a, b, Label::Infinite).unwrap();
        assert_eq!(u.center(a, b, m).unwrap(), m);
        let m2 = u.add_between(a, b, Label::Infinite).unwrap();
        assert_eq!(u.path(a, b).unwrap(), vec![a, m2, m, b]);
    }

    #[test]
    fn label_not_in_s() {
        let mut u = Universe::new(OrderSet::new([3], false));
        let a = u.root();
        let b = u.add_branch(a).unwrap();
        assert_eq!(u.add_between(a, b, Label::Infinite), Err(UniverseError::LabelNotInS(Label::Infinite)));
    }

    #[test]
    fn order_exhausted() {
        let mut u = Universe::new(OrderSet::new([3], false));
        let a = u.root();
        for _ in 0..3 {
            u.add_branch(a).unwrap();
        }
        assert_eq!(u.add_branch(a), Err(UniverseError::OrderExhausted(a)));
    }

    #[test]
    fn branch_is_in_fresh_component() {
        let mut u = Universe::new(OrderSet::infinite());
        let x = u.root();
        let a = u.add_branch(x).unwrap();
        let b = u.add_branch(x).unwrap();
        let p = u.add_branch(x).unwrap();
        assert_eq!(u.center(p, a, b).unwrap(), x);
        let ca = u.component_of(x, Target::Point(a)).unwrap();
        let cp = u.component_of(x, Target::Point(p)).unwrap();
        assert_ne!(ca, cp);
        assert_eq!(u.component_of(x, Target::Point(x)), Err(UniverseError::SamePoint));
    }

    #[test]
    fn ends_and_meet() {
        let mut u = Universe::new(OrderSet::infinite());
        let v = u.root();
        let xi = u.register_end(v).unwrap();
        let a = u.add_branch(v).unwrap();
        let b = u.add_branch(v).unwrap();
        assert_eq!(u.meet(a, b, xi).unwrap(), v);
        let before = u.component_of(v, Target::End(xi)).unwrap();
        let w = u.refine_end(xi).unwrap();
        assert_eq!(u.component_of(v, Target::End(xi)).unwrap(), before);
        assert_eq!(u.component_of(v, Target::Point(w)).unwrap(), before);
        assert_eq!(u.meet(a, w, xi).unwrap(), w);
        assert_eq!(u.meet(a, a, xi).unwrap(), a);
    }

    #[test]
    fn first_point_on_edge() {
        let mut u = Universe::new(OrderSet::infinite());
        let a = u.root();
        let b = u.add_branch(a).unwrap();
        let x = u.add_branch(a).unwrap();
        let sub = BTreeSet::from([a, b]);
        assert_eq!(u.first_point(&sub, x).unwrap(), a);
        assert_eq!(u.first_point(&sub, b).unwrap(), b);
        let c = u.add_branch(a).unwrap();
        assert_eq!(u.first_point(&BTreeSet::from([x, b, c]), x), Err(UniverseError::NotCClosed));
    }

    #[test]
    fn json_round_trip() {
        let mut u = Universe::new(OrderSet::infinite());
        let a = u.root();
        let b = u.add_branch(a).unwrap();
        u.add_between(a, b, Label::Regular).unwrap();
        u.register_end(b).unwrap();
        let s = serde_json::to_string(&u.to_json()).unwrap();
        let back = Universe::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn labeled_tree_keeps_regular_member() {
        let mut u = Universe::new(OrderSet::infinite());
        let a = u.root();
        let b = u.add_branch(a).unwrap();
        let r = u.add_between(a, b, Label::Regular).unwrap();
        let t = u.labeled_tree_of(&BTreeSet::from([a, b, r])).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.label(r).unwrap(), Label::Regular);
        assert_eq!(t.degree(r), 2);
    }
}
