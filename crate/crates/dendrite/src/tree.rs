//! Finite labelled trees with the center (median) map and c-closure.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::{Label, PointId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("unknown vertex {0}")]
    UnknownVertex(PointId),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(PointId),
    #[error("{0} and {1} are not adjacent")]
    NotAdjacent(PointId, PointId),
    #[error("edge list does not describe a tree: {0}")]
    NotATree(String),
    #[error("vertex {0} exceeds the degree allowed by its label")]
    DegreeExceeded(PointId),
    #[error("vertex {0} has degree >= 3 but no branch label")]
    MissingBranchLabel(PointId),
    #[error("invalid label on {0}")]
    InvalidLabel(PointId),
}

struct VirtualTree {
    closure: BTreeSet<PointId>,
    edges: Vec<(PointId, PointId)>,
    witnesses: BTreeMap<PointId, [PointId; 3]>,
}

/// A finite tree with labelled vertices. A parent map rooted at the first
/// vertex is maintained incrementally; it only serves path queries and is not
/// part of the tree's identity.
#[derive(Clone, Debug, Default)]
pub struct FiniteTree {
    labels: BTreeMap<PointId, Label>,
    adj: BTreeMap<PointId, BTreeSet<PointId>>,
    parent: BTreeMap<PointId, PointId>,
    root: Option<PointId>,
}

impl PartialEq for FiniteTree {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.adj == other.adj
    }
}
impl Eq for FiniteTree {}

impl FiniteTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(v: PointId, l: Label) -> Self {
        let mut t = Self::new();
        t.labels.insert(v, l);
        t.adj.insert(v, BTreeSet::new());
        t.root = Some(v);
        t
    }

    /// Builds a tree from vertices and edges, checking connectivity and acyclicity.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = (PointId, Label)>,
        edges: impl IntoIterator<Item = (PointId, PointId)>,
    ) -> Result<Self, TreeError> {
        let mut labels = BTreeMap::new();
        for (v, l) in vertices {
            if !l.is_valid() {
                return Err(TreeError::InvalidLabel(v));
            }
            if labels.insert(v, l).is_some() {
                return Err(TreeError::DuplicateVertex(v));
            }
        }
        let mut adj: BTreeMap<PointId, BTreeSet<PointId>> =
            labels.keys().map(|&v| (v, BTreeSet::new())).collect();
        let mut m = 0usize;
        for (a, b) in edges {
            if a == b {
                return Err(TreeError::NotATree(format!("loop at {a}")));
            }
            for v in [a, b] {
                if !labels.contains_key(&v) {
                    return Err(TreeError::UnknownVertex(v));
                }
            }
            if !adj.get_mut(&a).unwrap().insert(b) {
                return Err(TreeError::NotATree(format!("repeated edge {a}-{b}")));
            }
            adj.get_mut(&b).unwrap().insert(a);
            m += 1;
        }
        let n = labels.len();
        if n > 0 && m != n - 1 {
            return Err(TreeError::NotATree(format!("{n} vertices but {m} edges")));
        }
        let mut t = FiniteTree { labels, adj, parent: BTreeMap::new(), root: None };
        t.reroot();
        if t.parent.len() + usize::from(n > 0) != n {
            return Err(TreeError::NotATree("disconnected".into()));
        }
        Ok(t)
    }

    fn reroot(&mut self) {
        self.parent.clear();
        self.root = self.labels.keys().next().copied();
        if let Some(r) = self.root {
            let mut q = VecDeque::from([r]);
            let mut seen = BTreeSet::from([r]);
            while let Some(v) = q.pop_front() {
                for &w in &self.adj[&v] {
                    if seen.insert(w) {
                        self.parent.insert(w, v);
                        q.push_back(w);
                    }
                }
            }
        }
    }

    /// Checks the label invariants: degree caps and branch labels on vertices
    /// of degree at least 3.
    pub fn check_invariants(&self) -> Result<(), TreeError> {
        for (&v, &l) in &self.labels {
            let d = self.degree(v);
            if let Some(cap) = l.degree_cap() {
                if d > cap {
                    return Err(TreeError::DegreeExceeded(v));
                }
            }
            if d >= 3 && !l.is_branch() {
                return Err(TreeError::MissingBranchLabel(v));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, v: PointId) -> bool {
        self.labels.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = PointId> + '_ {
        self.labels.keys().copied()
    }

    pub fn labels(&self) -> &BTreeMap<PointId, Label> {
        &self.labels
    }

    pub fn label(&self, v: PointId) -> Result<Label, TreeError> {
        self.labels.get(&v).copied().ok_or(TreeError::UnknownVertex(v))
    }

    pub fn set_label(&mut self, v: PointId, l: Label) -> Result<(), TreeError> {
        match self.labels.get_mut(&v) {
            Some(x) => {
                *x = l;
                Ok(())
            }
            None => Err(TreeError::UnknownVertex(v)),
        }
    }

    pub fn neighbors(&self, v: PointId) -> impl Iterator<Item = PointId> + '_ {
        self.adj.get(&v).into_iter().flatten().copied()
    }

    pub fn degree(&self, v: PointId) -> usize {
        self.adj.get(&v).map_or(0, |s| s.len())
    }

    pub fn edges(&self) -> Vec<(PointId, PointId)> {
        let mut out = Vec::new();
        for (&a, ns) in &self.adj {
            for &b in ns {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn adjacent(&self, a: PointId, b: PointId) -> bool {
        self.adj.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn root(&self) -> Option<PointId> {
        self.root
    }

    pub fn parent(&self, v: PointId) -> Option<PointId> {
        self.parent.get(&v).copied()
    }

    /// Adds `v` as a new leaf hanging at `at`.
    pub fn add_leaf(&mut self, at: PointId, v: PointId, l: Label) -> Result<(), TreeError> {
        if !self.contains(at) {
            return Err(TreeError::UnknownVertex(at));
        }
        if self.contains(v) {
            return Err(TreeError::DuplicateVertex(v));
        }
        self.labels.insert(v, l);
        self.adj.insert(v, BTreeSet::from([at]));
        self.adj.get_mut(&at).unwrap().insert(v);
        self.parent.insert(v, at);
        Ok(())
    }

    /// Inserts `v` in the middle of the edge `a`–`b`.
    pub fn subdivide(&mut self, a: PointId, b: PointId, v: PointId, l: Label) -> Result<(), TreeError> {
        if !self.adjacent(a, b) {
            return Err(TreeError::NotAdjacent(a, b));
        }
        if self.contains(v) {
            return Err(TreeError::DuplicateVertex(v));
        }
        self.adj.get_mut(&a).unwrap().remove(&b);
        self.adj.get_mut(&b).unwrap().remove(&a);
        self.adj.get_mut(&a).unwrap().insert(v);
        self.adj.get_mut(&b).unwrap().insert(v);
        self.adj.insert(v, BTreeSet::from([a, b]));
        self.labels.insert(v, l);
        if self.parent.get(&b) == Some(&a) {
            self.parent.insert(v, a);
            self.parent.insert(b, v);
        } else {
            self.parent.insert(v, b);
            self.parent.insert(a, v);
        }
        Ok(())
    }

    fn need(&self, v: PointId) -> Result<(), TreeError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(TreeError::UnknownVertex(v))
        }
    }

    fn depth(&self, mut v: PointId) -> usize {
        let mut d = 0;
        while let Some(&p) = self.parent.get(&v) {
            v = p;
            d += 1;
        }
        d
    }

    fn lca_with_depth(&self, a: PointId, b: PointId) -> (PointId, usize) {
        let (mut a, mut b) = (a, b);
        let (mut da, mut db) = (self.depth(a), self.depth(b));
        while da > db {
            a = self.parent[&a];
            da -= 1;
        }
        while db > da {
            b = self.parent[&b];
            db -= 1;
        }
        while a != b {
            a = self.parent[&a];
            b = self.parent[&b];
            da -= 1;
        }
        (a, da)
    }

    /// The median c(x,y,z): the unique vertex on all three pairwise paths.
    pub fn center(&self, x: PointId, y: PointId, z: PointId) -> Result<PointId, TreeError> {
        self.need(x)?;
        self.need(y)?;
        self.need(z)?;
        Ok(self.center_unchecked(x, y, z))
    }

    pub(crate) fn center_unchecked(&self, x: PointId, y: PointId, z: PointId) -> PointId {
        if x == y || x == z {
            return x;
        }
        if y == z {
            return y;
        }
        let (l1, d1) = self.lca_with_depth(x, y);
        let (l2, d2) = self.lca_with_depth(y, z);
        let (l3, d3) = self.lca_with_depth(x, z);
        if d1 >= d2 && d1 >= d3 {
            l1
        } else if d2 >= d3 {
            l2
        } else {
            l3
        }
    }

    /// z ∈ [x, y].
    pub fn between(&self, z: PointId, x: PointId, y: PointId) -> Result<bool, TreeError> {
        Ok(self.center(x, y, z)? == z)
    }

    pub(crate) fn between_unchecked(&self, z: PointId, x: PointId, y: PointId) -> bool {
        self.center_unchecked(x, y, z) == z
    }

    /// The vertices of the path from x to y, in order.
    pub fn path(&self, x: PointId, y: PointId) -> Result<Vec<PointId>, TreeError> {
        self.need(x)?;
        self.need(y)?;
        let (l, _) = self.lca_with_depth(x, y);
        let mut left = vec![x];
        let mut v = x;
        while v != l {
            v = self.parent[&v];
            left.push(v);
        }
        let mut right = Vec::new();
        let mut v = y;
        while v != l {
            right.push(v);
            v = self.parent[&v];
        }
        right.reverse();
        left.extend(right);
        Ok(left)
    }

    /// The neighbour of `b` on the path from `b` to `x` (x ≠ b).
    pub fn step_toward(&self, b: PointId, x: PointId) -> Result<PointId, TreeError> {
        self.need(b)?;
        self.need(x)?;
        if b == x {
            return Err(TreeError::NotATree(format!("no step from {b} to itself")));
        }
        // Walk up from x: if b is an ancestor, the child of b on the way is the answer.
        let mut v = x;
        while let Some(&p) = self.parent.get(&v) {
            if p == b {
                return Ok(v);
            }
            v = p;
        }
        Ok(self.parent[&b])
    }

    /// The smallest set containing `ys` and closed under the center map.
    pub fn c_closure(&self, ys: &BTreeSet<PointId>) -> Result<BTreeSet<PointId>, TreeError> {
        for &y in ys {
            self.need(y)?;
        }
        Ok(self.c_closure_unchecked(ys))
    }

    pub(crate) fn c_closure_unchecked(&self, ys: &BTreeSet<PointId>) -> BTreeSet<PointId> {
        self.closure_tree(ys).0
    }

    /// Closure by brute force over pairs; kept as a reference for tests.
    pub fn c_closure_pairs(&self, ys: &BTreeSet<PointId>) -> BTreeSet<PointId> {
        let mut out = ys.clone();
        let Some(&y0) = ys.iter().next() else { return out };
        let v: Vec<PointId> = ys.iter().copied().collect();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                out.insert(self.center_unchecked(v[i], v[j], y0));
            }
        }
        out
    }

    /// Compares a and b in the preorder of a depth-first walk from the root
    /// that visits children by increasing id.
    fn preorder_cmp(&self, a: PointId, b: PointId) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        if a == b {
            return Ordering::Equal;
        }
        let (mut x, mut y) = (a, b);
        let (mut dx, mut dy) = (self.depth(x), self.depth(y));
        let mut px = None;
        while dx > dy {
            px = Some(x);
            x = self.parent[&x];
            dx -= 1;
        }
        while dy > dx {
            y = self.parent[&y];
            dy -= 1;
        }
        if x == y {
            // one is an ancestor of the other
            return if px.is_none() { Ordering::Less } else { Ordering::Greater };
        }
        while self.parent[&x] != self.parent[&y] {
            x = self.parent[&x];
            y = self.parent[&y];
        }
        x.cmp(&y)
    }

    fn is_ancestor(&self, a: PointId, b: PointId) -> bool {
        self.lca_with_depth(a, b).0 == a
    }

    /// The c-closure of `ys` together with the edges of the tree it spans
    /// (pairs of closure points with no closure point between them).
    pub(crate) fn closure_tree(&self, ys: &BTreeSet<PointId>) -> (BTreeSet<PointId>, Vec<(PointId, PointId)>) {
        let v = self.virtual_tree(ys);
        (v.closure, v.edges)
    }

    /// For every point of the closure of `ys` that is not in `ys`, three
    /// points of `ys` whose median it is.
    pub(crate) fn median_witnesses(&self, ys: &BTreeSet<PointId>) -> BTreeMap<PointId, [PointId; 3]> {
        self.virtual_tree(ys).witnesses
    }

    fn virtual_tree(&self, ys: &BTreeSet<PointId>) -> VirtualTree {
        if ys.len() <= 1 {
            return VirtualTree { closure: ys.clone(), edges: vec![], witnesses: BTreeMap::new() };
        }
        let mut sorted: Vec<PointId> = ys.iter().copied().collect();
        sorted.sort_by(|&a, &b| self.preorder_cmp(a, b));
        let mut all: BTreeSet<PointId> = ys.clone();
        for w in sorted.windows(2) {
            all.insert(self.lca_with_depth(w[0], w[1]).0);
        }
        let mut vs: Vec<PointId> = all.into_iter().collect();
        vs.sort_by(|&a, &b| self.preorder_cmp(a, b));
        let mut par: BTreeMap<PointId, PointId> = BTreeMap::new();
        let mut kids: BTreeMap<PointId, Vec<PointId>> = BTreeMap::new();
        let mut stack: Vec<PointId> = Vec::new();
        for &v in &vs {
            while let Some(&top) = stack.last() {
                if self.is_ancestor(top, v) {
                    break;
                }
                stack.pop();
            }
            if let Some(&top) = stack.last() {
                par.insert(v, top);
                kids.entry(top).or_default().push(v);
            }
            stack.push(v);
        }
        let deg = |v: &PointId| kids.get(v).map_or(0, |k| k.len()) + usize::from(par.contains_key(v));
        let closure: BTreeSet<PointId> = vs.iter().copied().filter(|v| ys.contains(v) || deg(v) >= 3).collect();
        // a point of ys below each virtual vertex
        let mut rep: BTreeMap<PointId, PointId> = BTreeMap::new();
        for &v in vs.iter().rev() {
            let r = if ys.contains(&v) { v } else { rep[&kids[&v][0]] };
            rep.insert(v, r);
        }
        let (first, last) = (sorted[0], sorted[sorted.len() - 1]);
        let mut witnesses = BTreeMap::new();
        let mut edges = Vec::new();
        let mut orphans = Vec::new();
        for &v in &vs {
            if !closure.contains(&v) {
                continue;
            }
            if !ys.contains(&v) {
                let k = &kids[&v];
                let third = if k.len() >= 3 {
                    rep[&k[2]]
                } else if !self.is_ancestor(v, first) {
                    first
                } else {
                    last
                };
                witnesses.insert(v, [rep[&k[0]], rep[&k[1]], third]);
            }
            let mut p = par.get(&v).copied();
            while let Some(q) = p {
                if closure.contains(&q) {
                    break;
                }
                p = par.get(&q).copied();
            }
            if let Some(q) = p {
                edges.push((v, q));
            } else {
                orphans.push(v);
            }
        }
        // a dropped top vertex joins the two subtrees below it
        if let [a, b] = orphans[..] {
            edges.push((a, b));
        }
        VirtualTree { closure, edges, witnesses }
    }


    pub fn is_c_closed(&self, ys: &BTreeSet<PointId>) -> Result<bool, TreeError> {
        Ok(self.c_closure(ys)?.len() == ys.len())
    }

    /// All vertices of the convex hull [ys].
    pub fn hull(&self, ys: &BTreeSet<PointId>) -> Result<BTreeSet<PointId>, TreeError> {
        let mut out = BTreeSet::new();
        let Some(&y0) = ys.iter().next() else { return Ok(out) };
        for &y in ys {
            out.extend(self.path(y0, y)?);
        }
        Ok(out)
    }

    /// The subtree induced on a convex vertex set.
    pub fn induced(&self, vs: &BTreeSet<PointId>) -> Result<FiniteTree, TreeError> {
        let verts = vs.iter().map(|&v| self.label(v).map(|l| (v, l))).collect::<Result<Vec<_>, _>>()?;
        let edges = self.edges().into_iter().filter(|(a, b)| vs.contains(a) && vs.contains(b));
        FiniteTree::from_parts(verts, edges)
    }

    /// The tree on a c-closed set `ys` whose edges join points with no other
    /// point of `ys` between them.
    pub fn contracted(&self, ys: &BTreeSet<PointId>) -> Result<FiniteTree, TreeError> {
        for &y in ys {
            self.need(y)?;
        }
        let (cl, edges) = self.closure_tree(ys);
        if cl.len() != ys.len() {
            return Err(TreeError::NotATree("vertex set is not c-closed".into()));
        }
        let verts = ys.iter().map(|&x| self.label(x).map(|l| (x, l))).collect::<Result<Vec<_>, _>>()?;
        FiniteTree::from_parts(verts, edges)
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson {
            vertices: self.labels.iter().map(|(&id, &label)| VertexJson { id, label }).collect(),
            edges: self.edges().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }

    pub fn from_json(j: &TreeJson) -> Result<Self, TreeError> {
        FiniteTree::from_parts(
            j.vertices.iter().map(|v| (v.id, v.label)),
            j.edges.iter().map(|e| (e[0], e[1])),
        )
    }

    /// Graphviz rendering with labels.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph {name} {{");
        for (v, l) in &self.labels {
            let _ = writeln!(s, "  {} [label=\"{}:{}\"];", v.0, v.0, l);
        }
        for (a, b) in self.edges() {
            let _ = writeln!(s, "  {} -- {};", a.0, b.0);
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: PointId,
    pub label: Label,
}

/// JSON form `{"vertices":[{"id":..,"label":..}],"edges":[[a,b],..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[PointId; 2]>,
}
