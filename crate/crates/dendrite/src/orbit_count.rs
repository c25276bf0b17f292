//! Counting orbit types of ordered k-tuples of branch points.
//!
//! Two k-tuples lie in the same orbit exactly when the labelled trees they
//! span are isomorphic by a map respecting the enumeration, so the count is
//! the number of such marked trees up to isomorphism. They are generated by
//! inserting the tuple entries one at a time: a new point either is an
//! existing median, hangs off a vertex, subdivides an edge, or hangs off a new
//! median inside an edge.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::canon::canonical_marked;
use crate::label::{Label, OrderSet, PointId};
use crate::tree::FiniteTree;

pub const DEFAULT_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitCountError {
    #[error("k = {k} exceeds the enumeration limit {limit}")]
    LimitExceeded { k: usize, limit: usize },
}

#[derive(Clone)]
struct Shape {
    tree: FiniteTree,
    marks: BTreeMap<PointId, u32>,
}

impl Shape {
    fn fits(&self, v: PointId) -> bool {
        let l = self.tree.label(v).unwrap();
        l.degree_cap().is_none_or(|c| self.tree.degree(v) <= c)
    }
}

/// Number of orbits of the group on ordered k-tuples of distinct branch points
/// with orders in `s`, using the default limit.
pub fn count_orbit_types(k: usize, s: &OrderSet) -> Result<usize, OrbitCountError> {
    count_orbit_types_with_limit(k, s, DEFAULT_LIMIT)
}

pub fn count_orbit_types_with_limit(k: usize, s: &OrderSet, limit: usize) -> Result<usize, OrbitCountError> {
    if k > limit {
        return Err(OrbitCountError::LimitExceeded { k, limit });
    }
    Ok(orbit_shapes(k, s).len())
}

fn orbit_shapes(k: usize, s: &OrderSet) -> Vec<Shape> {
    let labels = s.labels();
    if k == 0 {
        return vec![Shape { tree: FiniteTree::new(), marks: BTreeMap::new() }];
    }
    let mut level: Vec<Shape> = labels
        .iter()
        .map(|&l| Shape { tree: FiniteTree::single(PointId(0), l), marks: BTreeMap::from([(PointId(0), 0)]) })
        .collect();
    for i in 1..k {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for sh in &level {
            for cand in extensions(sh, i as u32, &labels) {
                if seen.insert(canonical_marked(&cand.tree, &cand.marks).code) {
                    next.push(cand);
                }
            }
        }
        level = next;
    }
    level
}

fn extensions(sh: &Shape, pos: u32, labels: &[Label]) -> Vec<Shape> {
    let n = sh.tree.len() as u64;
    let x = PointId(n);
    let m = PointId(n + 1);
    let mut out = Vec::new();
    let mut push = |s: Shape, touched: &[PointId]| {
        if touched.iter().all(|&v| s.fits(v)) {
            out.push(s);
        }
    };
    // the new point may be an existing median
    for v in sh.tree.vertices().filter(|v| !sh.marks.contains_key(v)) {
        let mut s = sh.clone();
        s.marks.insert(v, pos);
        push(s, &[]);
    }
    for &lx in labels {
        for v in sh.tree.vertices() {
            let mut s = sh.clone();
            s.tree.add_leaf(v, x, lx).unwrap();
            s.marks.insert(x, pos);
            push(s, &[v, x]);
        }
        for (a, b) in sh.tree.edges() {
            let mut s = sh.clone();
            s.tree.subdivide(a, b, x, lx).unwrap();
            s.marks.insert(x, pos);
            push(s, &[x]);
            for &lm in labels {
                let mut s = sh.clone();
                s.tree.subdivide(a, b, m, lm).unwrap();
                s.tree.add_leaf(m, x, lx).unwrap();
                s.marks.insert(x, pos);
                push(s, &[m, x]);
            }
        }
    }
    out
}
