//! Canonical forms for labelled trees (AHU encoding rooted at a centroid)
//! and the isomorphism test built on them.

use std::collections::BTreeMap;

use crate::label::PointId;
use crate::tree::FiniteTree;

/// A canonical code together with the vertices listed in canonical order.
/// Two trees with equal codes are isomorphic and the i-th vertices correspond.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub code: String,
    pub order: Vec<PointId>,
}

fn centroids(t: &FiniteTree) -> Vec<PointId> {
    let n = t.len();
    let Some(r) = t.root() else { return vec![] };
    // iterative post-order for subtree sizes
    let mut order = vec![r];
    let mut par: BTreeMap<PointId, PointId> = BTreeMap::new();
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for w in t.neighbors(v) {
            if par.get(&v) != Some(&w) {
                par.insert(w, v);
                order.push(w);
            }
        }
        i += 1;
    }
    let mut size: BTreeMap<PointId, usize> = BTreeMap::new();
    for &v in order.iter().rev() {
        let s = 1 + t.neighbors(v).filter(|w| par.get(w) == Some(&v)).map(|w| size[&w]).sum::<usize>();
        size.insert(v, s);
    }
    let mut best = usize::MAX;
    let mut out = Vec::new();
    for &v in &order {
        let mut worst = n - size[&v];
        for w in t.neighbors(v) {
            if par.get(&w) == Some(&v) {
                worst = worst.max(size[&w]);
            }
        }
        if worst < best {
            best = worst;
            out.clear();
        }
        if worst == best {
            out.push(v);
        }
    }
    out
}

fn encode(
    t: &FiniteTree,
    v: PointId,
    from: Option<PointId>,
    marks: &BTreeMap<PointId, u32>,
) -> (String, Vec<PointId>) {
    let mut kids: Vec<(String, Vec<PointId>)> =
        t.neighbors(v).filter(|&w| Some(w) != from).map(|w| encode(t, w, Some(v), marks)).collect();
    kids.sort();
    let mut code = format!("({}", t.labels()[&v]);
    if let Some(m) = marks.get(&v) {
        code.push_str(&format!("#{m}"));
    }
    let mut order = vec![v];
    for (c, o) in kids {
        code.push_str(&c);
        order.extend(o);
    }
    code.push(')');
    (code, order)
}

/// Canonical form of `t` where `marks` distinguishes some vertices (used for
/// ordered tuples).
pub fn canonical_marked(t: &FiniteTree, marks: &BTreeMap<PointId, u32>) -> Canonical {
    let cs = centroids(t);
    let mut best: Option<(String, Vec<PointId>)> = None;
    for c in cs {
        let e = encode(t, c, None, marks);
        if best.as_ref().is_none_or(|b| e.0 < b.0) {
            best = Some(e);
        }
    }
    let (code, order) = best.unwrap_or_default();
    Canonical { code, order }
}

pub fn canonical(t: &FiniteTree) -> Canonical {
    canonical_marked(t, &BTreeMap::new())
}

/// A label- and adjacency-preserving bijection from `t1` onto `t2`, if any.
pub fn iso_labeled(t1: &FiniteTree, t2: &FiniteTree) -> Option<BTreeMap<PointId, PointId>> {
    if t1.len() != t2.len() {
        return None;
    }
    let c1 = canonical(t1);
    let c2 = canonical(t2);
    if c1.code != c2.code {
        return None;
    }
    Some(c1.order.into_iter().zip(c2.order).collect())
}
