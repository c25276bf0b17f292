//! Path-based betweenness, closure and partial-isomorphism checks, computed
//! from the tree's adjacency alone.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use dendrite::{FiniteTree, PointId};

pub fn path(t: &FiniteTree, x: PointId, y: PointId) -> Vec<PointId> {
    let mut prev: BTreeMap<PointId, PointId> = BTreeMap::new();
    let mut q = VecDeque::from([x]);
    prev.insert(x, x);
    while let Some(v) = q.pop_front() {
        if v == y {
            break;
        }
        for w in t.neighbors(v) {
            if !prev.contains_key(&w) {
                prev.insert(w, v);
                q.push_back(w);
            }
        }
    }
    let mut out = vec![y];
    let mut v = y;
    while v != x {
        v = prev[&v];
        out.push(v);
    }
    out
}

pub fn between(t: &FiniteTree, z: PointId, x: PointId, y: PointId) -> bool {
    path(t, x, y).contains(&z)
}

/// The point common to the three paths.
pub fn median(t: &FiniteTree, x: PointId, y: PointId, z: PointId) -> PointId {
    let a: BTreeSet<PointId> = path(t, x, y).into_iter().collect();
    let b: BTreeSet<PointId> = path(t, y, z).into_iter().collect();
    let c: BTreeSet<PointId> = path(t, x, z).into_iter().collect();
    let common: Vec<PointId> = a.iter().filter(|p| b.contains(p) && c.contains(p)).copied().collect();
    assert_eq!(common.len(), 1);
    common[0]
}

pub fn closure(t: &FiniteTree, ys: &BTreeSet<PointId>) -> BTreeSet<PointId> {
    let mut cur = ys.clone();
    loop {
        let v: Vec<PointId> = cur.iter().copied().collect();
        let mut next = cur.clone();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                for k in j + 1..v.len() {
                    next.insert(median(t, v[i], v[j], v[k]));
                }
            }
        }
        if next.len() == cur.len() {
            return cur;
        }
        cur = next;
    }
}

/// φ is injective, label preserving, has c-closed domain and image, and
/// preserves betweenness on every triple of its domain.
pub fn is_partial_iso(t: &FiniteTree, phi: &BTreeMap<PointId, PointId>) -> bool {
    let dom: BTreeSet<PointId> = phi.keys().copied().collect();
    let img: BTreeSet<PointId> = phi.values().copied().collect();
    if img.len() != dom.len() || closure(t, &dom) != dom || closure(t, &img) != img {
        return false;
    }
    if phi.iter().any(|(a, b)| t.label(*a).unwrap() != t.label(*b).unwrap()) {
        return false;
    }
    let v: Vec<PointId> = dom.into_iter().collect();
    let paths = |pts: &[PointId]| -> Vec<Vec<BTreeSet<PointId>>> {
        pts.iter().map(|&x| pts.iter().map(|&y| path(t, x, y).into_iter().collect()).collect()).collect()
    };
    let w: Vec<PointId> = v.iter().map(|x| phi[x]).collect();
    let (pv, pw) = (paths(&v), paths(&w));
    for i in 0..v.len() {
        for j in 0..v.len() {
            for k in 0..v.len() {
                if pv[i][j].contains(&v[k]) != pw[i][j].contains(&w[k]) {
                    return false;
                }
            }
        }
    }
    true
}
