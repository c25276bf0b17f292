//! Partial isomorphisms between finite c-closed point sets of a universe and
//! their extension to new points.
//!
//! A map given on a few points is first closed: every median of domain
//! points is sent to the median of the images. The closed map is an
//! isomorphism exactly when it is injective, keeps labels, and sends the
//! edges of the tree spanned by the domain to the edges of the tree spanned
//! by the image.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::PointId;
use crate::tree::FiniteTree;
use crate::universe::{Universe, UniverseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("{0} would be sent to both {1} and {2}")]
    Conflict(PointId, PointId, PointId),
    #[error("{0} and {1} have the same image")]
    NotInjective(PointId, PointId),
    #[error("betweenness is not preserved on {0:?}")]
    Betweenness(Vec<PointId>),
    #[error("label of {0} is not preserved")]
    Label(PointId),
    #[error(transparent)]
    Universe(#[from] UniverseError),
}

/// A finite partial isomorphism whose domain and image are c-closed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialIso {
    fwd: BTreeMap<PointId, PointId>,
    bwd: BTreeMap<PointId, PointId>,
    #[serde(default)]
    seed: u64,
}

/// Closes `map` under medians computed in `t` and checks that the result is
/// an isomorphism of the spanned labelled trees.
pub fn close_map(t: &FiniteTree, map: &BTreeMap<PointId, PointId>) -> Result<BTreeMap<PointId, PointId>, IsoError> {
    for (&x, &y) in map {
        for v in [x, y] {
            t.label(v).map_err(UniverseError::from)?;
        }
    }
    let dom: BTreeSet<PointId> = map.keys().copied().collect();
    let mut out = map.clone();
    for (m, [a, b, c]) in t.median_witnesses(&dom) {
        out.insert(m, t.center_unchecked(map[&a], map[&b], map[&c]));
    }
    verify_closed(t, &out)?;
    Ok(out)
}

fn verify_closed(t: &FiniteTree, f: &BTreeMap<PointId, PointId>) -> Result<(), IsoError> {
    let mut inv: BTreeMap<PointId, PointId> = BTreeMap::new();
    for (&x, &y) in f {
        if let Some(&x2) = inv.get(&y) {
            return Err(IsoError::NotInjective(x2, x));
        }
        inv.insert(y, x);
        if t.label(x).ok() != t.label(y).ok() {
            return Err(IsoError::Label(x));
        }
    }
    let dom: BTreeSet<PointId> = f.keys().copied().collect();
    let img: BTreeSet<PointId> = f.values().copied().collect();
    let (dcl, dedges) = t.closure_tree(&dom);
    let (icl, iedges) = t.closure_tree(&img);
    if dcl.len() != dom.len() || icl.len() != img.len() {
        let extra: Vec<PointId> = icl.difference(&img).copied().collect();
        return Err(IsoError::Betweenness(extra));
    }
    let norm = |(a, b): (PointId, PointId)| (a.min(b), a.max(b));
    let want: BTreeSet<(PointId, PointId)> = iedges.into_iter().map(norm).collect();
    for (a, b) in dedges {
        if !want.contains(&norm((f[&a], f[&b]))) {
            return Err(IsoError::Betweenness(vec![a, b]));
        }
    }
    Ok(())
}

fn mix(seed: u64, x: u64) -> u64 {
    let mut z = seed ^ x.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl PartialIso {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity_on(points: impl IntoIterator<Item = PointId>) -> Self {
        let fwd: BTreeMap<PointId, PointId> = points.into_iter().map(|p| (p, p)).collect();
        PartialIso { bwd: fwd.clone(), fwd, seed: 0 }
    }

    /// Closes and checks the given pairs.
    pub fn from_pairs(u: &Universe, pairs: impl IntoIterator<Item = (PointId, PointId)>) -> Result<Self, IsoError> {
        PartialIso::new().extend_with(u, pairs)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn get(&self, x: PointId) -> Option<PointId> {
        self.fwd.get(&x).copied()
    }

    pub fn get_inv(&self, y: PointId) -> Option<PointId> {
        self.bwd.get(&y).copied()
    }

    pub fn domain(&self) -> BTreeSet<PointId> {
        self.fwd.keys().copied().collect()
    }

    pub fn image(&self) -> BTreeSet<PointId> {
        self.bwd.keys().copied().collect()
    }

    pub fn pairs(&self) -> &BTreeMap<PointId, PointId> {
        &self.fwd
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    pub fn inverse(&self) -> PartialIso {
        PartialIso { fwd: self.bwd.clone(), bwd: self.fwd.clone(), seed: self.seed }
    }

    /// The partial isomorphism generated by `self` and `pairs`, or the reason
    /// no such isomorphism exists. `self` is left untouched.
    pub fn extend_with(
        &self,
        u: &Universe,
        pairs: impl IntoIterator<Item = (PointId, PointId)>,
    ) -> Result<PartialIso, IsoError> {
        let mut map = self.fwd.clone();
        for (x, y) in pairs {
            match map.insert(x, y) {
                Some(old) if old != y => return Err(IsoError::Conflict(x, old, y)),
                _ => {}
            }
        }
        let fwd = close_map(u.tree(), &map)?;
        let bwd = fwd.iter().map(|(&a, &b)| (b, a)).collect();
        Ok(PartialIso { fwd, bwd, seed: self.seed })
    }

    /// Adds x ↦ y in place, together with the median it forces, in time
    /// linear in the size of the map. Leaves `self` unchanged on failure.
    pub fn add_pair(&mut self, u: &Universe, x: PointId, y: PointId) -> Result<(), IsoError> {
        if let Some(fx) = self.get(x) {
            return if fx == y { Ok(()) } else { Err(IsoError::Conflict(x, fx, y)) };
        }
        if let Some(x2) = self.get_inv(y) {
            return Err(IsoError::NotInjective(x2, x));
        }
        if u.label(x)? != u.label(y)? {
            return Err(IsoError::Label(x));
        }
        if self.fwd.is_empty() {
            self.fwd.insert(x, y);
            self.bwd.insert(y, x);
            return Ok(());
        }
        let t = u.tree();
        let p = project(t, &self.fwd, x);
        let q = project(t, &self.bwd, y);
        let mut new = vec![(x, y)];
        match self.fwd.get(&p) {
            Some(&fp) => {
                if fp != q {
                    return Err(IsoError::Betweenness(vec![x, p]));
                }
            }
            None => {
                // p splits a hull edge a–b; q must split f(a)–f(b) the same way
                let (a, b) = hull_edge(t, &self.fwd, p).ok_or_else(|| IsoError::Betweenness(vec![x, p]))?;
                let (fa, fb) = (self.fwd[&a], self.fwd[&b]);
                let q_inside = q != fa && q != fb && t.between_unchecked(q, fa, fb);
                if !q_inside || self.bwd.contains_key(&q) || (p == x) != (q == y) {
                    return Err(IsoError::Betweenness(vec![x, a, b]));
                }
                if u.label(p)? != u.label(q)? {
                    return Err(IsoError::Label(p));
                }
                if p != x {
                    new.push((p, q));
                }
            }
        }
        for (a, b) in new {
            self.fwd.insert(a, b);
            self.bwd.insert(b, a);
        }
        Ok(())
    }

    /// The image of x, extending the map if x is new. The new image is placed
    /// generically: in a fresh component when x hangs off the domain hull,
    /// and next to an endpoint when x lies inside a hull edge.
    pub fn forward(&mut self, u: &mut Universe, x: PointId) -> Result<PointId, IsoError> {
        if let Some(y) = self.get(x) {
            return Ok(y);
        }
        u.label(x)?;
        let y = extend_one(&mut self.fwd, &mut self.bwd, u, x, self.seed)?;
        Ok(y)
    }

    /// The preimage of y, extending the map if y is new.
    pub fn backward(&mut self, u: &mut Universe, y: PointId) -> Result<PointId, IsoError> {
        if let Some(x) = self.get_inv(y) {
            return Ok(x);
        }
        u.label(y)?;
        let x = extend_one(&mut self.bwd, &mut self.fwd, u, y, self.seed)?;
        Ok(x)
    }
}

fn project(t: &FiniteTree, dom: &BTreeMap<PointId, PointId>, x: PointId) -> PointId {
    let mut it = dom.keys();
    let mut p = *it.next().unwrap();
    for &y in it {
        p = t.center_unchecked(x, p, y);
    }
    p
}

/// The two points of the domain adjacent to p when p lies inside an edge
/// of the tree the domain spans.
fn hull_edge(t: &FiniteTree, dom: &BTreeMap<PointId, PointId>, p: PointId) -> Option<(PointId, PointId)> {
    let mut near: BTreeMap<PointId, PointId> = BTreeMap::new();
    for &d in dom.keys() {
        let dir = t.step_toward(p, d).ok()?;
        near.entry(dir).and_modify(|a| *a = t.center_unchecked(p, *a, d)).or_insert(d);
    }
    match near.values().collect::<Vec<_>>()[..] {
        [&a, &b] => Some((a, b)),
        _ => None,
    }
}

/// Extends `f` (with inverse `g`) to x. Domain and image stay c-closed.
fn extend_one(
    f: &mut BTreeMap<PointId, PointId>,
    g: &mut BTreeMap<PointId, PointId>,
    u: &mut Universe,
    x: PointId,
    seed: u64,
) -> Result<PointId, IsoError> {
    if f.is_empty() {
        f.insert(x, x);
        g.insert(x, x);
        return Ok(x);
    }
    let p = project(u.tree(), f, x);
    let fp = match f.get(&p) {
        Some(&fp) => fp,
        None => {
            // p lies inside an edge a–a' of the tree spanned by the domain
            let mut with_p: BTreeSet<PointId> = f.keys().copied().collect();
            with_p.insert(p);
            let (_, edges) = u.tree().closure_tree(&with_p);
            let nb: Vec<PointId> =
                edges.iter().filter_map(|&(a, b)| if a == p { Some(b) } else if b == p { Some(a) } else { None }).collect();
            debug_assert_eq!(nb.len(), 2);
            let (mut a, mut b) = (f[&nb[0]], f[&nb[1]]);
            if mix(seed, p.0) & 1 == 1 {
                std::mem::swap(&mut a, &mut b);
            }
            let fp = u.add_between(a, b, u.label(p)?)?;
            f.insert(p, fp);
            g.insert(fp, p);
            fp
        }
    };
    if p == x {
        return Ok(fp);
    }
    let lx = u.label(x)?;
    let fx = match u.add_branch_labeled(fp, lx) {
        Ok(v) => v,
        Err(UniverseError::OrderExhausted(_)) => {
            // no fresh component: use a materialized one free of image points
            let img: BTreeSet<PointId> = g.keys().copied().collect();
            let nbrs: Vec<PointId> = u.tree().neighbors(fp).collect();
            let free = nbrs
                .into_iter()
                .find(|&w| {
                    let path_free = |z: &PointId| *z == fp || u.tree().step_toward(fp, *z).ok() != Some(w);
                    img.iter().all(path_free)
                })
                .ok_or(UniverseError::OrderExhausted(fp))?;
            u.add_between(fp, free, lx)?
        }
        Err(e) => return Err(e.into()),
    };
    f.insert(x, fx);
    g.insert(fx, x);
    Ok(fx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::{Label, OrderSet};

    fn path_universe(n: usize) -> (Universe, Vec<PointId>) {
        let mut u = Universe::new(OrderSet::infinite());
        let mut v = vec![u.root()];
        for _ in 1..n {
            let last = *v.last().unwrap();
            v.push(u.add_branch(last).unwrap());
        }
        (u, v)
    }

    #[test]
    fn middle_to_leaf_breaks_betweenness() {
        let (u, v) = path_universe(3);
        // v1 is between v0 and v2; sending it to an end of the image path fails
        let r = PartialIso::from_pairs(&u, [(v[0], v[0]), (v[1], v[2]), (v[2], v[1])]);
        assert!(matches!(r, Err(IsoError::Betweenness(_))));
    }

    #[test]
    fn reversal_of_a_path_is_fine() {
        let (u, v) = path_universe(4);
        let f = PartialIso::from_pairs(&u, (0..4).map(|i| (v[i], v[3 - i]))).unwrap();
        assert_eq!(f.get(v[1]), Some(v[2]));
    }

    #[test]
    fn closure_adds_median_images() {
        let mut u = Universe::new(OrderSet::infinite());
        let h = u.root();
        let a = u.add_branch(h).unwrap();
        let b = u.add_branch(h).unwrap();
        let c = u.add_branch(h).unwrap();
        let f = PartialIso::from_pairs(&u, [(a, b), (b, c), (c, a)]).unwrap();
        assert_eq!(f.get(h), Some(h));
    }

    #[test]
    fn generic_extension_stays_an_isomorphism() {
        let (mut u, v) = path_universe(5);
        let mut f = PartialIso::from_pairs(&u, [(v[0], v[1]), (v[1], v[2])]).unwrap();
        let side = u.add_branch(v[1]).unwrap();
        let mid = u.add_between(v[3], v[4], Label::Infinite).unwrap();
        for x in [v[3], side, mid, v[4]] {
            f.forward(&mut u, x).unwrap();
        }
        for y in [v[0], v[3]] {
            f.backward(&mut u, y).unwrap();
        }
        let again = PartialIso::from_pairs(&u, f.pairs().iter().map(|(&a, &b)| (a, b))).unwrap();
        assert_eq!(again.pairs(), f.pairs());
    }

    #[test]
    fn add_pair_agrees_with_closing() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let mut u = Universe::new(OrderSet::infinite());
            for _ in 0..9 {
                let pts: Vec<PointId> = u.points().collect();
                let p = pts[rng.gen_range(0..pts.len())];
                let q = pts[rng.gen_range(0..pts.len())];
                if p != q && rng.gen_bool(0.4) {
                    u.add_between(p, q, Label::Infinite).unwrap();
                } else {
                    u.add_branch(p).unwrap();
                }
            }
            let pts: Vec<PointId> = u.points().collect();
            let mut f = PartialIso::new();
            for _ in 0..6 {
                let x = pts[rng.gen_range(0..pts.len())];
                let y = pts[rng.gen_range(0..pts.len())];
                let slow = f.extend_with(&u, [(x, y)]);
                let before = f.clone();
                match f.add_pair(&u, x, y) {
                    Ok(()) => assert_eq!(Ok(&f), slow.as_ref()),
                    Err(_) => {
                        assert!(slow.is_err());
                        assert_eq!(f, before);
                    }
                }
            }
        }
    }

    #[test]
    fn conflict_is_reported() {
        let (u, v) = path_universe(3);
        let f = PartialIso::identity_on([v[0]]);
        assert_eq!(f.extend_with(&u, [(v[0], v[1])]), Err(IsoError::Conflict(v[0], v[0], v[1])));
    }
}
