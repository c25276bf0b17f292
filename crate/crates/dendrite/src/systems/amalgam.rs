//! Amalgamation over a common subsystem.
//!
//! The amalgam lives in a copy of s1's universe, so j1 is the identity. The
//! points of s2 outside the image of the base are grafted in one at a time.
//! Points on a shared orbit have no choice: φ₂ᵏ(b) goes to φ₁ᵏ(b). Otherwise
//! a point hanging off the placed part gets a fresh component, and a point on
//! an arc between placed points chooses a slot among the points of s1 on
//! that arc, or as a last resort coincides with one of them. Choices are
//! searched depth first, orbit by orbit, pruning as soon as the union of the
//! two maps stops being a partial isomorphism.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::extend::Map;
use super::lclass::is_in_l;
use super::place::{locate, place, respects, slot_count, Kind};
use super::{in_d, phi_orbits, validate_system, verify_embedding, Embedding, System, SystemError};
use crate::iso::close_map;
use crate::label::PointId;
use crate::universe::Universe;

const BUDGET: usize = 200_000;

/// How a point of Bᵢ outside the base relates to the base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PointCase {
    /// its orbit contains a base orbit
    SharedOrbit,
    /// inside a corridor between periodic base points that meets no base point
    EmptyCorridor,
    /// orbit meets a gap D(y′, z′) between base points of the corridor
    InnerGap,
    /// orbit meets a gap at an end of the corridor
    EndGap,
    /// hangs off a periodic base point inside the corridor
    CorridorHanging,
    /// hangs off the base outside every D(y, z)
    Hanging,
}

#[derive(Clone, Debug)]
pub struct Amalgam {
    pub system: System,
    pub j1: Embedding,
    pub j2: Embedding,
    pub cases1: BTreeMap<PointId, PointCase>,
    pub cases2: BTreeMap<PointId, PointCase>,
    pub nodes: usize,
}

/// Amalgamates two extensions of `base` in 𝓛. Fails with `NotInL` if an
/// input is outside 𝓛, unless the search itself fails, which is reported as
/// `OrbitConflict` with the obstruction.
pub fn amalgamate(base: &System, s1: &System, s2: &System, i1: &Embedding, i2: &Embedding) -> Result<Amalgam, SystemError> {
    for s in [base, s1, s2] {
        validate_system(s).map_err(SystemError::Invalid)?;
    }
    verify_embedding(base, s1, i1).map_err(SystemError::Invalid)?;
    verify_embedding(base, s2, i2).map_err(SystemError::Invalid)?;
    let not_l = [base, s1, s2].iter().find_map(|s| is_in_l(s).first_failure().cloned());
    let r = amalgamate_unchecked(base, s1, s2, i1, i2);
    match (r, not_l) {
        (Err(SystemError::NoProgress(m)), _) => Err(SystemError::OrbitConflict(m)),
        (Ok(_), Some(d)) => Err(SystemError::NotInL(d)),
        (r, _) => r,
    }
}

/// The search without the 𝓛 precondition.
pub fn amalgamate_unchecked(
    base: &System,
    s1: &System,
    s2: &System,
    i1: &Embedding,
    i2: &Embedding,
) -> Result<Amalgam, SystemError> {
    let mut j: Map = base.a.iter().map(|a| (i2[a], i1[a])).collect();
    let forced = forced_images(base, s1, s2, i1, i2);
    // forced points first, then whole orbits in order, then the rest
    let mut wish: Vec<PointId> = forced.keys().copied().collect();
    for o in &phi_orbits(s2).orbits {
        wish.extend(o.points.iter().copied());
    }
    wish.extend(s2.a.iter().copied());
    let mut seen = BTreeSet::new();
    wish.retain(|q| !j.contains_key(q) && seen.insert(*q));
    let mut search = Search { s1, s2, wish, forced, nodes: 0 };
    let mut m = s1.universe.clone();
    let found = search.run(&mut m, &mut j)?;
    if !found {
        let msg = if search.nodes >= BUDGET { "search budget exhausted" } else { "no placement makes φ₁ ∪ φ₂ a partial isomorphism" };
        return Err(SystemError::NoProgress(msg.into()));
    }
    let phi = close_map(m.tree(), &union_map(s1, s2, &j).expect("checked in search"))?;
    let b: BTreeSet<PointId> = phi.keys().copied().collect();
    let c: BTreeSet<PointId> = phi.values().copied().collect();
    let mut a: BTreeSet<PointId> = s1.a.iter().chain(j.values()).chain(b.iter()).chain(c.iter()).copied().collect();
    a = m.cl(&a);
    let system = System { universe: m, a, b, c, phi };
    let j1: Embedding = s1.a.iter().map(|&p| (p, p)).collect();
    let j2: Embedding = s2.a.iter().map(|p| (*p, j[p])).collect();
    verify_embedding(s1, &system, &j1).map_err(SystemError::Invalid)?;
    verify_embedding(s2, &system, &j2).map_err(SystemError::Invalid)?;
    Ok(Amalgam {
        cases1: classify_points(base, s1, i1),
        cases2: classify_points(base, s2, i2),
        system,
        j1,
        j2,
        nodes: search.nodes,
    })
}

/// φ₁ together with j φ₂ j⁻¹ on the pairs already placed; None on a clash.
fn union_map(s1: &System, s2: &System, j: &Map) -> Option<Map> {
    let mut m = s1.phi.clone();
    for (a, b) in &s2.phi {
        if let (Some(&ja), Some(&jb)) = (j.get(a), j.get(b)) {
            if m.insert(ja, jb).is_some_and(|old| old != jb) {
                return None;
            }
        }
    }
    Some(m)
}

struct Search<'a> {
    s1: &'a System,
    s2: &'a System,
    wish: Vec<PointId>,
    /// images fixed by shared orbits: φ₂ᵏ(i₂ b) must go to φ₁ᵏ(i₁ b)
    forced: Map,
    nodes: usize,
}

/// Walks every base orbit in both extensions at once and pairs the points
/// reached with the same power of φ.
fn forced_images(base: &System, s1: &System, s2: &System, i1: &Embedding, i2: &Embedding) -> Map {
    let (inv1, inv2) = (s1.phi_inv(), s2.phi_inv());
    let mut out = Map::new();
    for b in base.b.iter().chain(base.c.iter()) {
        for (f1, f2) in [(&s1.phi, &s2.phi), (&inv1, &inv2)] {
            let (mut x1, mut x2) = (i1[b], i2[b]);
            while let (Some(&y1), Some(&y2)) = (f1.get(&x1), f2.get(&x2)) {
                if out.insert(y2, y1).is_some() {
                    break;
                }
                x1 = y1;
                x2 = y2;
            }
        }
    }
    out
}

impl Search<'_> {
    fn consistent(&self, m: &Universe, j: &Map) -> bool {
        union_map(self.s1, self.s2, j).is_some_and(|map| close_map(m.tree(), &map).is_ok())
    }

    fn run(&mut self, m: &mut Universe, j: &mut Map) -> Result<bool, SystemError> {
        self.nodes += 1;
        if self.nodes > BUDGET {
            return Ok(false);
        }
        if !self.consistent(m, j) {
            return Ok(false);
        }
        let Some(&want) = self.wish.iter().find(|q| !j.contains_key(q)) else {
            return Ok(true);
        };
        let src = &self.s2.universe;
        let placed: Vec<PointId> = j.keys().copied().collect();
        let (q, kind) = if self.forced.contains_key(&want) { (want, Kind::Hang(want)) } else { locate(src, &placed, want) };
        if let Some(&w) = self.forced.get(&q) {
            if !respects(src, m, j, q, w) {
                return Ok(false);
            }
            j.insert(q, w);
            if self.run(m, j)? {
                return Ok(true);
            }
            j.remove(&q);
            return Ok(false);
        }
        let rel: BTreeSet<PointId> = self.s1.a.iter().chain(j.values()).copied().collect();
        let n = slot_count(m, &rel, j, kind);
        for slot in 0..n {
            let mut m2 = m.clone();
            let mut j2 = j.clone();
            place(&mut m2, src, &rel, &mut j2, q, kind, slot)?;
            if self.run(&mut m2, &mut j2)? {
                *m = m2;
                *j = j2;
                return Ok(true);
            }
        }
        // identify q with a point of s1 in the right position
        let taken: BTreeSet<PointId> = j.values().copied().collect();
        let forced_targets: BTreeSet<PointId> = self.forced.values().copied().collect();
        for &w in self.s1.a.difference(&taken) {
            if forced_targets.contains(&w) || !respects(src, m, j, q, w) {
                continue;
            }
            j.insert(q, w);
            if self.run(m, j)? {
                return Ok(true);
            }
            j.remove(&q);
        }
        Ok(false)
    }
}

/// Sorts the points of Bᵢ outside the base image into the cases of the
/// amalgamation argument. Ties between corridors go to the lowest ids.
pub fn classify_points(base: &System, s: &System, i: &Embedding) -> BTreeMap<PointId, PointCase> {
    let u = &s.universe;
    let ib: BTreeSet<PointId> = base.b.iter().map(|p| i[p]).collect();
    let ibc: BTreeSet<PointId> = base.b.iter().chain(base.c.iter()).map(|p| i[p]).collect();
    let per: Vec<PointId> = base.b.iter().filter(|&&p| base.is_periodic(p)).map(|p| i[p]).collect();
    let orbits = phi_orbits(s);
    let mut out = BTreeMap::new();
    for &x in s.b.difference(&ib) {
        let orbit: Vec<PointId> = orbits.orbit_of(x).map(|o| o.points.clone()).unwrap_or_else(|| vec![x]);
        let case = if orbit.iter().any(|p| ib.contains(p)) {
            PointCase::SharedOrbit
        } else if let Some((y, z)) = corridor_of(u, &per, x) {
            let inner: Vec<PointId> = ib.iter().copied().filter(|&p| in_d(u, p, y, z)).collect();
            let gap = |pts: &[PointId]| {
                orbit.iter().any(|&o| {
                    pts.iter().enumerate().any(|(k, &a)| {
                        pts[k + 1..].iter().any(|&b| in_d(u, o, a, b) && !ib.iter().any(|&w| in_d(u, w, a, b)))
                    })
                })
            };
            let mut ends = inner.clone();
            ends.extend([y, z]);
            if inner.is_empty() {
                PointCase::EmptyCorridor
            } else if gap(&inner) {
                PointCase::InnerGap
            } else if gap(&ends) {
                PointCase::EndGap
            } else {
                PointCase::CorridorHanging
            }
        } else if ibc.iter().any(|&y| ibc.iter().any(|&z| y != z && in_d(u, x, y, z))) {
            PointCase::CorridorHanging
        } else {
            PointCase::Hanging
        };
        out.insert(x, case);
    }
    out
}

fn corridor_of(u: &Universe, per: &[PointId], x: PointId) -> Option<(PointId, PointId)> {
    let mut best: Option<(usize, PointId, PointId)> = None;
    for (k, &y) in per.iter().enumerate() {
        for &z in &per[k + 1..] {
            if in_d(u, x, y, z) && !per.iter().any(|&w| in_d(u, w, y, z)) {
                let len = u.path(y, z).map_or(usize::MAX, |p| p.len());
                if best.is_none_or(|(l, _, _)| len < l) {
                    best = Some((len, y, z));
                }
            }
        }
    }
    best.map(|(_, y, z)| (y, z))
}

/// True iff no orbit of `ext` contains the images of two distinct orbits of
/// `base`.
pub fn check_orbit_discipline(base: &System, ext: &System, emb: &Embedding) -> bool {
    let bo = phi_orbits(base);
    let eo = phi_orbits(ext);
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, o) in bo.orbits.iter().enumerate() {
        for p in &o.points {
            let Some(&q) = emb.get(p) else { continue };
            let Some(idx) = eo.orbits.iter().position(|e| e.points.contains(&q)) else { continue };
            if *owner.entry(idx).or_insert(k) != k {
                return false;
            }
        }
    }
    true
}

/// A base φ(x) = y outside 𝓛 with two extensions that cannot be
/// amalgamated: s1 fixes a point p of ]x, y[, s2 sends y further along the
/// arc, and then p would have to lie in ]y, φ(y)[ as well.
pub fn notap_pair() -> (System, System, System) {
    let mut u = Universe::new(crate::label::OrderSet::infinite());
    let x = u.root();
    let y = u.add_branch(x).expect("root has room");
    let base = System::from_map(u, BTreeMap::from([(x, y)]));
    let mut u1 = base.universe.clone();
    let p = u1.add_between(x, y, u1.order_set().default_label()).expect("x ≠ y");
    let s1 = System::from_map(u1, BTreeMap::from([(x, y), (p, p)]));
    let mut u2 = base.universe.clone();
    let gy = u2.add_branch(y).expect("y has room");
    let s2 = System::from_map(u2, BTreeMap::from([(x, y), (y, gy)]));
    (base, s1, s2)
}
