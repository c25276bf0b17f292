//! Grafting the points of one universe into another, one point at a time,
//! respecting betweenness with the points already placed.

use std::collections::BTreeSet;

use super::extend::Map;
use crate::label::PointId;
use crate::universe::{Universe, UniverseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    /// strictly inside the arc between two placed points, with no placed
    /// point in between
    Between(PointId, PointId),
    /// in a component at a placed point containing no placed point
    Hang(PointId),
}

/// An order in which `all ∖ placed` can be added so that the placed set stays
/// c-closed, with the position of each new point relative to its
/// predecessors.
pub(crate) fn insertion_order(src: &Universe, placed: &BTreeSet<PointId>, all: &BTreeSet<PointId>) -> Vec<(PointId, Kind)> {
    let mut p: Vec<PointId> = placed.iter().copied().collect();
    let mut rest: BTreeSet<PointId> = all.difference(placed).copied().collect();
    let mut out = Vec::new();
    while !rest.is_empty() {
        let mut pick = None;
        'find: for &q in &rest {
            let mut best: Option<(usize, PointId, PointId)> = None;
            for (i, &a) in p.iter().enumerate() {
                for &b in &p[i + 1..] {
                    if src.strictly_between(q, a, b) {
                        let len = src.path(a, b).map_or(usize::MAX, |v| v.len());
                        if best.is_none_or(|(l, _, _)| len < l) {
                            best = Some((len, a, b));
                        }
                    }
                }
            }
            if let Some((_, a, b)) = best {
                pick = Some((q, Kind::Between(a, b)));
                break 'find;
            }
        }
        let (q, kind) = pick.unwrap_or_else(|| {
            let q = *rest.iter().next().unwrap();
            let mut near = p[0];
            for &a in &p[1..] {
                near = src.c(q, near, a);
            }
            (q, Kind::Hang(near))
        });
        rest.remove(&q);
        p.push(q);
        out.push((q, kind));
    }
    out
}

/// Points of cl(rel) strictly inside ]a, b[, ordered from a to b.
pub(crate) fn arc_points(m: &Universe, rel: &BTreeSet<PointId>, a: PointId, b: PointId) -> Vec<PointId> {
    let mut pts: Vec<PointId> = rel
        .iter()
        .map(|&r| m.c(r, a, b))
        .filter(|&w| w != a && w != b)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    pts.sort_by(|&x, &y| {
        if x == y {
            std::cmp::Ordering::Equal
        } else if m.between(x, a, y) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    pts
}

/// Number of slots for a point of the given kind.
pub(crate) fn slot_count(m: &Universe, rel: &BTreeSet<PointId>, j: &Map, kind: Kind) -> usize {
    match kind {
        Kind::Between(a, b) => arc_points(m, rel, j[&a], j[&b]).len() + 1,
        Kind::Hang(_) => 1,
    }
}

/// Materializes q in slot `slot` and records j(q).
pub(crate) fn place(
    m: &mut Universe,
    src: &Universe,
    rel: &BTreeSet<PointId>,
    j: &mut Map,
    q: PointId,
    kind: Kind,
    slot: usize,
) -> Result<PointId, UniverseError> {
    let l = src.label(q)?;
    let v = match kind {
        Kind::Between(a, b) => {
            let (ja, jb) = (j[&a], j[&b]);
            let mut w = vec![ja];
            w.extend(arc_points(m, rel, ja, jb));
            w.push(jb);
            m.add_between(w[slot], w[slot + 1], l)?
        }
        Kind::Hang(p) => m.add_branch_labeled(j[&p], l)?,
    };
    j.insert(q, v);
    Ok(v)
}

/// Whether sending q to w keeps j a betweenness embedding on the placed
/// points: every triple through q keeps its betweenness.
pub(crate) fn respects(src: &Universe, m: &Universe, j: &Map, q: PointId, w: PointId) -> bool {
    if j.values().any(|&v| v == w) || src.label(q).ok() != m.label(w).ok() {
        return false;
    }
    let placed: Vec<(PointId, PointId)> = j.iter().map(|(&a, &b)| (a, b)).collect();
    for (i, &(a, ja)) in placed.iter().enumerate() {
        for &(b, jb) in &placed[i + 1..] {
            if src.between(q, a, b) != m.between(w, ja, jb) || src.between(a, q, b) != m.between(ja, w, jb) {
                return false;
            }
        }
    }
    true
}

/// The next point to place on the way to `q`: q itself with its position
/// relative to the placed points, or first the projection of q onto their
/// hull when that projection is not placed yet.
pub(crate) fn locate(src: &Universe, placed: &[PointId], q: PointId) -> (PointId, Kind) {
    let mut pair = None;
    'outer: for (i, &a) in placed.iter().enumerate() {
        for &b in &placed[i + 1..] {
            if src.strictly_between(q, a, b) {
                pair = Some((a, b));
                break 'outer;
            }
        }
    }
    if let Some((mut a, mut b)) = pair {
        for &p in placed {
            if src.strictly_between(p, q, a) {
                a = p;
            } else if src.strictly_between(p, q, b) {
                b = p;
            }
        }
        return (q, Kind::Between(a, b));
    }
    let mut near = placed[0];
    for &p in &placed[1..] {
        near = src.c(q, near, p);
    }
    if placed.contains(&near) {
        (q, Kind::Hang(near))
    } else {
        locate(src, placed, near)
    }
}
