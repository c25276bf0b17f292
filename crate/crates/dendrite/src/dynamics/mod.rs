//! Lazily answered automorphisms of the dendrite and the pointwise split of
//! the space into the part moved along austro-boreal arcs and the rest.
//!
//! An automorphism only ever commits to the images of points that were
//! asked about. Atoms hold the committed pairs; compositions, inverses,
//! powers and patchworks are expressions over shared atoms, so every copy of
//! an automorphism sees the same answers.

mod atom;
mod classify;
mod example;
mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::iso::{IsoError, PartialIso};
use crate::label::PointId;
use crate::systems::{validate_system, Diagnostic, System};
use crate::universe::{Target, Universe, UniverseError};
use atom::{Atom, Rule};

pub use classify::{
    check_kd_monotone, classify_point, component_rotation_check, dot_export, DynClass, DynTag, KdReport,
    WITNESS_CAP,
};
pub use example::{build_example_d3, D3Example};
pub use support::{Part, Support};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynError {
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error("invalid system: {0}")]
    Invalid(Diagnostic),
    #[error("supports overlap")]
    OverlappingSupports,
    #[error("boundary point {0} is moved by its piece")]
    BoundaryMoved(PointId),
    #[error("{0} leaves the support of its piece")]
    EscapesSupport(PointId),
    #[error("{0} is fixed")]
    PointIsFixed(PointId),
    #[error("{0} is not in the K-part")]
    NotKPart(PointId),
    #[error("bad construction: {0}")]
    Construction(String),
}

#[derive(Clone, Debug)]
enum Expr {
    Identity,
    Atom(Arc<Mutex<Atom>>),
    Inverse(Box<Expr>),
    /// g ∘ h
    Compose(Box<Expr>, Box<Expr>),
    Power(Box<Expr>, i64),
    Patch(Vec<(Support, Expr)>),
}

/// An automorphism known through the images it has been asked for.
#[derive(Clone, Debug)]
pub struct LazyAutomorphism {
    expr: Expr,
}

fn atom(a: Atom) -> LazyAutomorphism {
    LazyAutomorphism { expr: Expr::Atom(Arc::new(Mutex::new(a))) }
}

impl Expr {
    fn eval(&self, u: &mut Universe, x: PointId, inv: bool) -> Result<PointId, DynError> {
        match self {
            Expr::Identity => {
                u.label(x)?;
                Ok(x)
            }
            Expr::Atom(a) => {
                let mut a = a.lock().expect("atom lock");
                if inv {
                    a.backward(u, x)
                } else {
                    a.forward(u, x)
                }
            }
            Expr::Inverse(e) => e.eval(u, x, !inv),
            Expr::Compose(g, h) => {
                if inv {
                    let y = g.eval(u, x, true)?;
                    h.eval(u, y, true)
                } else {
                    let y = h.eval(u, x, false)?;
                    g.eval(u, y, false)
                }
            }
            Expr::Power(e, n) => {
                let back = inv ^ (*n < 0);
                let mut y = x;
                for _ in 0..n.unsigned_abs() {
                    y = e.eval(u, y, back)?;
                }
                Ok(y)
            }
            Expr::Patch(pieces) => {
                for (s, e) in pieces {
                    if s.contains(u, x)? {
                        let y = e.eval(u, x, inv)?;
                        if !s.contains(u, y)? {
                            return Err(DynError::EscapesSupport(x));
                        }
                        return Ok(y);
                    }
                }
                u.label(x)?;
                Ok(x)
            }
        }
    }

    fn snapshot(&self, seen: &mut BTreeMap<usize, Arc<Mutex<Atom>>>) -> Expr {
        match self {
            Expr::Identity => Expr::Identity,
            Expr::Atom(a) => {
                let key = Arc::as_ptr(a) as usize;
                let copy = seen
                    .entry(key)
                    .or_insert_with(|| Arc::new(Mutex::new(a.lock().expect("atom lock").clone())))
                    .clone();
                Expr::Atom(copy)
            }
            Expr::Inverse(e) => Expr::Inverse(Box::new(e.snapshot(seen))),
            Expr::Compose(g, h) => Expr::Compose(Box::new(g.snapshot(seen)), Box::new(h.snapshot(seen))),
            Expr::Power(e, n) => Expr::Power(Box::new(e.snapshot(seen)), *n),
            Expr::Patch(p) => Expr::Patch(p.iter().map(|(s, e)| (s.clone(), e.snapshot(seen))).collect()),
        }
    }

    /// Committed points, or with `fixed` only those some atom fixes (plus
    /// patch boundaries).
    fn answered(&self, out: &mut BTreeSet<PointId>, fixed: bool) {
        match self {
            Expr::Identity => {}
            Expr::Atom(a) => {
                let a = a.lock().expect("atom lock");
                if fixed {
                    out.extend(a.memo.pairs().iter().filter(|(x, y)| x == y).map(|(x, _)| *x));
                } else {
                    out.extend(a.memo.domain());
                    out.extend(a.memo.image());
                }
            }
            Expr::Inverse(e) | Expr::Power(e, _) => e.answered(out, fixed),
            Expr::Compose(g, h) => {
                g.answered(out, fixed);
                h.answered(out, fixed);
            }
            Expr::Patch(p) => {
                for (s, e) in p {
                    out.extend(s.cut_points());
                    e.answered(out, fixed);
                }
            }
        }
    }
}

impl LazyAutomorphism {
    pub fn identity() -> Self {
        LazyAutomorphism { expr: Expr::Identity }
    }

    /// g(x), materializing the image if needed.
    pub fn apply(&self, u: &mut Universe, x: PointId) -> Result<PointId, DynError> {
        self.expr.eval(u, x, false)
    }

    /// g⁻¹(y).
    pub fn apply_inverse(&self, u: &mut Universe, y: PointId) -> Result<PointId, DynError> {
        self.expr.eval(u, y, true)
    }

    pub fn inverse(&self) -> Self {
        LazyAutomorphism { expr: Expr::Inverse(Box::new(self.expr.clone())) }
    }

    /// self ∘ h.
    pub fn compose(&self, h: &LazyAutomorphism) -> Self {
        LazyAutomorphism { expr: Expr::Compose(Box::new(self.expr.clone()), Box::new(h.expr.clone())) }
    }

    pub fn power(&self, n: i64) -> Self {
        if n == 0 {
            return Self::identity();
        }
        LazyAutomorphism { expr: Expr::Power(Box::new(self.expr.clone()), n) }
    }

    /// gⁿ(x) for n ≥ 0 as the list x, g(x), …, gⁿ(x).
    pub fn orbit(&self, u: &mut Universe, x: PointId, n: usize) -> Result<Vec<PointId>, DynError> {
        let mut out = vec![x];
        for _ in 0..n {
            let y = self.apply(u, *out.last().unwrap())?;
            out.push(y);
        }
        Ok(out)
    }

    /// An independent copy: later answers of the copy and of `self` no
    /// longer influence each other.
    pub fn snapshot(&self) -> Self {
        LazyAutomorphism { expr: self.expr.snapshot(&mut BTreeMap::new()) }
    }

    /// Points some atom has committed on, plus the cut points of patches.
    pub fn answered_points(&self) -> BTreeSet<PointId> {
        let mut out = BTreeSet::new();
        self.expr.answered(&mut out, false);
        out
    }

    /// Points fixed by some constituent; candidates for fixed points of self.
    pub fn fixed_hints(&self) -> BTreeSet<PointId> {
        let mut out = BTreeSet::new();
        self.expr.answered(&mut out, true);
        out
    }

    /// The system induced on cl(points): B = cl(points), C = g(B), A = cl(B ∪ C).
    pub fn restrict(&self, u: &mut Universe, points: &BTreeSet<PointId>) -> Result<System, DynError> {
        let b = u.c_closure(points)?;
        let mut phi = BTreeMap::new();
        for &x in &b {
            phi.insert(x, self.apply(u, x)?);
        }
        let c: BTreeSet<PointId> = phi.values().copied().collect();
        let a = u.cl(&b.union(&c).copied().collect());
        Ok(System { universe: u.clone(), a, b, c, phi })
    }
}

/// A lazy automorphism extending φ. Unseen points are fixed when that is
/// consistent with what has been answered, and otherwise placed
/// generically, with side choices drawn from `seed`.
pub fn realize(s: &System, seed: u64) -> Result<LazyAutomorphism, DynError> {
    validate_system(s).map_err(DynError::Invalid)?;
    let memo = PartialIso::from_pairs(&s.universe, s.phi.iter().map(|(&a, &b)| (a, b)))?.with_seed(seed);
    Ok(atom(Atom::new(memo, Vec::new(), true)))
}

/// Acts as each piece on its support and as the identity elsewhere. Pieces
/// must fix the cut points of their supports.
pub fn patchwork(u: &mut Universe, pieces: Vec<(Support, LazyAutomorphism)>) -> Result<LazyAutomorphism, DynError> {
    for (i, (s, _)) in pieces.iter().enumerate() {
        for (t, _) in &pieces[i + 1..] {
            if s.meets(t, u)? {
                return Err(DynError::OverlappingSupports);
            }
        }
    }
    for (s, g) in &pieces {
        for b in s.cut_points() {
            if g.apply(u, b)? != b {
                return Err(DynError::BoundaryMoved(b));
            }
        }
    }
    if pieces.is_empty() {
        return Ok(LazyAutomorphism::identity());
    }
    Ok(LazyAutomorphism { expr: Expr::Patch(pieces.into_iter().map(|(s, g)| (s, g.expr)).collect()) })
}

/// The support of a translation along the arc from `from` to `to`: D(from, to)
/// for a point, the component of `from` containing the end otherwise. A
/// point of ]from, to[ is materialized if there is none.
pub fn axis_support(u: &mut Universe, from: PointId, to: Target) -> Result<Support, DynError> {
    Ok(Support::new(vec![match to {
        Target::Point(z) => {
            let path = u.path(from, z)?;
            let inner = match path.get(1) {
                Some(&p) if p != z => p,
                _ => u.add_between(from, z, u.order_set().default_label())?,
            };
            Part::gap(from, z, inner)
        }
        Target::End(_) => Part::at(from, to),
    }]))
}

/// A translation along the arc from `from` to `to` (a point or an end), with
/// both ends fixed and no fixed point inside, moving points toward `to` or
/// toward `from`. The identity outside the support.
pub fn translation(u: &mut Universe, from: PointId, to: Target, toward_to: bool, seed: u64) -> Result<LazyAutomorphism, DynError> {
    let support = axis_support(u, from, to)?;
    let mut fixed = vec![(from, from)];
    if let Target::Point(z) = to {
        if z == from {
            return Err(DynError::Construction("the arc is degenerate".into()));
        }
        fixed.push((z, z));
    }
    let memo = PartialIso::from_pairs(u, fixed)?.with_seed(seed);
    let piece = atom(Atom::new(memo, vec![Rule::Axis { from, to, toward_to }], false));
    patchwork(u, vec![(support, piece)])
}

/// Permutes the components of `hub` containing `reps` cyclically,
/// reps[i] ↦ reps[i+1], with gⁿ the identity on them. The identity
/// elsewhere.
pub fn rotation(u: &mut Universe, hub: PointId, reps: &[PointId], seed: u64) -> Result<LazyAutomorphism, DynError> {
    let n = reps.len();
    if n == 0 {
        return Ok(LazyAutomorphism::identity());
    }
    let parts: Vec<Part> = reps.iter().map(|&r| Part::at(hub, r)).collect();
    for (i, p) in parts.iter().enumerate() {
        for q in &parts[i + 1..] {
            if p.meets(q, u)? {
                return Err(DynError::Construction("representatives share a component".into()));
            }
        }
    }
    let mut pairs = vec![(hub, hub)];
    pairs.extend((0..n).map(|i| (reps[i], reps[(i + 1) % n])));
    let memo = PartialIso::from_pairs(u, pairs)?.with_seed(seed);
    let piece = atom(Atom::new(memo, vec![Rule::Cycle { parts: parts.clone(), n }], false));
    patchwork(u, vec![(Support::new(parts), piece)])
}

#[cfg(test)]
mod tests;
