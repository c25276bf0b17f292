//! The space K of consistent component assignments (C_b), one coordinate
//! per materialized branch point, with its orbit classification and the
//! comparison of Cauchy sequences of ends in D∞ and in K.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iso::PartialIso;
use crate::label::{EndId, Label, PointId};
use crate::orders::branch_points;
use crate::universe::{ComponentRef, Target, Universe, UniverseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundaryError {
    #[error("inconsistent assignment: {0:?}")]
    Inconsistent(KViolation),
    #[error("horizon {horizon} leaves fewer than two terms of a sequence of length {len}")]
    HorizonTooSmall { horizon: usize, len: usize },
    #[error("{0} is not on the arc toward the end")]
    NotOnDirection(PointId),
    #[error("{0} is not a regular point or endpoint")]
    NotRegular(PointId),
    #[error("{0} has no component number {1}")]
    NoSuchComponent(PointId, usize),
    #[error("the image of the coordinate at {0} is not determined by the map")]
    Undetermined(PointId),
    #[error(transparent)]
    Universe(#[from] UniverseError),
}

/// A coordinate: a component at b, or the symbol ∞_b.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "CoordRepr", into = "CoordRepr")]
pub enum Coord {
    Comp(ComponentRef),
    Inf,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoordRepr {
    Comp(ComponentRef),
    Tag(String),
}

impl From<Coord> for CoordRepr {
    fn from(c: Coord) -> Self {
        match c {
            Coord::Comp(r) => CoordRepr::Comp(r),
            Coord::Inf => CoordRepr::Tag("inf".into()),
        }
    }
}

impl TryFrom<CoordRepr> for Coord {
    type Error = String;
    fn try_from(r: CoordRepr) -> Result<Self, String> {
        match r {
            CoordRepr::Comp(c) => Ok(Coord::Comp(c)),
            CoordRepr::Tag(t) if t == "inf" => Ok(Coord::Inf),
            CoordRepr::Tag(t) => Err(format!("unknown coordinate {t:?}")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "KPointJson", into = "KPointJson")]
pub struct KPoint {
    pub coords: BTreeMap<PointId, Coord>,
}

#[derive(Serialize, Deserialize)]
struct KPointJson {
    coords: Vec<CoordEntry>,
}

#[derive(Serialize, Deserialize)]
struct CoordEntry {
    b: PointId,
    comp: Coord,
}

impl From<KPoint> for KPointJson {
    fn from(k: KPoint) -> Self {
        KPointJson { coords: k.coords.into_iter().map(|(b, comp)| CoordEntry { b, comp }).collect() }
    }
}

impl TryFrom<KPointJson> for KPoint {
    type Error = String;
    fn try_from(j: KPointJson) -> Result<Self, String> {
        let mut coords = BTreeMap::new();
        for e in j.coords {
            if coords.insert(e.b, e.comp).is_some() {
                return Err(format!("{} is assigned twice", e.b));
            }
        }
        Ok(KPoint { coords })
    }
}

impl KPoint {
    pub fn get(&self, b: PointId) -> Option<Coord> {
        self.coords.get(&b).copied()
    }

    pub fn infinities(&self) -> Vec<PointId> {
        self.coords.iter().filter(|(_, c)| **c == Coord::Inf).map(|(b, _)| *b).collect()
    }

    pub fn restrict(&self, d: &BTreeSet<PointId>) -> KPoint {
        KPoint { coords: self.coords.iter().filter(|(b, _)| d.contains(b)).map(|(b, c)| (*b, *c)).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KViolation {
    /// a materialized branch point without a coordinate
    Missing { b: PointId },
    /// a coordinate at a point that is not a branch point, or naming a
    /// component that is not at its point
    Foreign { b: PointId },
    DoubleInfinity { b: PointId, b_prime: PointId },
    /// b′ ∉ C_b but C_{b′} ≠ C_{b′}(b)
    Inconsistent { b: PointId, b_prime: PointId },
}

/// The orbit type of a point of K at the materialized resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum KClass {
    RegularPoint { x: PointId },
    /// a registered end, or a materialized endpoint
    EndPoint { x: Target },
    /// n indexes the components at b in materialization order
    BranchFinite { b: PointId, n: usize },
    BranchInfinity { b: PointId },
}

impl KClass {
    pub fn kind(&self) -> &'static str {
        match self {
            KClass::RegularPoint { .. } => "regular",
            KClass::EndPoint { .. } => "end",
            KClass::BranchFinite { .. } => "branch_finite",
            KClass::BranchInfinity { .. } => "branch_infinity",
        }
    }
}

/// b′ ∉ C_b, with b′ ∉ ∞_b always.
fn outside(u: &Universe, c: Coord, b_prime: PointId) -> Result<bool, UniverseError> {
    match c {
        Coord::Inf => Ok(true),
        Coord::Comp(r) => Ok(!u.in_component(r, Target::Point(b_prime))?),
    }
}

/// The consistency rule and the single-∞ rule on whatever coordinates are
/// present.
pub fn consistency_violation(u: &Universe, k: &KPoint) -> Result<Option<KViolation>, BoundaryError> {
    for (&b, &c) in &k.coords {
        if !u.label(b)?.is_branch() {
            return Ok(Some(KViolation::Foreign { b }));
        }
        if let Coord::Comp(r) = c {
            if r.at != b || !u.components_at(b)?.contains(&r) {
                return Ok(Some(KViolation::Foreign { b }));
            }
        }
    }
    if let [b, b_prime, ..] = k.infinities()[..] {
        return Ok(Some(KViolation::DoubleInfinity { b, b_prime }));
    }
    for (&b, &c) in &k.coords {
        for (&b_prime, &c_prime) in &k.coords {
            if b == b_prime || !outside(u, c, b_prime)? {
                continue;
            }
            if c_prime != Coord::Comp(u.component_of(b_prime, Target::Point(b))?) {
                return Ok(Some(KViolation::Inconsistent { b, b_prime }));
            }
        }
    }
    Ok(None)
}

/// Totality on the materialized branch points, then consistency.
pub fn validate_kpoint(u: &Universe, k: &KPoint) -> Result<Option<KViolation>, BoundaryError> {
    let br = branch_points(u);
    if let Some(&b) = br.iter().find(|b| !k.coords.contains_key(b)) {
        return Ok(Some(KViolation::Missing { b }));
    }
    if let Some(&b) = k.coords.keys().find(|b| !br.contains(b)) {
        return Ok(Some(KViolation::Foreign { b }));
    }
    consistency_violation(u, k)
}

fn points_toward(u: &Universe, k: &KPoint, t: Target, skip: Option<PointId>) -> Result<bool, UniverseError> {
    for (&b, &c) in &k.coords {
        if Some(b) == skip {
            continue;
        }
        if c != Coord::Comp(u.component_of(b, t)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Branch points b₀ among the coordinates with C_b ∋ b₀ for every other b.
pub fn branch_candidates(u: &Universe, k: &KPoint) -> Result<Vec<PointId>, BoundaryError> {
    let mut out = Vec::new();
    for &b0 in k.coords.keys() {
        if points_toward(u, k, Target::Point(b0), Some(b0))? {
            out.push(b0);
        }
    }
    Ok(out)
}

/// Non-branch points and ends lying in every C_b.
pub fn point_candidates(u: &Universe, k: &KPoint) -> Result<Vec<Target>, BoundaryError> {
    let mut out = Vec::new();
    for p in u.points() {
        if !u.label(p)?.is_branch() && points_toward(u, k, Target::Point(p), None)? {
            out.push(Target::Point(p));
        }
    }
    for (e, _) in u.ends() {
        if points_toward(u, k, Target::End(e), None)? {
            out.push(Target::End(e));
        }
    }
    Ok(out)
}

fn id_of(t: Target) -> u64 {
    match t {
        Target::Point(p) => p.0,
        Target::End(e) => e.0,
    }
}

/// At finite resolution C(x) and Cⁿ(b) may agree on every coordinate;
/// non-branch points win, then the oldest candidate.
pub fn classify_kpoint(u: &Universe, k: &KPoint) -> Result<KClass, BoundaryError> {
    if let Some(v) = validate_kpoint(u, k)? {
        return Err(BoundaryError::Inconsistent(v));
    }
    classify_partial(u, k)
}

fn toward_all(u: &Universe, t: Target, except: Option<PointId>) -> Result<KPoint, BoundaryError> {
    let mut coords = BTreeMap::new();
    for b in branch_points(u) {
        if Some(b) != except && Target::Point(b) != t {
            coords.insert(b, Coord::Comp(u.component_of(b, t)?));
        }
    }
    Ok(KPoint { coords })
}

/// C(ξ).
pub fn of_end(u: &Universe, xi: EndId) -> Result<KPoint, BoundaryError> {
    u.end_anchor(xi)?;
    toward_all(u, Target::End(xi), None)
}

/// C(x) for a regular point or endpoint x.
pub fn kpoint_of_regular(u: &Universe, x: PointId) -> Result<KPoint, BoundaryError> {
    if u.label(x)?.is_branch() {
        return Err(BoundaryError::NotRegular(x));
    }
    toward_all(u, Target::Point(x), None)
}

/// Cⁿ(b), or C^∞(b) for `None`.
pub fn kpoint_cn(u: &Universe, b: PointId, n: Option<usize>) -> Result<KPoint, BoundaryError> {
    if !u.label(b)?.is_branch() {
        return Err(UniverseError::Tree(crate::tree::TreeError::UnknownVertex(b)).into());
    }
    let mut k = toward_all(u, Target::Point(b), Some(b))?;
    let c = match n {
        None => Coord::Inf,
        Some(i) => Coord::Comp(*u.components_at(b)?.get(i).ok_or(BoundaryError::NoSuchComponent(b, i))?),
    };
    k.coords.insert(b, c);
    Ok(k)
}

/// The canonical point of `class` at the current resolution.
pub fn kpoint_of_class(u: &Universe, class: KClass) -> Result<KPoint, BoundaryError> {
    match class {
        KClass::RegularPoint { x } => kpoint_of_regular(u, x),
        KClass::EndPoint { x: Target::End(e) } => of_end(u, e),
        KClass::EndPoint { x: Target::Point(x) } => kpoint_of_regular(u, x),
        KClass::BranchFinite { b, n } => kpoint_cn(u, b, Some(n)),
        KClass::BranchInfinity { b } => kpoint_cn(u, b, None),
    }
}

/// Adds coordinates at newly materialized branch points, pointing at the
/// point `class` names. The class has to be computed before growth: new
/// ends and points can agree with every old coordinate and would compete
/// with it afterwards.
pub fn extend_kpoint(u: &Universe, k: &KPoint, class: KClass) -> Result<KPoint, BoundaryError> {
    let mut out = kpoint_of_class(u, class)?;
    for (b, c) in &k.coords {
        out.coords.insert(*b, *c);
    }
    if let Some(v) = consistency_violation(u, &out)? {
        return Err(BoundaryError::Inconsistent(v));
    }
    Ok(out)
}

/// classify_kpoint on the coordinates present, without totality.
/// Candidates are sought among all points and ends of the universe.
fn classify_partial(u: &Universe, k: &KPoint) -> Result<KClass, BoundaryError> {
    if let Some(v) = consistency_violation(u, k)? {
        return Err(BoundaryError::Inconsistent(v));
    }
    if let Some(&b) = k.infinities().first() {
        return Ok(KClass::BranchInfinity { b });
    }
    if let Some(t) = point_candidates(u, k)?.into_iter().min_by_key(|&t| id_of(t)) {
        return Ok(match t {
            Target::Point(x) if u.label(x)? == Label::Regular => KClass::RegularPoint { x },
            _ => KClass::EndPoint { x: t },
        });
    }
    let Some(&b) = branch_candidates(u, k)?.first() else {
        let b = k.coords.keys().next().copied().unwrap_or(u.root());
        return Err(BoundaryError::Inconsistent(KViolation::Missing { b }));
    };
    let Some(Coord::Comp(c)) = k.get(b) else { unreachable!("no infinity") };
    let n = u.components_at(b)?.iter().position(|&d| d == c).expect("consistent");
    Ok(KClass::BranchFinite { b, n })
}

/// Whether η's direction enters C_b(ξ), for b on the arc from the base
/// point toward ξ.
pub fn in_basis_neighborhood(u: &Universe, eta: EndId, b: PointId, xi: EndId) -> Result<bool, BoundaryError> {
    let anchor = u.end_anchor(xi)?;
    if !u.between(b, u.root(), anchor) {
        return Err(BoundaryError::NotOnDirection(b));
    }
    Ok(u.in_component(u.component_of(b, Target::End(xi))?, Target::End(eta))?)
}

/// A new end whose coordinates at the branch points materialized before the
/// call agree with `class` (∞_b matched by a component that did not exist).
pub fn approximating_end(u: &mut Universe, class: KClass) -> Result<EndId, BoundaryError> {
    let dl = u.order_set().default_label();
    let at = match class {
        KClass::RegularPoint { x } | KClass::EndPoint { x: Target::Point(x) } => {
            let nb = u.tree().neighbors(x).next();
            match nb {
                Some(y) => u.add_between(x, y, dl)?,
                None => u.add_branch(x)?,
            }
        }
        KClass::EndPoint { x: Target::End(e) } => u.refine_end(e)?,
        KClass::BranchFinite { b, n } => {
            let c = *u.components_at(b)?.get(n).ok_or(BoundaryError::NoSuchComponent(b, n))?;
            let end = u.ends().find(|(e, d)| d.anchor == b && e.0 == c.key).map(|(e, _)| e);
            match end {
                Some(e) => u.refine_end(e)?,
                None => {
                    let y = u.tree().neighbors(b).find(|&y| u.component_of(b, Target::Point(y)).ok() == Some(c));
                    u.add_between(b, y.expect("component has a neighbour"), dl)?
                }
            }
        }
        KClass::BranchInfinity { b } => u.add_branch(b)?,
    };
    Ok(u.register_end(at)?)
}

/// Coordinatewise agreement on the coordinates of `k`; ∞_b agrees with any
/// component of `other` outside `old_components[b]`.
pub fn agrees_with(k: &KPoint, other: &KPoint, old_components: &BTreeMap<PointId, Vec<ComponentRef>>) -> bool {
    k.coords.iter().all(|(b, c)| match (c, other.get(*b)) {
        (Coord::Comp(x), Some(Coord::Comp(y))) => *x == y,
        (Coord::Inf, Some(Coord::Comp(y))) => !old_components.get(b).is_some_and(|v| v.contains(&y)),
        (Coord::Inf, Some(Coord::Inf)) => true,
        _ => false,
    })
}

/// g·k on g's domain: (g·k)_{g b} = g(C_b). Every finite coordinate must
/// meet the domain.
pub fn push_kpoint(u: &Universe, g: &PartialIso, k: &KPoint) -> Result<KPoint, BoundaryError> {
    let dom = g.domain();
    let mut coords = BTreeMap::new();
    for (&b, &c) in &k.coords {
        let Some(gb) = g.get(b) else { continue };
        let gc = match c {
            Coord::Inf => Coord::Inf,
            Coord::Comp(r) => {
                let d = dom
                    .iter()
                    .copied()
                    .find(|&d| u.in_component(r, Target::Point(d)).unwrap_or(false))
                    .ok_or(BoundaryError::Undetermined(b))?;
                Coord::Comp(u.component_of(gb, Target::Point(g.get(d).expect("domain")))?)
            }
        };
        coords.insert(gb, gc);
    }
    Ok(KPoint { coords })
}

/// Verdict of the Cauchy comparison at a horizon. F is the `horizon`
/// oldest branch points and the tail is the sequence from index `horizon`
/// on. A pair is close in D∞ when its arc meets at most one point of F,
/// and close in K when it meets none, i.e. all coordinates on F agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchyVerdict {
    pub horizon: usize,
    pub f: Vec<PointId>,
    pub d_inf_cauchy: bool,
    pub k_cauchy: bool,
    /// a tail pair whose arc meets two points of F
    pub d_inf_witness: Option<(EndId, EndId, Vec<PointId>)>,
    /// a tail pair and a coordinate of F where they differ
    pub k_witness: Option<(EndId, EndId, PointId)>,
}

pub fn cauchy_compare(u: &Universe, seq: &[EndId], horizon: usize) -> Result<CauchyVerdict, BoundaryError> {
    if horizon == 0 || seq.len() < horizon + 2 {
        return Err(BoundaryError::HorizonTooSmall { horizon, len: seq.len() });
    }
    let f: Vec<PointId> = branch_points(u).into_iter().take(horizon).collect();
    let tail = &seq[horizon..];
    let mut v = CauchyVerdict { horizon, f: f.clone(), d_inf_cauchy: true, k_cauchy: true, d_inf_witness: None, k_witness: None };
    for (i, &x) in tail.iter().enumerate() {
        for &y in &tail[i + 1..] {
            if x == y {
                continue;
            }
            let arc = u.path(u.end_anchor(x)?, u.end_anchor(y)?)?;
            let hit: Vec<PointId> = f.iter().copied().filter(|b| arc.contains(b)).collect();
            if let Some(&b) = hit.first() {
                if v.k_witness.is_none() {
                    v.k_cauchy = false;
                    v.k_witness = Some((x, y, b));
                }
            }
            if hit.len() > 1 && v.d_inf_witness.is_none() {
                v.d_inf_cauchy = false;
                v.d_inf_witness = Some((x, y, hit));
            }
        }
    }
    Ok(v)
}
