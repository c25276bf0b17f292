//! Systems ⟨A, φ: B → C⟩ of partial isomorphisms between finite c-closed
//! sets of branch points, the class 𝓛, and the extension and amalgamation
//! constructions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iso::{close_map, IsoError, PartialIso};
use crate::label::PointId;
use crate::universe::{Universe, UniverseError, UniverseJson};

mod amalgam;
mod extend;
mod jep;
mod lclass;
mod place;
mod random;

pub use amalgam::{amalgamate, amalgamate_unchecked, check_orbit_discipline, classify_points, notap_pair, Amalgam, PointCase};
pub use extend::{add_separating_fixed_point, ensure_fixed_point, extend_to_l, extend_to_l_with};
pub use jep::{jep_obstruction, joint_embed, JointEmbedding, ObstructionWitness};
pub use lclass::{is_in_l, ConditionResult, LReport};
pub use random::{random_extension, random_system, random_universe};
pub use crate::dynamics::realize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("invalid system: {0}")]
    Invalid(Diagnostic),
    #[error("{0} is not a fixed point of φ")]
    NotFixedPoint(PointId),
    #[error("hypotheses violated: {0}")]
    HypothesesViolated(String),
    #[error("only the order set {{∞}} is supported here")]
    FiniteOrderUnsupported,
    #[error("input system is not in 𝓛: {0}")]
    NotInL(Diagnostic),
    #[error("orbits cannot be amalgamated: {0}")]
    OrbitConflict(String),
    #[error("construction did not converge: {0}")]
    NoProgress(String),
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error(transparent)]
    Universe(#[from] UniverseError),
}

/// A failed check together with the points that witness it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub condition: String,
    pub witness: Vec<PointId>,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.condition, self.message)?;
        if !self.witness.is_empty() {
            let w: Vec<String> = self.witness.iter().map(|p| p.to_string()).collect();
            write!(f, " ({})", w.join(", "))?;
        }
        Ok(())
    }
}

pub(crate) fn diag(condition: &str, witness: Vec<PointId>, message: impl Into<String>) -> Diagnostic {
    Diagnostic { condition: condition.into(), witness, message: message.into() }
}

/// ⟨A, φ: B → C⟩ inside a universe snapshot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    pub universe: Universe,
    pub a: BTreeSet<PointId>,
    pub b: BTreeSet<PointId>,
    pub c: BTreeSet<PointId>,
    pub phi: BTreeMap<PointId, PointId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemJson {
    pub universe: UniverseJson,
    #[serde(rename = "A")]
    pub a: Vec<PointId>,
    #[serde(rename = "B")]
    pub b: Vec<PointId>,
    #[serde(rename = "C")]
    pub c: Vec<PointId>,
    pub phi: Vec<[PointId; 2]>,
}

/// An embedding of one system into another, as a map on points.
pub type Embedding = BTreeMap<PointId, PointId>;

impl System {
    /// The system given by `phi`, with B, C its domain and image and A the
    /// c-closure of both.
    pub fn from_map(universe: Universe, phi: BTreeMap<PointId, PointId>) -> Self {
        let b: BTreeSet<PointId> = phi.keys().copied().collect();
        let c: BTreeSet<PointId> = phi.values().copied().collect();
        let a = universe.cl(&b.union(&c).copied().collect());
        System { universe, a, b, c, phi }
    }

    /// The identity system on the c-closure of `points`.
    pub fn identity(universe: Universe, points: impl IntoIterator<Item = PointId>) -> Self {
        let a = universe.cl(&points.into_iter().collect());
        let phi = a.iter().map(|&p| (p, p)).collect();
        System { universe, b: a.clone(), c: a.clone(), a, phi }
    }

    pub fn inverse(&self) -> System {
        System {
            universe: self.universe.clone(),
            a: self.a.clone(),
            b: self.c.clone(),
            c: self.b.clone(),
            phi: self.phi.iter().map(|(&x, &y)| (y, x)).collect(),
        }
    }

    pub fn phi_inv(&self) -> BTreeMap<PointId, PointId> {
        self.phi.iter().map(|(&x, &y)| (y, x)).collect()
    }

    /// φⁿ(x) when φ(x), …, φⁿ⁻¹(x) are all in B.
    pub fn iterate(&self, x: PointId, n: usize) -> Option<PointId> {
        let mut y = x;
        for _ in 0..n {
            y = *self.phi.get(&y)?;
        }
        Some(y)
    }

    pub fn is_periodic(&self, x: PointId) -> bool {
        self.period(x).is_some()
    }

    pub fn period(&self, x: PointId) -> Option<usize> {
        let mut y = x;
        for k in 1..=self.phi.len() {
            y = *self.phi.get(&y)?;
            if y == x {
                return Some(k);
            }
        }
        None
    }

    /// The finite partial isomorphism φ.
    pub fn partial_iso(&self) -> Result<PartialIso, IsoError> {
        PartialIso::from_pairs(&self.universe, self.phi.iter().map(|(&a, &b)| (a, b)))
    }

    /// D(y, z) ∩ A.
    pub fn d_between(&self, y: PointId, z: PointId) -> BTreeSet<PointId> {
        self.a.iter().copied().filter(|&x| in_d(&self.universe, x, y, z)).collect()
    }

    pub fn to_json(&self) -> SystemJson {
        SystemJson {
            universe: self.universe.to_json(),
            a: self.a.iter().copied().collect(),
            b: self.b.iter().copied().collect(),
            c: self.c.iter().copied().collect(),
            phi: self.phi.iter().map(|(&x, &y)| [x, y]).collect(),
        }
    }

    pub fn from_json(j: &SystemJson) -> Result<Self, SystemError> {
        Ok(System {
            universe: Universe::from_json(&j.universe)?,
            a: j.a.iter().copied().collect(),
            b: j.b.iter().copied().collect(),
            c: j.c.iter().copied().collect(),
            phi: j.phi.iter().map(|&[x, y]| (x, y)).collect(),
        })
    }
}

/// x ∈ D(y, z): the component of the complement of {y, z} containing ]y, z[.
pub(crate) fn in_d(u: &Universe, x: PointId, y: PointId, z: PointId) -> bool {
    y != z && {
        let m = u.c(x, y, z);
        m != y && m != z
    }
}

/// Checks that B, C ⊆ A, that φ is a bijection B → C, and that it preserves
/// betweenness and labels (on the c-closures, as required for extension to a
/// homeomorphism).
pub fn validate_system(s: &System) -> Result<(), Diagnostic> {
    for &p in s.a.iter().chain(&s.b).chain(&s.c) {
        if !s.universe.contains(p) {
            return Err(diag("points", vec![p], "point is not in the universe"));
        }
    }
    if let Some(&p) = s.b.iter().chain(&s.c).find(|p| !s.a.contains(p)) {
        return Err(diag("subsets", vec![p], "B and C must be subsets of A"));
    }
    let dom: BTreeSet<PointId> = s.phi.keys().copied().collect();
    if dom != s.b {
        let w: Vec<PointId> = dom.symmetric_difference(&s.b).copied().collect();
        return Err(diag("bijection", w, "the domain of φ is not B"));
    }
    let mut seen = BTreeMap::new();
    for (&x, &y) in &s.phi {
        if let Some(&x2) = seen.get(&y) {
            return Err(diag("bijection", vec![x2, x, y], "φ is not injective"));
        }
        seen.insert(y, x);
    }
    let img: BTreeSet<PointId> = seen.keys().copied().collect();
    if img != s.c {
        let w: Vec<PointId> = img.symmetric_difference(&s.c).copied().collect();
        return Err(diag("bijection", w, "the image of φ is not C"));
    }
    for (&x, &y) in &s.phi {
        if s.universe.label(x).ok() != s.universe.label(y).ok() {
            return Err(diag("labels", vec![x, y], "φ changes a label"));
        }
    }
    let bs: Vec<PointId> = s.b.iter().copied().collect();
    for &z in &bs {
        for (i, &x) in bs.iter().enumerate() {
            for &y in &bs[i + 1..] {
                if s.universe.between(z, x, y) != s.universe.between(s.phi[&z], s.phi[&x], s.phi[&y]) {
                    return Err(diag(
                        "betweenness",
                        vec![z, x, y],
                        format!("B({z}; {x}, {y}) is not preserved by φ"),
                    ));
                }
            }
        }
    }
    if let Err(e) = close_map(s.universe.tree(), &s.phi) {
        return Err(diag("closure", vec![], format!("φ does not extend to the c-closure of B: {e}")));
    }
    Ok(())
}

/// A φ-orbit: a maximal chain x, φ(x), …, or a cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    /// In φ-order, starting at the chain start (or the least point of a cycle).
    pub points: Vec<PointId>,
    pub periodic: bool,
    pub period: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub orbits: Vec<Orbit>,
    /// Chain starts together with the least point of every cycle.
    pub b0: Vec<PointId>,
}

impl OrbitReport {
    pub fn orbit_of(&self, x: PointId) -> Option<&Orbit> {
        self.orbits.iter().find(|o| o.points.contains(&x))
    }
}

pub fn phi_orbits(s: &System) -> OrbitReport {
    let inv = s.phi_inv();
    let mut done: BTreeSet<PointId> = BTreeSet::new();
    let mut orbits = Vec::new();
    let all: BTreeSet<PointId> = s.b.union(&s.c).copied().collect();
    for &x in &all {
        if done.contains(&x) {
            continue;
        }
        // walk back to the chain start or around the cycle
        let mut start = x;
        let mut periodic = false;
        while let Some(&p) = inv.get(&start) {
            if p == x {
                periodic = true;
                break;
            }
            start = p;
        }
        if periodic {
            start = x; // x is the least unvisited point of its cycle
        }
        let mut pts = vec![start];
        let mut y = start;
        while let Some(&n) = s.phi.get(&y) {
            if n == start {
                break;
            }
            pts.push(n);
            y = n;
        }
        done.extend(pts.iter().copied());
        let period = periodic.then_some(pts.len());
        orbits.push(Orbit { points: pts, periodic, period });
    }
    let b0 = orbits.iter().filter(|o| s.b.contains(&o.points[0])).map(|o| o.points[0]).collect();
    OrbitReport { orbits, b0 }
}

/// A branch around a point: the points of A in one component of its complement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    /// Universe neighbour of the centre on the side of this branch.
    pub toward: PointId,
    pub points: BTreeSet<PointId>,
}

/// An orbit of branches D, φ(D), …, φⁿ⁻¹(D); `closed` when φ(φⁿ⁻¹(D)) = D.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchChain {
    pub branches: Vec<Branch>,
    pub closed: bool,
}

pub(crate) fn branches_at(s: &System, x0: PointId) -> BTreeMap<PointId, BTreeSet<PointId>> {
    let mut out: BTreeMap<PointId, BTreeSet<PointId>> = BTreeMap::new();
    for &p in &s.a {
        if p != x0 {
            let w = s.universe.tree().step_toward(x0, p).expect("points of A are materialized");
            out.entry(w).or_default().insert(p);
        }
    }
    out
}

/// The φ-orbits of branches around a fixed point x0.
pub fn branch_orbits(s: &System, x0: PointId) -> Result<Vec<BranchChain>, SystemError> {
    if s.phi.get(&x0) != Some(&x0) {
        return Err(SystemError::NotFixedPoint(x0));
    }
    let br = branches_at(s, x0);
    let key_of = |p: PointId| s.universe.tree().step_toward(x0, p).unwrap();
    let mut next: BTreeMap<PointId, PointId> = BTreeMap::new();
    for (&k, pts) in &br {
        if let Some(&b) = pts.iter().find(|p| s.b.contains(p)) {
            next.insert(k, key_of(s.phi[&b]));
        }
    }
    let has_pred: BTreeSet<PointId> = next.values().copied().collect();
    let mut done = BTreeSet::new();
    let mut chains = Vec::new();
    let starts: Vec<PointId> = br
        .keys()
        .copied()
        .filter(|k| !has_pred.contains(k))
        .chain(br.keys().copied())
        .collect();
    for k in starts {
        if done.contains(&k) {
            continue;
        }
        let mut seq = vec![k];
        done.insert(k);
        let mut cur = k;
        let mut closed = false;
        while let Some(&n) = next.get(&cur) {
            if n == k {
                closed = true;
                break;
            }
            seq.push(n);
            done.insert(n);
            cur = n;
        }
        let branches = seq
            .into_iter()
            .map(|t| Branch { toward: t, points: br.get(&t).cloned().unwrap_or_default() })
            .collect();
        chains.push(BranchChain { branches, closed });
    }
    Ok(chains)
}

/// Checks that `f` embeds `s` into `t`: an isomorphism of A onto a c-closed
/// subset of t's universe, with f(B) ⊆ E, f(C) ⊆ F and f∘φ = ψ∘f on B.
pub fn verify_embedding(s: &System, t: &System, f: &Embedding) -> Result<(), Diagnostic> {
    for &p in &s.a {
        let Some(&q) = f.get(&p) else {
            return Err(diag("embedding", vec![p], "point of A has no image"));
        };
        if !t.a.contains(&q) {
            return Err(diag("embedding", vec![p, q], "image is not in the target's A"));
        }
        if s.universe.label(p).ok() != t.universe.label(q).ok() {
            return Err(diag("embedding", vec![p, q], "label not preserved"));
        }
    }
    let img: BTreeSet<PointId> = s.a.iter().map(|p| f[p]).collect();
    if img.len() != s.a.len() {
        return Err(diag("embedding", vec![], "not injective"));
    }
    let (_, sedges) = s.universe.tree().closure_tree(&s.a);
    let (tcl, tedges) = t.universe.tree().closure_tree(&img);
    if tcl.len() != img.len() {
        return Err(diag("embedding", tcl.difference(&img).copied().collect(), "image is not c-closed"));
    }
    let norm = |(a, b): (PointId, PointId)| (a.min(b), a.max(b));
    let want: BTreeSet<(PointId, PointId)> = tedges.into_iter().map(norm).collect();
    if s.a.len() > 1 && s.universe.tree().closure_tree(&s.a).0.len() != s.a.len() {
        return Err(diag("embedding", vec![], "source A is not c-closed"));
    }
    for (a, b) in sedges {
        if !want.contains(&norm((f[&a], f[&b]))) {
            return Err(diag("embedding", vec![a, b], "betweenness not preserved"));
        }
    }
    for (&x, &y) in &s.phi {
        let (fx, fy) = (f[&x], f[&y]);
        if !t.b.contains(&fx) || !t.c.contains(&fy) {
            return Err(diag("embedding", vec![x, fx], "B or C not mapped into E or F"));
        }
        if t.phi.get(&fx) != Some(&fy) {
            return Err(diag("embedding", vec![x, y], "f∘φ differs from ψ∘f"));
        }
    }
    for &x in &s.b {
        if !t.b.contains(&f[&x]) {
            return Err(diag("embedding", vec![x], "B not mapped into E"));
        }
    }
    Ok(())
}

/// The inclusion map of `s`'s points, used when an extension grew the same
/// universe.
pub fn inclusion(s: &System) -> Embedding {
    s.a.iter().map(|&p| (p, p)).collect()
}
