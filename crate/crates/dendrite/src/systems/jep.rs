//! Joint embedding for S = {∞}, and the obstruction for finite orders.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::extend::{ensure_fixed_point, materialize, positions, Map};
use super::place::{insertion_order, place};
use super::{validate_system, verify_embedding, Embedding, System, SystemError};
use crate::iso::close_map;
use crate::label::{Label, OrderSet, PointId};
use crate::universe::Universe;

#[derive(Clone, Debug)]
pub struct JointEmbedding {
    pub system: System,
    pub f_s: Embedding,
    pub f_t: Embedding,
}

/// A system and a target with one fixed point each, glued so that the
/// segment between the two fixed points is fixed pointwise: t's points go
/// into a new component at s's fixed point.
pub fn joint_embed(s: &System, t: &System) -> Result<JointEmbedding, SystemError> {
    validate_system(s).map_err(SystemError::Invalid)?;
    validate_system(t).map_err(SystemError::Invalid)?;
    if !s.universe.order_set().is_infinite_only() || !t.universe.order_set().is_infinite_only() {
        return Err(SystemError::FiniteOrderUnsupported);
    }
    let s1 = ensure_fixed_point(s)?;
    let t1 = ensure_fixed_point(t)?;
    let x = *s1.phi.iter().find(|(a, b)| a == b).unwrap().0;
    let y = *t1.phi.iter().find(|(a, b)| a == b).unwrap().0;
    let mut m = s1.universe.clone();
    let jy = m.add_branch_labeled(x, t1.universe.label(y)?)?;
    let mut j: Map = Map::from([(y, jy)]);
    let order = insertion_order(&t1.universe, &BTreeSet::from([y]), &t1.a);
    let rel = BTreeSet::new();
    for (q, kind) in order {
        place(&mut m, &t1.universe, &rel, &mut j, q, kind, 0)?;
    }
    let mut phi = s1.phi.clone();
    phi.extend(t1.phi.iter().map(|(a, b)| (j[a], j[b])));
    let phi = close_map(m.tree(), &phi)?;
    let b: BTreeSet<PointId> = phi.keys().copied().collect();
    let c: BTreeSet<PointId> = phi.values().copied().collect();
    let mut a: BTreeSet<PointId> = s1.a.iter().copied().chain(j.values().copied()).collect();
    a.extend(b.iter().chain(c.iter()).copied());
    let a = m.cl(&a);
    let system = System { universe: m, a, b, c, phi };
    let f_s: Embedding = s.a.iter().map(|&p| (p, p)).collect();
    let f_t: Embedding = t.a.iter().map(|p| (*p, j[p])).collect();
    verify_embedding(s, &system, &f_s).map_err(SystemError::Invalid)?;
    verify_embedding(t, &system, &f_t).map_err(SystemError::Invalid)?;
    Ok(JointEmbedding { system, f_s, f_t })
}

/// Two systems over S = {n} with no joint embedding: a rotation of the n
/// components at a point x of order n, and the identity on two points.
#[derive(Clone, Debug)]
pub struct ObstructionWitness {
    pub n: u32,
    pub rotation: System,
    pub identity: System,
    /// the unique fixed point of every extension of the rotation
    pub centre: PointId,
    /// no placement of two distinct fixed points was found
    pub conflict: bool,
    pub placements_tried: usize,
}

#[derive(Serialize, Deserialize)]
struct WitnessJson {
    n: u32,
    centre: PointId,
    conflict: bool,
    placements_tried: usize,
}

impl ObstructionWitness {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "summary": WitnessJson {
                n: self.n,
                centre: self.centre,
                conflict: self.conflict,
                placements_tried: self.placements_tried,
            },
            "rotation": self.rotation.to_json(),
            "identity": self.identity.to_json(),
        })
    }
}

pub fn jep_obstruction(n: u32) -> ObstructionWitness {
    assert!(n >= 3, "branch orders start at 3");
    let s = OrderSet::new([n], false);
    let mut u = Universe::new(s.clone());
    let x = u.root();
    let xs: Vec<PointId> = (0..n).map(|_| u.add_branch(x).expect("x has n free components")).collect();
    let mut phi = Map::from([(x, x)]);
    for i in 0..xs.len() {
        phi.insert(xs[i], xs[(i + 1) % xs.len()]);
    }
    let rotation = System::from_map(u, phi);
    let mut v = Universe::new(s);
    let p = v.root();
    let q = v.add_branch(p).expect("room at the root");
    let identity = System::identity(v, [p, q]);
    let (conflict, placements_tried) = two_fixed_points_impossible(&rotation);
    ObstructionWitness { n, rotation, identity, centre: x, conflict, placements_tried }
}

/// Tries every placement of two distinct points p, q relative to the tree
/// spanned by the system (existing vertices, points inside edges, new
/// leaves), each placed relative to what came before, and reports whether
/// none of them extends φ with p and q fixed.
pub(crate) fn two_fixed_points_impossible(s: &System) -> (bool, usize) {
    let mut tried = 0;
    let hull = s.a.clone();
    let from = *hull.iter().next().unwrap();
    for pos_p in positions(&s.universe, &hull, from, &|_| true) {
        let mut u1 = s.universe.clone();
        let Some(p) = materialize(&mut u1, pos_p) else { continue };
        let mut hull2 = hull.clone();
        hull2.insert(p);
        for pos_q in positions(&u1, &hull2, from, &|_| true) {
            let mut u2 = u1.clone();
            let Some(q) = materialize(&mut u2, pos_q) else { continue };
            if p == q {
                continue;
            }
            tried += 1;
            let mut m = s.phi.clone();
            let ok = [p, q].iter().all(|&z| m.get(&z).is_none_or(|&w| w == z));
            if !ok {
                continue;
            }
            m.insert(p, p);
            m.insert(q, q);
            if close_map(u2.tree(), &m).is_ok() && labels_fit(&u2, p, q) {
                return (false, tried);
            }
        }
    }
    (true, tried)
}

fn labels_fit(u: &Universe, p: PointId, q: PointId) -> bool {
    [p, q].iter().all(|&z| matches!(u.label(z), Ok(Label::Finite(_)) | Ok(Label::Infinite)))
}
