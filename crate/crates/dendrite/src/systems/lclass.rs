//! Membership in the class 𝓛, condition by condition.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{diag, in_d, phi_orbits, validate_system, Diagnostic, OrbitReport, System};
use crate::label::PointId;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub id: String,
    pub ok: bool,
    pub diagnostic: Option<Diagnostic>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LReport {
    pub in_l: bool,
    pub b0: Vec<PointId>,
    pub conditions: Vec<ConditionResult>,
}

impl LReport {
    pub fn first_failure(&self) -> Option<&Diagnostic> {
        self.conditions.iter().find_map(|c| c.diagnostic.as_ref())
    }
}

pub(crate) struct Ctx<'a> {
    pub s: &'a System,
    pub orbits: OrbitReport,
    pub periodic: BTreeSet<PointId>,
}

impl<'a> Ctx<'a> {
    pub fn new(s: &'a System) -> Self {
        let orbits = phi_orbits(s);
        let periodic = orbits.orbits.iter().filter(|o| o.periodic).flat_map(|o| o.points.iter().copied()).collect();
        Ctx { s, orbits, periodic }
    }

    fn strictly_between(&self, z: PointId, x: PointId, y: PointId) -> bool {
        self.s.universe.strictly_between(z, x, y)
    }

    /// φⁿ(x) ∈ ]x, φ²ⁿ(x)[.
    pub fn austro(&self, x: PointId, n: usize) -> bool {
        match (self.s.iterate(x, n), self.s.iterate(x, 2 * n)) {
            (Some(a), Some(b)) => self.strictly_between(a, x, b),
            _ => false,
        }
    }

    pub fn min_austro(&self, x: PointId) -> Option<usize> {
        (1..=self.s.phi.len()).find(|&n| self.austro(x, n))
    }

    pub fn nested_centres(&self, x: PointId, n: usize) -> Option<[PointId; 3]> {
        let it: Vec<PointId> = (0..=4).map(|j| self.s.iterate(x, j * n)).collect::<Option<_>>()?;
        let u = &self.s.universe;
        let c1 = u.c(it[0], it[1], it[2]);
        let c2 = u.c(it[1], it[2], it[3]);
        let c3 = u.c(it[2], it[3], it[4]);
        self.strictly_between(c2, c1, c3).then_some([c1, c2, c3])
    }

    /// Pairs of distinct periodic points y < z with no periodic point of B in D(y, z).
    pub fn corridors(&self) -> Vec<(PointId, PointId)> {
        let per: Vec<PointId> = self.periodic.iter().copied().collect();
        let mut out = Vec::new();
        for (i, &y) in per.iter().enumerate() {
            for &z in &per[i + 1..] {
                if !per.iter().any(|&w| in_d(&self.s.universe, w, y, z)) {
                    out.push((y, z));
                }
            }
        }
        out
    }

    pub fn orbit_size(&self, x: PointId) -> usize {
        self.orbits.orbit_of(x).map_or(1, |o| o.points.len())
    }
}

fn result(id: &str, d: Option<Diagnostic>) -> ConditionResult {
    ConditionResult { id: id.into(), ok: d.is_none(), diagnostic: d }
}

/// Evaluates every condition defining 𝓛. B₀ is taken to be the chain starts
/// together with one point of each periodic orbit; every other choice
/// satisfying condition (1) contains the chain starts and so can only add
/// constraints.
pub fn is_in_l(s: &System) -> LReport {
    let mut conditions = Vec::new();
    if let Err(d) = validate_system(s) {
        conditions.push(result("valid", Some(d)));
        return LReport { in_l: false, b0: vec![], conditions };
    }
    let u = &s.universe;
    let mut pos = None;
    for (name, set) in [("A", &s.a), ("B", &s.b), ("C", &s.c)] {
        let cl = u.cl(set);
        if cl.len() != set.len() {
            let w: Vec<PointId> = cl.difference(set).copied().collect();
            pos = Some(diag("positive-type", w, format!("{name} is not c-closed")));
            break;
        }
    }
    conditions.push(result("positive-type", pos));
    let ctx = Ctx::new(s);
    let b0 = ctx.orbits.b0.clone();
    conditions.push(result("1", None));

    // (2)
    let mut d2 = None;
    for &x in &b0 {
        if ctx.periodic.contains(&x) {
            continue;
        }
        let len = ctx.orbit_size(x);
        if !(1..=len / 4).any(|n| ctx.nested_centres(x, n).is_some()) {
            let w: Vec<PointId> = (0..5).filter_map(|j| s.iterate(x, j)).collect();
            d2 = Some(diag("2", w, format!("{x} is neither periodic nor has nested orbit centres")));
            break;
        }
    }
    conditions.push(result("2", d2));

    // (3)
    let corridors = ctx.corridors();
    let mut d3 = None;
    for &x in &s.b {
        if ctx.periodic.contains(&x) {
            continue;
        }
        if !corridors.iter().any(|&(y, z)| in_d(u, x, y, z)) {
            d3 = Some(diag("3", vec![x], format!("non-periodic {x} lies in no corridor between periodic points")));
            break;
        }
    }
    conditions.push(result("3", d3));

    // (4)
    conditions.push(result("4", condition4(&ctx, &b0)));

    // (5)
    let mut d5 = None;
    'outer: for &x in &s.b {
        if ctx.periodic.contains(&x) {
            continue;
        }
        for &(y, z) in &corridors {
            if in_d(u, x, y, z) {
                let p = u.c(x, y, z);
                if ctx.orbit_size(x) != ctx.orbit_size(p) {
                    d5 = Some(diag(
                        "5",
                        vec![x, p, y, z],
                        format!(
                            "orbit of {x} has {} points but its projection {p} has {}",
                            ctx.orbit_size(x),
                            ctx.orbit_size(p)
                        ),
                    ));
                    break 'outer;
                }
            }
        }
    }
    conditions.push(result("5", d5));

    // (6)
    let bc: BTreeSet<PointId> = s.b.union(&s.c).copied().collect();
    let cl = u.cl(&bc);
    let d6 = (cl != s.a).then(|| {
        let w: Vec<PointId> = cl.symmetric_difference(&s.a).copied().collect();
        diag("6", w, "A is not the c-closure of B ∪ C")
    });
    conditions.push(result("6", d6));

    let in_l = conditions.iter().all(|c| c.ok);
    LReport { in_l, b0, conditions }
}

fn condition4(ctx: &Ctx, b0: &[PointId]) -> Option<Diagnostic> {
    let s = ctx.s;
    let u = &s.universe;
    let ab: Vec<(PointId, usize)> = b0.iter().filter_map(|&x| ctx.min_austro(x).map(|n| (x, n))).collect();
    let power_orbit = |x: PointId, n: usize| -> Vec<PointId> {
        let mut v = vec![x];
        while let Some(y) = s.iterate(*v.last().unwrap(), n) {
            v.push(y);
        }
        v
    };
    let chain = |x: PointId| -> Vec<PointId> { ctx.orbits.orbit_of(x).map(|o| o.points.clone()).unwrap_or_default() };
    for (i, &(x, n)) in ab.iter().enumerate() {
        for &(y, m) in &ab[i..] {
            let ox = power_orbit(x, n);
            let oy = power_orbit(y, m);
            let inside = |p: &[PointId], q: &[PointId]| {
                p.iter().any(|&z| {
                    q.iter().enumerate().any(|(a, &q1)| q[a + 1..].iter().any(|&q2| z != q1 && z != q2 && u.between(z, q1, q2)))
                })
            };
            let separated = x != y && !inside(&ox, &oy) && !inside(&oy, &ox);
            if separated {
                if !ctx.periodic.iter().any(|&z| u.between(z, x, y)) {
                    return Some(diag("4", vec![x, y], format!("separated orbits of {x} and {y} with no periodic point between")));
                }
                continue;
            }
            let (cx, cy) = (chain(x), chain(y));
            let (kx, ky) = (cx.len() - 1, cy.len() - 1);
            let l = n.min(m);
            let interleaved = s.iterate(x, l).is_some_and(|xl| u.between(y, x, xl))
                || s.iterate(y, l).is_some_and(|yl| u.between(x, y, yl));
            if kx != ky || !interleaved || kx % l != 0 {
                return Some(diag(
                    "4",
                    vec![x, y],
                    format!("intertwined orbits of {x} and {y}: lengths {kx}, {ky}, step {l}, interleaved {interleaved}"),
                ));
            }
        }
    }
    None
}
