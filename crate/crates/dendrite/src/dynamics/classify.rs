//! Deciding from five orbit points whether x lies inside an austro-boreal
//! arc, in D(g), or in K(g).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{DynError, LazyAutomorphism};
use crate::label::PointId;
use crate::universe::Universe;

/// How many points of [x, g(x)] are tried as fixed-point witnesses.
pub const WITNESS_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DynTag {
    AustroborealInterior,
    DPart,
    KPart,
}

impl DynTag {
    /// AustroborealInterior and DPart both lie in D(g).
    pub fn in_d(self) -> bool {
        self != DynTag::KPart
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynClass {
    pub point: PointId,
    pub tag: DynTag,
    /// x, g(x), …, g⁴(x)
    pub orbit: Vec<PointId>,
    /// c(gᵏx, gᵏ⁺¹x, gᵏ⁺²x) for k = 0, 1, 2
    pub centers: Vec<PointId>,
    /// a fixed point on [x, g(x)] when the tag is KPart and one was found
    pub fixed_witness: Option<PointId>,
    /// KPart was decided by excluding the other two cases only
    pub by_exclusion: bool,
}

pub fn classify_point(g: &LazyAutomorphism, u: &mut Universe, x: PointId) -> Result<DynClass, DynError> {
    let orbit = g.orbit(u, x, 4)?;
    let centers: Vec<PointId> = (0..3).map(|k| u.c(orbit[k], orbit[k + 1], orbit[k + 2])).collect();
    let tag = if u.strictly_between(orbit[1], orbit[0], orbit[2]) {
        DynTag::AustroborealInterior
    } else if u.strictly_between(centers[1], centers[0], centers[2]) {
        DynTag::DPart
    } else {
        DynTag::KPart
    };
    let mut fixed_witness = None;
    if tag == DynTag::KPart {
        // projections of known fixed points first, then committed points of
        // the arc, then the rest of it
        let (a, b) = (orbit[0], orbit[1]);
        let mut cands: Vec<PointId> = g.fixed_hints().into_iter().map(|f| u.c(a, b, f)).collect();
        let known = g.answered_points();
        let (on, off): (Vec<PointId>, Vec<PointId>) = u.path(a, b)?.into_iter().partition(|p| known.contains(p));
        cands.extend(on);
        cands.extend(off);
        let mut seen = BTreeSet::new();
        cands.retain(|p| seen.insert(*p));
        for p in cands.into_iter().take(WITNESS_CAP) {
            if g.apply(u, p)? == p {
                fixed_witness = Some(p);
                break;
            }
        }
    }
    let by_exclusion = tag == DynTag::KPart && fixed_witness.is_none();
    Ok(DynClass { point: x, tag, orbit, centers, fixed_witness, by_exclusion })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KdReport {
    pub n: u32,
    pub checked: usize,
    /// points in D(g) whose class for gⁿ is KPart
    pub violations: Vec<PointId>,
    /// points in K(g) that lie in D(gⁿ)
    pub k_to_d: usize,
}

/// D(g) ⊂ D(gⁿ) on the sample.
pub fn check_kd_monotone(g: &LazyAutomorphism, u: &mut Universe, n: u32, sample: &[PointId]) -> Result<KdReport, DynError> {
    let gn = g.power(i64::from(n));
    let mut r = KdReport { n, ..KdReport::default() };
    for &x in sample {
        let a = classify_point(g, u, x)?.tag.in_d();
        let b = classify_point(&gn, u, x)?.tag.in_d();
        r.checked += 1;
        if a && !b {
            r.violations.push(x);
        }
        if !a && b {
            r.k_to_d += 1;
        }
    }
    Ok(r)
}

/// For x in K(g) not fixed: whether a fixed point separates x from g(x),
/// so that the component of x in K(g) ∖ Fix(g) is moved off itself.
pub fn component_rotation_check(g: &LazyAutomorphism, u: &mut Universe, x: PointId) -> Result<bool, DynError> {
    if g.apply(u, x)? == x {
        return Err(DynError::PointIsFixed(x));
    }
    let c = classify_point(g, u, x)?;
    if c.tag != DynTag::KPart {
        return Err(DynError::NotKPart(x));
    }
    Ok(c.fixed_witness.is_some())
}

/// The universe tree in DOT, classified points filled by tag.
pub fn dot_export(u: &Universe, classes: &[DynClass]) -> String {
    let tags: BTreeMap<PointId, DynTag> = classes.iter().map(|c| (c.point, c.tag)).collect();
    let mut s = String::from("graph dynamics {\n  node [shape=circle, style=filled, fillcolor=white];\n");
    for v in u.points() {
        let colour = match tags.get(&v) {
            Some(DynTag::AustroborealInterior) => "orange",
            Some(DynTag::DPart) => "gold",
            Some(DynTag::KPart) => "lightblue",
            None => "white",
        };
        let _ = writeln!(s, "  p{} [label=\"{}\", fillcolor={}];", v.0, v.0, colour);
    }
    for (a, b) in u.tree().edges() {
        let _ = writeln!(s, "  p{} -- p{};", a.0, b.0);
    }
    s.push_str("}\n");
    s
}
