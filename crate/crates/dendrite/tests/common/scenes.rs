//! Automorphisms with known dynamics, and growth helpers.

use dendrite::dynamics::*;
use dendrite::label::Label;
use dendrite::{EndId, OrderSet, PointId, Target, Universe};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random growth that respects finite orders.
pub fn grow(u: &mut Universe, rng: &mut ChaCha8Rng, n: usize) {
    let labels = {
        let mut l = u.order_set().labels();
        l.push(Label::Regular);
        l
    };
    let mut made = 0;
    while made < n {
        let pts: Vec<PointId> = u.points().collect();
        let p = *pts.choose(rng).unwrap();
        let q = *pts.choose(rng).unwrap();
        let ok = if p != q && rng.gen_bool(0.5) {
            u.add_between(p, q, *labels.choose(rng).unwrap()).is_ok()
        } else {
            u.add_branch(p).is_ok()
        };
        made += usize::from(ok);
    }
}

pub struct Scene {
    pub u: Universe,
    pub g: LazyAutomorphism,
    pub gap: (PointId, PointId),
    pub ray: (PointId, EndId),
}

/// A 3-cycle of branches at the root, a translation on D(y, z) toward z, a
/// translation on the component of w containing an end, toward w, and the
/// identity everywhere else.
pub fn scene(seed: u64) -> Scene {
    let mut u = Universe::new(OrderSet::infinite());
    let o = u.root();
    let reps: Vec<PointId> = (0..3).map(|_| u.add_branch(o).unwrap()).collect();
    let y = u.add_branch(o).unwrap();
    let z = u.add_branch(y).unwrap();
    let w = u.add_branch(o).unwrap();
    let e = u.register_end(w).unwrap();
    u.refine_end(e).unwrap();
    let rot = rotation(&mut u, o, &reps, seed).unwrap();
    let t1 = translation(&mut u, y, Target::Point(z), true, seed + 1).unwrap();
    let t2 = translation(&mut u, w, Target::End(e), false, seed + 2).unwrap();
    let pieces = vec![
        (Support::new(reps.iter().map(|&r| Part::at(o, r)).collect()), rot),
        (axis_support(&mut u, y, Target::Point(z)).unwrap(), t1),
        (axis_support(&mut u, w, Target::End(e)).unwrap(), t2),
    ];
    let g = patchwork(&mut u, pieces).unwrap();
    Scene { u, g, gap: (y, z), ray: (w, e) }
}

impl Scene {
    pub fn truth(&self, x: PointId) -> DynTag {
        let u = &self.u;
        let (y, z) = self.gap;
        let (w, e) = self.ray;
        let tip = u.end_anchor(e).unwrap();
        let in_gap = Part::gap(y, z, u.path(y, z).unwrap()[1]).contains(u, x).unwrap();
        let in_ray = Part::at(w, Target::End(e)).contains(u, x).unwrap();
        if in_gap {
            if u.between(x, y, z) {
                DynTag::AustroborealInterior
            } else {
                DynTag::DPart
            }
        } else if in_ray {
            if u.between(x, w, tip) {
                DynTag::AustroborealInterior
            } else {
                DynTag::DPart
            }
        } else {
            DynTag::KPart
        }
    }
}

pub fn sample(u: &Universe, rng: &mut ChaCha8Rng, n: usize) -> Vec<PointId> {
    let mut pts: Vec<PointId> = u.points().collect();
    pts.shuffle(rng);
    pts.truncate(n);
    pts
}

