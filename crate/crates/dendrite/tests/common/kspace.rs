//! Random universes and points of K, and the alternating sequence of ends.

use dendrite::boundary::*;
use dendrite::label::Label;
use dendrite::orders::branch_points;
use dendrite::{EndId, OrderSet, PointId, Universe};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn universe(rng: &mut ChaCha8Rng) -> Universe {
    let mut u = Universe::new(OrderSet::infinite());
    for _ in 0..rng.gen_range(3..14) {
        let pts: Vec<PointId> = u.points().collect();
        let p = *pts.choose(rng).unwrap();
        let q = *pts.choose(rng).unwrap();
        let l = if rng.gen_bool(0.3) { Label::Regular } else { Label::Infinite };
        if p != q && rng.gen_bool(0.5) {
            let _ = u.add_between(p, q, l);
        } else if u.label(p).unwrap().is_branch() {
            u.add_branch(p).unwrap();
        }
    }
    let br: Vec<PointId> = branch_points(&u).into_iter().collect();
    for _ in 0..rng.gen_range(0..3) {
        u.register_end(*br.choose(rng).unwrap()).unwrap();
    }
    u
}

pub fn random_kpoint(u: &Universe, rng: &mut ChaCha8Rng) -> KPoint {
    loop {
        let br: Vec<PointId> = branch_points(u).into_iter().collect();
        let regular: Vec<PointId> = u.points().filter(|p| !br.contains(p)).collect();
        let ends: Vec<EndId> = u.ends().map(|(e, _)| e).collect();
        let k = match rng.gen_range(0..4) {
            0 if !regular.is_empty() => kpoint_of_regular(u, *regular.choose(rng).unwrap()),
            1 if !ends.is_empty() => of_end(u, *ends.choose(rng).unwrap()),
            2 => {
                let b = *br.choose(rng).unwrap();
                let n = rng.gen_range(0..u.components_at(b).unwrap().len());
                kpoint_cn(u, b, Some(n))
            }
            3 => kpoint_cn(u, *br.choose(rng).unwrap(), None),
            _ => continue,
        };
        return k.unwrap();
    }
}

/// Growth that adds branch points and ends only.
pub fn grow_branching(u: &mut Universe, rng: &mut ChaCha8Rng) {
    let br: Vec<PointId> = branch_points(u).into_iter().collect();
    let pts: Vec<PointId> = u.points().collect();
    match rng.gen_range(0..4) {
        0 => {
            u.add_branch(*br.choose(rng).unwrap()).unwrap();
        }
        1 => {
            let (p, q) = (*pts.choose(rng).unwrap(), *pts.choose(rng).unwrap());
            if p != q {
                u.add_between(p, q, Label::Infinite).unwrap();
            }
        }
        2 => {
            u.register_end(*br.choose(rng).unwrap()).unwrap();
        }
        _ => {
            let ends: Vec<EndId> = u.ends().map(|(e, _)| e).collect();
            if let Some(&e) = ends.choose(rng) {
                u.refine_end(e).unwrap();
            }
        }
    }
}

pub fn alternating(rounds: usize) -> (Universe, Vec<EndId>) {
    let mut u = Universe::new(OrderSet::infinite());
    let b = u.root();
    let mut tips = [u.add_branch(b).unwrap(), u.add_branch(b).unwrap()];
    let mut seq = Vec::new();
    for i in 0..rounds {
        let side = i % 2;
        let p = u.add_between(b, tips[side], Label::Infinite).unwrap();
        tips[side] = p;
        seq.push(u.register_end(p).unwrap());
    }
    (u, seq)
}

