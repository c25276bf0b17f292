//! Converging and convex orders checked straight from their definitions.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dendrite::orders::{decode, random_component_orders, CloWitness};
use dendrite::systems::random_universe;
use dendrite::{EndId, FiniteTree, PointId, Target, Universe};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::trees::{between, median, path};

fn ranks(order: &[PointId]) -> BTreeMap<PointId, usize> {
    order.iter().enumerate().map(|(i, &p)| (p, i)).collect()
}

pub fn converging(t: &FiniteTree, order: &[PointId]) -> bool {
    let r = ranks(order);
    for &x in order {
        for &y in order {
            for &z in order {
                if y != x && y != z && between(t, y, x, z) && r[&y] > r[&x] && r[&y] > r[&z] {
                    return false;
                }
            }
        }
    }
    true
}

/// a ∈ [root, b] ⟹ a ⪯ b.
pub fn root_compatible(t: &FiniteTree, order: &[PointId], root: PointId) -> bool {
    let r = ranks(order);
    order.iter().all(|&a| order.iter().all(|&b| !between(t, a, root, b) || r[&a] <= r[&b]))
}

pub fn convex(t: &FiniteTree, order: &[PointId], root: PointId) -> bool {
    let r = ranks(order);
    for &a in order {
        for &b in order {
            if r[&a] >= r[&b] {
                continue;
            }
            let c = median(t, a, b, root);
            for &a2 in order {
                for &b2 in order {
                    let on_a = a2 != c && between(t, a2, a, c);
                    let on_b = b2 != c && between(t, b2, b, c);
                    if on_a && on_b && r[&a2] > r[&b2] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The neighbour of c on the way to x.
pub fn toward(t: &FiniteTree, c: PointId, x: PointId) -> PointId {
    path(t, x, c)[1]
}

/// A universe of at most 15 points with an end.
pub fn rooted(seed: u64) -> (Universe, EndId, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = random_universe(seed, rng.gen_range(0..14));
    let pts: Vec<PointId> = u.points().collect();
    let xi = u.register_end(*pts.choose(&mut rng).unwrap()).unwrap();
    if rng.gen_bool(0.3) {
        u.refine_end(xi).unwrap();
    }
    (u, xi, rng)
}

pub fn random_subset(u: &Universe, w: &CloWitness, rng: &mut ChaCha8Rng) -> BTreeSet<PointId> {
    let mut pts: Vec<PointId> = w.order.clone();
    pts.shuffle(rng);
    pts.truncate(rng.gen_range(1..=pts.len()));
    u.cl(&pts.into_iter().collect())
}

pub fn clo_pair(seed: u64) -> (Universe, CloWitness, CloWitness, BTreeSet<PointId>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = random_universe(seed, rng.gen_range(0..8));
    let pts: Vec<PointId> = u.points().collect();
    let root = |u: &mut Universe, rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.5) {
            Target::Point(*pts.choose(rng).unwrap())
        } else {
            Target::End(u.register_end(*pts.choose(rng).unwrap()).unwrap())
        }
    };
    let t1 = root(&mut u, &mut rng);
    let t2 = if matches!(t1, Target::End(_)) && rng.gen_bool(0.5) { t1 } else { root(&mut u, &mut rng) };
    let build = |t: Target, rng: &mut ChaCha8Rng| {
        let comps = random_component_orders(&u, t, rng).unwrap();
        let mut all: Vec<PointId> = u.points().collect();
        all.shuffle(rng);
        all.truncate(rng.gen_range(1..=all.len()));
        decode(&u, t, &comps, &u.cl(&all.into_iter().collect())).unwrap()
    };
    let w1 = build(t1, &mut rng);
    let w2 = build(t2, &mut rng);
    let f = random_subset(&u, &w1, &mut rng);
    (u, w1, w2, f)
}

