//! Seeded random universes and systems for property runs and the CLI.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::System;
use crate::iso::PartialIso;
use crate::label::{OrderSet, PointId};
use crate::universe::Universe;

/// A universe over S = {∞} grown by `n` random insertions.
pub fn random_universe(seed: u64, n: usize) -> Universe {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grow(&mut rng, Universe::new(OrderSet::infinite()), n)
}

fn grow(rng: &mut ChaCha8Rng, mut u: Universe, n: usize) -> Universe {
    let l = u.order_set().default_label();
    for _ in 0..n {
        let pts: Vec<PointId> = u.points().collect();
        let p = *pts.choose(rng).unwrap();
        let q = *pts.choose(rng).unwrap();
        if p != q && rng.gen_bool(0.4) {
            u.add_between(p, q, l).unwrap();
        } else {
            u.add_branch(p).unwrap();
        }
    }
    u
}

/// A random valid system with |A| ≤ `max_points` (or close to it when the
/// first attempt overshoots). Images are a mix of existing points, which
/// produce fixed points, cycles and collisions with the domain, and generic
/// new points.
pub fn random_system(seed: u64, max_points: usize) -> System {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<System> = None;
    for _ in 0..20 {
        let n = rng.gen_range(2..=max_points.max(2));
        let mut u = grow(&mut rng, Universe::new(OrderSet::infinite()), n);
        let mut iso = PartialIso::new().with_seed(rng.gen());
        let steps = rng.gen_range(1..=4);
        for _ in 0..steps {
            let pts: Vec<PointId> = u.points().collect();
            let x = *pts.choose(&mut rng).unwrap();
            if iso.get(x).is_some() {
                continue;
            }
            if rng.gen_bool(0.5) {
                let y = *pts.choose(&mut rng).unwrap();
                if let Ok(next) = iso.extend_with(&u, [(x, y)]) {
                    iso = next;
                    continue;
                }
            }
            let _ = iso.forward(&mut u, x);
        }
        if iso.is_empty() {
            continue;
        }
        let s = System::from_map(u, iso.pairs().clone());
        if s.a.len() <= max_points {
            return s;
        }
        if best.as_ref().is_none_or(|b| s.a.len() < b.a.len()) {
            best = Some(s);
        }
    }
    best.expect("some attempt produces a nonempty map")
}

/// A random extension of `s` in the same universe: a few extra pairs on top
/// of φ, closed, with A enlarged accordingly. The inclusion embeds `s`.
pub fn random_extension(s: &System, seed: u64, extra: usize) -> System {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = s.universe.clone();
    let mut iso = PartialIso::from_pairs(&u, s.phi.iter().map(|(&a, &b)| (a, b)))
        .expect("valid system")
        .with_seed(rng.gen());
    let l = u.order_set().default_label();
    for _ in 0..extra {
        let pts: Vec<PointId> = u.points().collect();
        let p = *pts.choose(&mut rng).unwrap();
        let x = if rng.gen_bool(0.5) {
            u.add_branch(p).unwrap()
        } else {
            let q = *pts.choose(&mut rng).unwrap();
            if p == q {
                continue;
            }
            u.add_between(p, q, l).unwrap()
        };
        if rng.gen_bool(0.3) {
            if let Ok(next) = iso.extend_with(&u, [(x, x)]) {
                iso = next;
                continue;
            }
        }
        if rng.gen_bool(0.5) {
            let _ = iso.forward(&mut u, x);
        } else {
            let _ = iso.backward(&mut u, x);
        }
    }
    let mut t = System::from_map(u, iso.pairs().clone());
    t.a = t.universe.cl(&t.a.union(&s.a).copied().collect());
    t
}
