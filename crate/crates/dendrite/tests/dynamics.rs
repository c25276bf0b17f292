mod common;

use std::collections::BTreeSet;

use common::scenes::{grow, sample, scene};
use dendrite::dynamics::*;
use dendrite::label::Label;
use dendrite::systems::{extend_to_l, inclusion, random_extension, random_system, realize, verify_embedding, System};
use dendrite::PointId;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn classifier_matches_constructed_ground_truth() {
    for seed in 0..4 {
        let mut sc = scene(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        grow(&mut sc.u, &mut rng, 150);
        let pts = sample(&sc.u, &mut rng, 100);
        let mut seen = BTreeSet::new();
        for &x in &pts {
            let c = classify_point(&sc.g, &mut sc.u, x).unwrap();
            assert_eq!(c.tag, sc.truth(x), "seed {seed} point {x}");
            seen.insert(c.tag);
            let gx = sc.g.apply(&mut sc.u, x).unwrap();
            assert_eq!(classify_point(&sc.g, &mut sc.u, gx).unwrap().tag, c.tag);
            if c.tag == DynTag::KPart {
                assert!(c.fixed_witness.is_some());
                if gx != x {
                    assert!(component_rotation_check(&sc.g, &mut sc.u, x).unwrap());
                }
            }
            if c.tag == DynTag::AustroborealInterior {
                for n in 2..=3 {
                    let cn = classify_point(&sc.g.power(n), &mut sc.u, x).unwrap();
                    assert_eq!(cn.tag, DynTag::AustroborealInterior);
                }
            }
        }
        assert_eq!(seen.len(), 3, "sample should meet all three classes");
        for n in [2, 3] {
            let r = check_kd_monotone(&sc.g, &mut sc.u, n, &pts).unwrap();
            assert!(r.violations.is_empty());
        }
    }
}

#[test]
fn d3_example_matches_its_classification_table() {
    let mut ex = build_example_d3();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    grow(&mut ex.universe, &mut rng, 60);
    let u = &mut ex.universe;
    assert_eq!(ex.g.apply(u, ex.x).unwrap(), ex.x);
    let c1 = Part::at(ex.x, ex.c1);
    let c2 = Part::at(ex.x, ex.c2);
    let g2 = ex.g.power(2);
    let pts: Vec<PointId> = u.points().collect();
    for &p in &pts {
        assert_eq!(classify_point(&ex.g, u, p).unwrap().tag, DynTag::KPart, "{p}");
        let t2 = classify_point(&g2, u, p).unwrap().tag;
        assert_eq!(t2.in_d(), p != ex.x, "{p}");
        if c1.contains(u, p).unwrap() {
            let gp = ex.g.apply(u, p).unwrap();
            assert!(c2.contains(u, gp).unwrap());
        }
    }
    let r = check_kd_monotone(&ex.g, u, 2, &pts).unwrap();
    assert!(r.violations.is_empty());
    assert_eq!(r.k_to_d, pts.len() - 1);
}

#[test]
fn d3_example_stays_inside_d3() {
    let mut ex = build_example_d3();
    let g2 = ex.g.power(2);
    let mut p = ex.c1;
    for _ in 0..8 {
        p = g2.apply(&mut ex.universe, p).unwrap();
    }
    for v in ex.universe.points() {
        let l = ex.universe.label(v).unwrap();
        assert!(matches!(l, Label::Regular | Label::Finite(3)));
        assert!(ex.universe.tree().degree(v) <= l.degree_cap().unwrap());
    }
}

fn l_system(seed: u64) -> System {
    extend_to_l(&random_system(seed, 6)).unwrap().0
}

#[test]
fn realized_systems_restrict_to_phi() {
    for seed in 0..20 {
        let s = l_system(seed);
        let g = realize(&s, seed).unwrap();
        let mut u = s.universe.clone();
        for (&b, &c) in &s.phi {
            assert_eq!(g.apply(&mut u, b).unwrap(), c);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        grow(&mut u, &mut rng, 6);
        let mut pts = s.b.clone();
        pts.extend(sample(&u, &mut rng, 4));
        let t = g.restrict(&mut u, &pts).unwrap();
        verify_embedding(&s, &t, &inclusion(&s)).unwrap();
    }
}

#[test]
fn realized_systems_obey_kd_and_rotation() {
    for seed in 0..15 {
        let s = l_system(seed);
        let g = realize(&s, seed).unwrap();
        let mut u = s.universe.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        grow(&mut u, &mut rng, 40);
        let pts = sample(&u, &mut rng, 100);
        for n in [2, 3] {
            assert!(check_kd_monotone(&g, &mut u, n, &pts).unwrap().violations.is_empty());
        }
        for &x in &pts {
            let c = classify_point(&g, &mut u, x).unwrap();
            if c.tag == DynTag::KPart && c.orbit[1] != x {
                assert!(component_rotation_check(&g, &mut u, x).unwrap(), "seed {seed} point {x}");
            }
        }
    }
}

#[test]
fn base_points_in_corridors_are_in_d() {
    let mut hits = 0;
    for seed in 0..40 {
        let s = l_system(seed);
        let g = realize(&s, seed).unwrap();
        let mut u = s.universe.clone();
        for &x in &s.b {
            let Some(x4) = s.iterate(x, 4) else { continue };
            let it: Vec<PointId> = (0..=4).map(|k| s.iterate(x, k).unwrap()).collect();
            let cs: Vec<PointId> = (0..3).map(|k| u.c(it[k], it[k + 1], it[k + 2])).collect();
            if !u.strictly_between(cs[1], cs[0], cs[2]) {
                continue;
            }
            hits += 1;
            let c = classify_point(&g, &mut u, x).unwrap();
            assert!(c.tag.in_d());
            assert_eq!(c.orbit[4], x4);
        }
    }
    assert!(hits > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn group_laws_hold_on_answered_points(seed in any::<u64>()) {
        let s = l_system(seed);
        let ext = random_extension(&s, seed ^ 1, 2);
        let mut u = ext.universe.clone();
        let g = realize(&s, seed).unwrap();
        let h = realize(&ext, seed ^ 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        grow(&mut u, &mut rng, 5);
        for x in sample(&u, &mut rng, 8) {
            let hx = h.apply(&mut u, x).unwrap();
            prop_assert_eq!(g.compose(&h).apply(&mut u, x).unwrap(), g.apply(&mut u, hx).unwrap());
            let gx = g.apply(&mut u, x).unwrap();
            prop_assert_eq!(g.inverse().apply(&mut u, gx).unwrap(), x);
            let g3 = g.power(3).apply(&mut u, x).unwrap();
            let o = g.orbit(&mut u, x, 3).unwrap();
            prop_assert_eq!(g3, o[3]);
            prop_assert_eq!(g.power(-3).apply(&mut u, g3).unwrap(), x);
            prop_assert_eq!(g.power(0).apply(&mut u, x).unwrap(), x);
        }
    }
}
