use std::collections::BTreeMap;

use super::*;
use crate::label::OrderSet;

fn line() -> (Universe, PointId, PointId) {
    let mut u = Universe::new(OrderSet::infinite());
    let y = u.root();
    let z = u.add_branch(y).unwrap();
    (u, y, z)
}

#[test]
fn power_zero_and_inverse_cancel() {
    let (mut u, y, z) = line();
    let g = translation(&mut u, y, Target::Point(z), true, 0).unwrap();
    let m = u.add_between(y, z, u.order_set().default_label()).unwrap();
    assert_eq!(g.power(0).apply(&mut u, m).unwrap(), m);
    let gm = g.apply(&mut u, m).unwrap();
    assert_ne!(gm, m);
    assert_eq!(g.inverse().apply(&mut u, gm).unwrap(), m);
    assert_eq!(g.compose(&g.inverse()).apply(&mut u, m).unwrap(), m);
}

#[test]
fn translation_moves_axis_points_toward_the_target() {
    let (mut u, y, z) = line();
    let g = translation(&mut u, y, Target::Point(z), true, 5).unwrap();
    let l = u.order_set().default_label();
    let mut p = u.add_between(y, z, l).unwrap();
    for _ in 0..6 {
        let q = g.apply(&mut u, p).unwrap();
        assert!(u.strictly_between(q, p, z));
        p = q;
    }
    for _ in 0..6 {
        let q = g.apply_inverse(&mut u, p).unwrap();
        assert!(u.strictly_between(q, y, p));
        p = q;
    }
    assert_eq!(g.apply(&mut u, y).unwrap(), y);
    assert_eq!(g.apply(&mut u, z).unwrap(), z);
}

#[test]
fn three_cycle_returns_after_three_steps() {
    let mut u = Universe::new(OrderSet::infinite());
    let h = u.root();
    let r: Vec<PointId> = (0..3).map(|_| u.add_branch(h).unwrap()).collect();
    let g = rotation(&mut u, h, &r, 3).unwrap();
    let deep = u.add_branch(r[1]).unwrap();
    let g3 = g.power(3);
    assert_eq!(g3.apply(&mut u, deep).unwrap(), deep);
    assert_ne!(g.apply(&mut u, deep).unwrap(), deep);
    assert_eq!(g3.apply(&mut u, r[0]).unwrap(), r[0]);
}

#[test]
fn empty_patchwork_is_identity() {
    let (mut u, y, _) = line();
    let g = patchwork(&mut u, Vec::new()).unwrap();
    assert_eq!(g.apply(&mut u, y).unwrap(), y);
}

#[test]
fn overlapping_supports_are_refused() {
    let (mut u, y, z) = line();
    let a = translation(&mut u, y, Target::Point(z), true, 0).unwrap();
    let b = translation(&mut u, y, Target::Point(z), false, 0).unwrap();
    let s = axis_support(&mut u, y, Target::Point(z)).unwrap();
    let r = patchwork(&mut u, vec![(s.clone(), a), (s, b)]);
    assert_eq!(r.err(), Some(DynError::OverlappingSupports));
}

#[test]
fn realized_identity_fixes_everything() {
    let (mut u, y, z) = line();
    let s = System::identity(u.clone(), [y, z]);
    let g = realize(&s, 9).unwrap();
    for _ in 0..10 {
        let p = u.add_branch(z).unwrap();
        let q = u.add_between(y, p, u.order_set().default_label()).unwrap();
        assert_eq!(g.apply(&mut u, p).unwrap(), p);
        assert_eq!(g.apply(&mut u, q).unwrap(), q);
    }
}

#[test]
fn identity_is_k_everywhere() {
    let (mut u, y, _) = line();
    let c = classify_point(&LazyAutomorphism::identity(), &mut u, y).unwrap();
    assert_eq!(c.tag, DynTag::KPart);
    assert_eq!(c.fixed_witness, Some(y));
    let r = component_rotation_check(&LazyAutomorphism::identity(), &mut u, y);
    assert_eq!(r, Err(DynError::PointIsFixed(y)));
}

#[test]
fn swap_at_a_hub_is_rotated_off_itself() {
    let mut u = Universe::new(OrderSet::infinite());
    let h = u.root();
    let a = u.add_branch(h).unwrap();
    let b = u.add_branch(h).unwrap();
    let g = rotation(&mut u, h, &[a, b], 0).unwrap();
    assert!(component_rotation_check(&g, &mut u, a).unwrap());
    assert_eq!(classify_point(&g, &mut u, a).unwrap().fixed_witness, Some(h));
}

#[test]
fn snapshots_diverge_but_clones_share() {
    let (mut u, y, z) = line();
    let s = System::from_map(u.clone(), BTreeMap::from([(y, y)]));
    let g = realize(&s, 4).unwrap();
    let snap = g.snapshot();
    let shared = g.clone();
    let p = u.add_branch(z).unwrap();
    let gp = g.apply(&mut u, p).unwrap();
    assert_eq!(shared.answered_points(), g.answered_points());
    assert!(!snap.answered_points().contains(&p));
    assert_eq!(shared.apply(&mut u, p).unwrap(), gp);
}
