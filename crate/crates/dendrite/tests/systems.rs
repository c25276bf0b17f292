mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::trees::{between, is_partial_iso};
use dendrite::systems::*;
use dendrite::{OrderSet, PointId, Universe};
use proptest::prelude::*;

fn notap_base() -> (System, PointId, PointId) {
    let mut u = Universe::new(OrderSet::infinite());
    let x = u.root();
    let y = u.add_branch(x).unwrap();
    (System::from_map(u, BTreeMap::from([(x, y)])), x, y)
}

/// φ₁ fixes a point p of ]x, y[; φ₂ pushes y further along the arc.
fn notap_pair() -> (System, System, System) {
    let (base, x, y) = notap_base();
    let mut u1 = base.universe.clone();
    let p = u1.add_between(x, y, u1.order_set().default_label()).unwrap();
    let s1 = System::from_map(u1, BTreeMap::from([(x, y), (p, p)]));
    let mut u2 = base.universe.clone();
    let gy = u2.add_branch(y).unwrap();
    let s2 = System::from_map(u2, BTreeMap::from([(x, y), (y, gy)]));
    (base, s1, s2)
}

fn compose(f: &Embedding, g: &Embedding) -> Embedding {
    f.iter().map(|(&a, b)| (a, g[b])).collect()
}

/// Every φ-periodic point of `s` goes to a ψ-periodic point of `t` with the
/// same period.
fn periods_rigid(s: &System, t: &System, f: &Embedding) -> bool {
    s.b.iter().filter(|&&x| s.is_periodic(x)).all(|&x| t.period(f[&x]) == s.period(x))
}

#[test]
fn notap_pair_cannot_be_amalgamated() {
    let (base, s1, s2) = notap_pair();
    assert!(!is_in_l(&base).in_l);
    let i = inclusion(&base);
    let r = amalgamate(&base, &s1, &s2, &i, &i);
    assert!(matches!(r, Err(SystemError::OrbitConflict(_))), "{r:?}");
}

#[test]
fn notap_base_extends_as_a_translation() {
    let (base, x, _) = notap_base();
    let (t, f) = extend_to_l(&base).unwrap();
    assert!(is_in_l(&t).in_l);
    verify_embedding(&base, &t, &f).unwrap();
    assert!(!t.is_periodic(x));
    assert!(is_partial_iso(t.universe.tree(), &t.phi));
}

#[test]
fn amalgam_of_base_with_itself() {
    let (base, _) = extend_to_l(&random_system(3, 6)).unwrap();
    let i = inclusion(&base);
    let a = amalgamate(&base, &base, &base, &i, &i).unwrap();
    assert_eq!(a.system.a.len(), base.a.len());
    assert_eq!(a.system.phi, base.phi);
}

#[test]
fn open_two_branch_chain_becomes_periodic() {
    // x0 fixed, a ↦ b with a, b in different branches at x0
    let mut u = Universe::new(OrderSet::infinite());
    let x0 = u.root();
    let a = u.add_branch(x0).unwrap();
    let b = u.add_branch(x0).unwrap();
    let s = System::from_map(u, BTreeMap::from([(x0, x0), (a, b)]));
    assert_eq!(branch_orbits(&s, x0).unwrap()[0].branches.len(), 2);
    let (t, f) = extend_to_l(&s).unwrap();
    verify_embedding(&s, &t, &f).unwrap();
    assert!(t.b.iter().all(|&p| t.iterate(p, 2) == Some(p)));
    assert!(is_in_l(&t).in_l);
}

#[test]
fn separating_fixed_point_splits_the_chain() {
    // x0 fixed; x1 → x2 → x3 moving towards x0 along a path; a pair e ↦ f
    // in one component beyond x1
    let l = OrderSet::infinite().default_label();
    let mut u = Universe::new(OrderSet::infinite());
    let x0 = u.root();
    let x1 = u.add_branch(x0).unwrap();
    let x3 = u.add_between(x0, x1, l).unwrap();
    let x2 = u.add_between(x3, x1, l).unwrap();
    let h = u.add_branch(x1).unwrap();
    let e = u.add_branch(h).unwrap();
    let f = u.add_branch(h).unwrap();
    let s = System::from_map(u, BTreeMap::from([(x0, x0), (x1, x2), (x2, x3), (e, f)]));
    validate_system(&s).unwrap();
    let t = add_separating_fixed_point(&s, &[x1, x2, x3]).unwrap();
    let y = *t.phi.keys().find(|k| !s.phi.contains_key(k)).unwrap();
    assert_eq!(t.phi[&y], y);
    assert_eq!(t.a.len(), s.a.len() + 1);
    // B₁ = {e} on one side, every other point of B on the other
    for &b in s.b.iter().filter(|&&b| b != e) {
        assert!(between(t.universe.tree(), y, e, b));
    }
}

#[test]
fn separating_fixed_point_checks_hypotheses() {
    let (base, x, y) = notap_base();
    let r = add_separating_fixed_point(&base, &[x, y]);
    assert!(matches!(r, Err(SystemError::HypothesesViolated(_))));
}

#[test]
fn jep_places_systems_side_by_side() {
    let s = random_system(11, 6);
    let t = random_system(12, 6);
    for (a, b) in [(&s, &t), (&s, &s)] {
        let j = joint_embed(a, b).unwrap();
        verify_embedding(a, &j.system, &j.f_s).unwrap();
        verify_embedding(b, &j.system, &j.f_t).unwrap();
        let img_s: BTreeSet<PointId> = j.f_s.values().copied().collect();
        assert!(j.f_t.values().all(|p| !img_s.contains(p)));
    }
}

#[test]
fn jep_of_identities() {
    let mut u = Universe::new(OrderSet::infinite());
    let p = u.root();
    let q = u.add_branch(p).unwrap();
    let id = System::identity(u, [p, q]);
    let j = joint_embed(&id, &id).unwrap();
    assert!(j.system.phi.iter().all(|(a, b)| a == b));
    assert_eq!(j.system.b.len(), 4);
}

#[test]
fn jep_refuses_finite_orders() {
    let w = jep_obstruction(3);
    let r = joint_embed(&w.rotation, &w.identity);
    assert!(matches!(r, Err(SystemError::FiniteOrderUnsupported)));
}

#[test]
fn obstruction_rotations_have_one_fixed_point() {
    for n in [3, 4] {
        let w = jep_obstruction(n);
        assert_eq!(w.rotation.a.len(), n as usize + 1);
        let fixed: Vec<PointId> = w.rotation.phi.iter().filter(|(a, b)| a == b).map(|(a, _)| *a).collect();
        assert_eq!(fixed, vec![w.centre]);
        assert!(w.rotation.b.iter().filter(|&&p| p != w.centre).all(|&p| w.rotation.period(p) == Some(n as usize)));
        assert!(w.conflict);
        assert!(w.placements_tried > 0);
    }
}

#[test]
fn orbit_discipline_flags_merged_chains() {
    // base: two separate translations x ↦ x′ and y ↦ y′ on a path
    let l = OrderSet::infinite().default_label();
    let mut u = Universe::new(OrderSet::infinite());
    let x = u.root();
    let y2 = u.add_branch(x).unwrap();
    let y = u.add_between(x, y2, l).unwrap();
    let x2 = u.add_between(x, y, l).unwrap();
    let base = System::from_map(u.clone(), BTreeMap::from([(x, x2), (y, y2)]));
    let ext = System::from_map(u, BTreeMap::from([(x, x2), (x2, y), (y, y2)]));
    validate_system(&ext).unwrap();
    assert!(!check_orbit_discipline(&base, &ext, &inclusion(&base)));
    assert!(!is_in_l(&base).in_l);
    assert!(check_orbit_discipline(&base, &base, &inclusion(&base)));
}

#[test]
fn random_amalgams_commute_and_keep_orbits_apart() {
    for seed in 0..12 {
        let base = extend_to_l(&random_system(seed, 6)).unwrap().0;
        let s1 = extend_to_l(&random_extension(&base, 2 * seed + 100, 2)).unwrap().0;
        let s2 = extend_to_l(&random_extension(&base, 2 * seed + 101, 2)).unwrap().0;
        let i = inclusion(&base);
        let a = amalgamate(&base, &s1, &s2, &i, &i).unwrap();
        let (k1, k2) = (compose(&i, &a.j1), compose(&i, &a.j2));
        assert_eq!(k1, k2);
        assert!(check_orbit_discipline(&base, &a.system, &k1));
        assert!(periods_rigid(&base, &a.system, &k1));
        assert!(periods_rigid(&s1, &a.system, &a.j1));
        assert!(periods_rigid(&s2, &a.system, &a.j2));
        assert!(is_partial_iso(a.system.universe.tree(), &a.system.phi));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn extension_lands_in_l(seed in any::<u64>()) {
        let s = random_system(seed, 8);
        let (t, f) = extend_to_l(&s).unwrap();
        prop_assert!(is_in_l(&t).in_l);
        prop_assert!(verify_embedding(&s, &t, &f).is_ok());
        prop_assert!(check_orbit_discipline(&s, &t, &f) || !is_in_l(&s).in_l);
        prop_assert!(periods_rigid(&s, &t, &f));
        prop_assert!(is_partial_iso(t.universe.tree(), &t.phi));
    }

    #[test]
    fn systems_survive_json(seed in any::<u64>()) {
        let s = random_system(seed, 8);
        let back = System::from_json(&serde_json::from_str(&serde_json::to_string(&s.to_json()).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(back.phi, s.phi);
        prop_assert_eq!(back.a, s.a);
    }

    #[test]
    fn validation_agrees_with_paths(seed in any::<u64>()) {
        let s = random_system(seed, 8);
        prop_assert!(validate_system(&s).is_ok());
        prop_assert!(is_partial_iso(s.universe.tree(), &s.phi));
    }
}
