use super::*;
use crate::label::OrderSet;

fn path3() -> (Universe, [PointId; 3]) {
    let mut u = Universe::new(OrderSet::infinite());
    let a = u.root();
    let b = u.add_branch(a).unwrap();
    let c = u.add_branch(b).unwrap();
    (u, [a, b, c])
}

#[test]
fn path_from_one_end_converges() {
    let (u, [a, b, c]) = path3();
    let w = CloWitness::new(&u, vec![a, b, c], Target::Point(a)).unwrap();
    assert!(is_converging(&u, &w));
    assert!(is_convex(&u, &w).unwrap());
    assert_eq!(root_of(&u, &w.order).unwrap(), RootReport { root: a, incompatible: None });
}

#[test]
fn middle_point_last_does_not_converge() {
    let (u, [a, b, c]) = path3();
    let w = CloWitness::new(&u, vec![a, c, b], Target::Point(a)).unwrap();
    assert_eq!(converging_violation(&u, &w.order), Some([a, b, c]));
    assert_eq!(root_of(&u, &w.order), Err(OrderError::NotConverging(a, b, c)));
    assert!(matches!(is_convex(&u, &w), Err(OrderError::NotConverging(..))));
}

#[test]
fn star_hub_first_is_its_own_root() {
    let mut u = Universe::new(OrderSet::infinite());
    let h = u.root();
    let leaves: Vec<PointId> = (0..3).map(|_| u.add_branch(h).unwrap()).collect();
    let mut order = vec![h];
    order.extend(leaves.iter().rev());
    assert_eq!(root_of(&u, &order).unwrap().root, h);
}

#[test]
fn figure_order_converges_but_is_not_convex() {
    let ex = nonconvex_example();
    let u = &ex.universe;
    assert!(is_converging(u, &ex.witness));
    let v = convexity_violation(u, &ex.witness).unwrap().unwrap();
    assert_eq!((v.a, v.a_prime, v.b, v.b_prime, v.center), (ex.a, ex.a_prime, ex.b, ex.b_prime, ex.c));
    assert_eq!(root_of(u, &ex.witness.order).unwrap().root, ex.x0);
    assert!(matches!(
        induced_component_order(u, &ex.witness, ex.c),
        Err(OrderError::DichotomyViolated { at, .. }) if at == ex.c
    ));
    assert!(matches!(rooted_encoding(u, &ex.witness), Err(OrderError::DichotomyViolated { .. })));
}

#[test]
fn two_singleton_components_follow_their_points() {
    let mut u = Universe::new(OrderSet::infinite());
    let h = u.root();
    let p = u.add_branch(h).unwrap();
    let q = u.add_branch(h).unwrap();
    let w = CloWitness::new(&u, vec![h, q, p], Target::Point(h)).unwrap();
    let co = induced_component_order(&u, &w, h).unwrap();
    let cq = u.component_of(h, q.into()).unwrap();
    let cp = u.component_of(h, p.into()).unwrap();
    assert_eq!(co.order, vec![cq, cp]);
}

#[test]
fn path_toward_the_end_is_ordered_from_the_end() {
    let (mut u, [a, b, c]) = path3();
    let xi = u.register_end(c).unwrap();
    let comps = random_component_orders(&u, Target::End(xi), &mut rand::thread_rng()).unwrap();
    assert_eq!(build_clo(&u, xi, &comps).unwrap().order, vec![c, b, a]);
}

#[test]
fn star_below_the_anchor_puts_the_hub_first() {
    let mut u = Universe::new(OrderSet::infinite());
    let h = u.root();
    let xi = u.register_end(h).unwrap();
    let c1 = u.add_branch(h).unwrap();
    let c2 = u.add_branch(h).unwrap();
    let d1 = u.add_branch(c1).unwrap();
    let order = vec![u.component_of(h, c2.into()).unwrap(), u.component_of(h, c1.into()).unwrap()];
    let mut comps = ComponentOrders::from([(h, ComponentOrder { at: h, order })]);
    comps.insert(c1, ComponentOrder { at: c1, order: vec![u.component_of(c1, d1.into()).unwrap()] });
    let w = build_clo(&u, xi, &comps).unwrap();
    assert_eq!(w.order, vec![h, c2, c1, d1]);
    assert!(is_convex(&u, &w).unwrap());
    let enc = product_encode(&u, &w, xi).unwrap();
    assert_eq!(enc[&h], comps[&h]);
    assert_eq!(product_decode(&u, xi, &enc, &w.points).unwrap(), w);
}

#[test]
fn missing_component_order_is_reported() {
    let mut u = Universe::new(OrderSet::infinite());
    let h = u.root();
    let xi = u.register_end(h).unwrap();
    u.add_branch(h).unwrap();
    u.add_branch(h).unwrap();
    assert!(matches!(build_clo(&u, xi, &ComponentOrders::new()), Err(OrderError::MissingComponent(_))));
}

#[test]
fn encoding_requires_the_end_as_root() {
    let (mut u, [a, b, c]) = path3();
    let xi = u.register_end(a).unwrap();
    let w = CloWitness::new(&u, vec![a, b, c], Target::Point(a)).unwrap();
    assert_eq!(product_encode(&u, &w, xi), Err(OrderError::NotRootedAtXi(xi)));
}

#[test]
fn chain_gives_a_linear_semilattice() {
    let (mut u, [a, b, c]) = path3();
    let xi = u.register_end(a).unwrap();
    let w = CloWitness::new(&u, vec![a, b, c], Target::End(xi)).unwrap();
    let ct = to_ct(&u, &w, xi).unwrap();
    assert_eq!(ct.less, BTreeSet::from([(a, b), (a, c), (b, c)]));
    assert_eq!(ct.meet(b, c), Some(b));
    let (u2, xi2, w2, img) = from_ct(&ct).unwrap();
    assert_eq!(to_ct(&u2, &w2, xi2).unwrap().order, vec![img[&a], img[&b], img[&c]]);
}

#[test]
fn two_minimal_elements_are_not_treeable() {
    let (a, b) = (PointId(1), PointId(2));
    let ct = CtStructure { carrier: BTreeSet::from([a, b]), less: BTreeSet::new(), order: vec![a, b] };
    assert!(matches!(ct.check(), Err(CtError::NotTreeable(_))));
}

#[test]
fn meet_outside_the_carrier_is_not_treeable() {
    let mut u = Universe::new(OrderSet::infinite());
    let h = u.root();
    let xi = u.register_end(h).unwrap();
    let p = u.add_branch(h).unwrap();
    let q = u.add_branch(h).unwrap();
    let w = CloWitness::new(&u, vec![p, q], Target::End(xi)).unwrap();
    assert!(matches!(to_ct(&u, &w, xi), Err(CtError::NotTreeable(_))));
}

#[test]
fn transport_between_equal_orders_is_the_identity() {
    let (u, [a, b, c]) = path3();
    let w = CloWitness::new(&u, vec![a, b, c], Target::Point(a)).unwrap();
    let mut u2 = u.clone();
    let f = BTreeSet::from([b, c]);
    let t = transport_order(&mut u2, &f, &w, &w).unwrap();
    assert_eq!(t.iso.pairs(), &BTreeMap::from([(b, b), (c, c)]));
    verify_transport(&u2, &f, &w, &w, &t).unwrap();
}

#[test]
fn transport_of_a_singleton() {
    let (mut u, [a, b, c]) = path3();
    let w1 = CloWitness::new(&u, vec![a, b, c], Target::Point(a)).unwrap();
    let w2 = CloWitness::new(&u, vec![c, b, a], Target::Point(c)).unwrap();
    let f = BTreeSet::from([b]);
    let t = transport_order(&mut u, &f, &w1, &w2).unwrap();
    verify_transport(&u, &f, &w1, &w2, &t).unwrap();
}

#[test]
fn lehmer_ranks_are_a_bijection() {
    let mut seen = BTreeSet::new();
    for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        seen.insert(perm_index(&p));
    }
    assert_eq!(seen, (0..6).collect());
}

#[test]
fn chi_square_accepts_flat_and_rejects_skewed_counts() {
    assert!(chi_square_uniform(&[1000, 1000, 1000]).passes(0.001));
    assert!(!chi_square_uniform(&[1500, 1000, 500]).passes(0.001));
    assert!(chi_square_two_sample(&[500, 500], &[490, 510]).passes(0.001));
    assert!(!chi_square_two_sample(&[900, 100], &[100, 900]).passes(0.001));
}

#[test]
fn two_components_split_evenly() {
    let mut u = Universe::new(OrderSet::infinite());
    let h = u.root();
    let xi = u.register_end(h).unwrap();
    let p = u.add_branch(h).unwrap();
    let q = u.add_branch(h).unwrap();
    let counts = pattern_counts(&u, xi, &[p, q], 20_000, 3).unwrap();
    assert!(chi_square_uniform(&counts).passes(0.001), "{counts:?}");
}

#[test]
fn sampler_answers_stay_put_under_growth() {
    let mut u = Universe::new(OrderSet::infinite());
    let h = u.root();
    let xi = u.register_end(h).unwrap();
    let p = u.add_branch(h).unwrap();
    let q = u.add_branch(h).unwrap();
    let mut s = sample_invariant(&u, xi, 11).unwrap();
    let before = s.compare(&u, p, q).unwrap();
    let r = u.add_branch(h).unwrap();
    u.add_branch(p).unwrap();
    assert_eq!(s.compare(&u, p, q).unwrap(), before);
    let w = s.witness(&u).unwrap();
    assert!(is_convex(&u, &w).unwrap());
    assert!(w.points.contains(&r));
}
