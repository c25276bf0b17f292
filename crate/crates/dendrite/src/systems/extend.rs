//! Extensions of systems: adding fixed points and the cofinal extension into 𝓛.
//!
//! The constructions act on the finite map φ and grow the universe. New
//! points whose position is forced only up to combinatorial type (a fixed
//! point, the far end of a translation arc) are found by trying the finitely
//! many positions relative to the tree spanned by the system: an existing
//! vertex, a new point inside an edge, or a new leaf at a vertex or inside an
//! edge. Every candidate is tried on a copy of the universe and only the
//! chosen one is kept.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::lclass::is_in_l;
use super::{diag, in_d, inclusion, validate_system, Embedding, System, SystemError};
use crate::iso::PartialIso;
use crate::label::PointId;
use crate::universe::Universe;

pub(crate) type Map = BTreeMap<PointId, PointId>;

const FUEL: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Pos {
    Vertex(PointId),
    Mid(PointId, PointId),
    Leaf(PointId),
    LeafMid(PointId, PointId),
}

pub(crate) fn materialize(u: &mut Universe, pos: Pos) -> Option<PointId> {
    let l = u.order_set().default_label();
    match pos {
        Pos::Vertex(p) => Some(p),
        Pos::Mid(a, b) => u.add_between(a, b, l).ok(),
        Pos::Leaf(p) => u.add_branch(p).ok(),
        Pos::LeafMid(a, b) => {
            let m = u.add_between(a, b, l).ok()?;
            u.add_branch(m).ok()
        }
    }
}

/// Candidate positions relative to the tree spanned by `hull`, nearest to
/// `from` first, restricted to vertices accepted by `keep`.
pub(crate) fn positions(
    u: &Universe,
    hull: &BTreeSet<PointId>,
    from: PointId,
    keep: &dyn Fn(PointId) -> bool,
) -> Vec<Pos> {
    let mut hull = hull.clone();
    hull.insert(from);
    let (cl, edges) = u.tree().closure_tree(&hull);
    let mut adj: BTreeMap<PointId, Vec<PointId>> = BTreeMap::new();
    for &(a, b) in &edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut dist: BTreeMap<PointId, usize> = BTreeMap::from([(from, 0)]);
    let mut q = VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        for &w in adj.get(&v).into_iter().flatten() {
            if !dist.contains_key(&w) {
                dist.insert(w, dist[&v] + 1);
                q.push_back(w);
            }
        }
    }
    let mut out: Vec<(usize, u8, Pos)> = Vec::new();
    for &v in &cl {
        if keep(v) {
            out.push((2 * dist[&v], 0, Pos::Vertex(v)));
        }
        if keep(v) || v == from {
            out.push((2 * dist[&v], 2, Pos::Leaf(v)));
        }
    }
    for &(a, b) in &edges {
        if keep(a) && keep(b) || keep(a) && b == from || keep(b) && a == from {
            let d = 2 * dist[&a].min(dist[&b]) + 1;
            out.push((d, 1, Pos::Mid(a, b)));
            out.push((d, 3, Pos::LeafMid(a, b)));
        }
    }
    out.sort();
    out.into_iter().map(|(_, _, p)| p).collect()
}

fn points_of(phi: &Map) -> BTreeSet<PointId> {
    phi.keys().chain(phi.values()).copied().collect()
}

fn close(u: &Universe, phi: &Map) -> Result<Map, SystemError> {
    Ok(PartialIso::from_pairs(u, phi.iter().map(|(&a, &b)| (a, b)))?.pairs().clone())
}

fn build_system(u: Universe, phi: Map, extra_a: &BTreeSet<PointId>) -> System {
    let b: BTreeSet<PointId> = phi.keys().copied().collect();
    let c: BTreeSet<PointId> = phi.values().copied().collect();
    let mut all: BTreeSet<PointId> = b.union(&c).copied().collect();
    all.extend(extra_a.iter().copied());
    let a = u.cl(&all);
    System { universe: u, a, b, c, phi }
}

/// Finds a point y on a copy of the universe such that φ ∪ {y ↦ y} is a
/// partial isomorphism accepted by `accept`; returns the grown universe, y
/// and the closed map.
fn find_fixed(
    u: &Universe,
    phi: &Map,
    hull: &BTreeSet<PointId>,
    from: PointId,
    keep: &dyn Fn(PointId) -> bool,
    accept: &dyn Fn(&Universe, PointId, &Map) -> bool,
) -> Option<(Universe, PointId, Map)> {
    for pos in positions(u, hull, from, keep) {
        let mut u2 = u.clone();
        let Some(y) = materialize(&mut u2, pos) else { continue };
        if phi.get(&y).is_some_and(|&z| z != y) || phi.values().any(|&z| z == y && phi.get(&y) != Some(&y)) {
            continue;
        }
        let mut m = phi.clone();
        m.insert(y, y);
        let Ok(closed) = close(&u2, &m) else { continue };
        if accept(&u2, y, &closed) {
            return Some((u2, y, closed));
        }
    }
    None
}

fn ensure_fixed_map(u: &mut Universe, phi: &Map, a: &BTreeSet<PointId>) -> Result<(Map, PointId), SystemError> {
    if let Some((&x, _)) = phi.iter().find(|(x, y)| x == y) {
        return Ok((phi.clone(), x));
    }
    let mut hull: BTreeSet<PointId> = a.clone();
    hull.extend(points_of(phi));
    let from = hull.iter().next().copied().unwrap_or(u.root());
    let found = find_fixed(u, phi, &hull, from, &|_| true, &|_, _, _| true);
    let (u2, y, m) = found.ok_or_else(|| SystemError::NoProgress("no position for a fixed point".into()))?;
    *u = u2;
    Ok((m, y))
}

/// An extension of `s` with a point fixed by the new map. The position of the
/// fixed point is the first that works among the vertices of ⟨A⟩, new points
/// inside its edges, and new leaves.
pub fn ensure_fixed_point(s: &System) -> Result<System, SystemError> {
    validate_system(s).map_err(SystemError::Invalid)?;
    if s.phi.iter().any(|(x, y)| x == y) {
        return Ok(s.clone());
    }
    let mut u = s.universe.clone();
    let (m, _) = ensure_fixed_map(&mut u, &s.phi, &s.a)?;
    Ok(build_system(u, m, &s.a))
}

/// Adds a fixed point y separating B₁ = {x ∈ B∖{x₁} : x₁ ∈ [x₀,x] and
/// x₁ ∈ [x₀,φ(x)]} from the rest of B, where x₀ is a fixed point towards
/// which the chain x₁ → x₂ → … moves.
pub fn add_separating_fixed_point(s: &System, chain: &[PointId]) -> Result<System, SystemError> {
    validate_system(s).map_err(SystemError::Invalid)?;
    let hv = |m: &str| SystemError::HypothesesViolated(m.to_string());
    if chain.len() < 2 {
        return Err(hv("the chain needs at least two points"));
    }
    let u = &s.universe;
    let x1 = chain[0];
    if s.c.contains(&x1) {
        return Err(hv("x₁ must not be in C"));
    }
    for i in 0..chain.len() - 1 {
        if s.phi.get(&chain[i]) != Some(&chain[i + 1]) {
            return Err(hv("the chain is not a φ-chain"));
        }
    }
    let nested = |x0: PointId| chain.windows(2).all(|w| u.between(w[1], w[0], x0));
    let x0 = s
        .phi
        .iter()
        .filter(|(x, y)| x == y)
        .map(|(&x, _)| x)
        .find(|&x0| nested(x0))
        .ok_or_else(|| hv("no fixed point towards which the chain is nested"))?;
    let b1: BTreeSet<PointId> = s
        .b
        .iter()
        .copied()
        .filter(|&x| x != x1 && u.between(x1, x0, x) && u.between(x1, x0, s.phi[&x]))
        .collect();
    let rest: Vec<PointId> = s.b.difference(&b1).copied().collect();
    let keep = |v: PointId| v != x1 && u.between(x1, x0, v);
    let a = s.a.clone();
    let accept = |u2: &Universe, y: PointId, m: &Map| {
        let mut a2 = a.clone();
        a2.insert(y);
        u2.cl(&a2).len() == a2.len()
            && m.len() == s.phi.len() + usize::from(!s.phi.contains_key(&y))
            && b1.iter().all(|&b| rest.iter().all(|&b2| u2.between(y, b, b2)))
    };
    let (u2, y, m) = find_fixed(u, &s.phi, &s.a, x1, &keep, &accept)
        .ok_or_else(|| hv("no fixed point separates B₁ from the rest of B"))?;
    let mut a2 = s.a.clone();
    a2.insert(y);
    let b: BTreeSet<PointId> = m.keys().copied().collect();
    let c: BTreeSet<PointId> = m.values().copied().collect();
    Ok(System { universe: u2, a: a2, b, c, phi: m })
}

/// The cofinal extension: a system in 𝓛 together with the embedding of `s`
/// (the inclusion, since the universe only grows).
pub fn extend_to_l(s: &System) -> Result<(System, Embedding), SystemError> {
    extend_to_l_with(s, FUEL)
}

pub fn extend_to_l_with(s: &System, fuel: usize) -> Result<(System, Embedding), SystemError> {
    validate_system(s).map_err(SystemError::Invalid)?;
    if is_in_l(s).in_l {
        return Ok((s.clone(), inclusion(s)));
    }
    if !s.universe.order_set().is_infinite_only() {
        return Err(SystemError::FiniteOrderUnsupported);
    }
    let mut u = s.universe.clone();
    let (phi, x0) = ensure_fixed_map(&mut u, &s.phi, &s.a)?;
    // every point of A not yet in B ∪ C joins B
    let mut g = PartialIso::from_pairs(&u, phi.iter().map(|(&a, &b)| (a, b)))?;
    let bc: BTreeSet<PointId> = points_of(&phi);
    for &p in s.a.difference(&bc) {
        if g.get(p).is_none() && g.get_inv(p).is_none() {
            g.forward(&mut u, p)?;
        }
    }
    let phi = g.pairs().clone();
    let mut fuel = fuel;
    let out = solve_at(&mut u, &phi, x0, &mut fuel)?;
    let t = build_system(u, out, &s.a);
    validate_system(&t).map_err(SystemError::Invalid)?;
    let rep = is_in_l(&t);
    if !rep.in_l {
        let d = rep.first_failure().cloned().unwrap_or_else(|| diag("L", vec![], "not in 𝓛"));
        return Err(SystemError::NoProgress(format!("result fails {d}")));
    }
    let f = inclusion(s);
    super::verify_embedding(s, &t, &f).map_err(SystemError::Invalid)?;
    Ok((t, f))
}

fn spend(fuel: &mut usize) -> Result<(), SystemError> {
    if *fuel == 0 {
        return Err(SystemError::NoProgress("fuel exhausted".into()));
    }
    *fuel -= 1;
    Ok(())
}

fn all_periodic(phi: &Map) -> bool {
    phi.keys().all(|&x| {
        let mut y = x;
        for _ in 0..phi.len() {
            match phi.get(&y) {
                Some(&z) if z == x => return true,
                Some(&z) => y = z,
                None => return false,
            }
        }
        false
    })
}

/// Extends φ (fixing x0, all other points in branches at x0) into 𝓛 by
/// treating each orbit of branches separately.
fn solve_at(u: &mut Universe, phi: &Map, x0: PointId, fuel: &mut usize) -> Result<Map, SystemError> {
    spend(fuel)?;
    // branches at x0, each named by its least point
    let mut branch_of: BTreeMap<PointId, PointId> = BTreeMap::new();
    let mut reps: Vec<PointId> = Vec::new();
    for p in points_of(phi) {
        if p == x0 {
            continue;
        }
        let r = match reps.iter().find(|&&r| u.c(x0, p, r) != x0) {
            Some(&r) => r,
            None => {
                reps.push(p);
                p
            }
        };
        branch_of.insert(p, r);
    }
    let mut next: BTreeMap<PointId, PointId> = BTreeMap::new();
    for (&x, &y) in phi {
        if x != x0 {
            next.insert(branch_of[&x], branch_of[&y]);
        }
    }
    let has_pred: BTreeSet<PointId> = next.values().copied().collect();
    let mut done = BTreeSet::new();
    let mut out: Map = BTreeMap::from([(x0, x0)]);
    let starts: Vec<PointId> = reps.iter().copied().filter(|k| !has_pred.contains(k)).chain(reps.iter().copied()).collect();
    for k in starts {
        if done.contains(&k) {
            continue;
        }
        let mut seq = vec![k];
        done.insert(k);
        let mut closed = false;
        let mut cur = k;
        while let Some(&n) = next.get(&cur) {
            if n == k {
                closed = true;
                break;
            }
            seq.push(n);
            done.insert(n);
            cur = n;
        }
        let members: BTreeSet<PointId> = seq.iter().copied().collect();
        let mut sub: Map =
            phi.iter().filter(|(x, _)| **x != x0 && members.contains(&branch_of[x])).map(|(&a, &b)| (a, b)).collect();
        sub.insert(x0, x0);
        let solved = if all_periodic(&sub) {
            sub
        } else if seq.len() == 1 {
            case_a(u, &sub, x0, fuel)?
        } else if closed {
            case_b2(u, &sub, x0, &seq, fuel)?
        } else {
            case_b1(u, &sub, x0, &seq, fuel)?
        };
        out.extend(solved);
    }
    Ok(out)
}

/// The point of cl(ys) nearest to x0.
fn nearest(u: &Universe, ys: &BTreeSet<PointId>, x0: PointId) -> PointId {
    let mut it = ys.iter();
    let mut p = *it.next().unwrap();
    for &y in it {
        p = u.c(x0, p, y);
    }
    p
}

/// A single branch D at x0 with φ(D) = D.
fn case_a(u: &mut Universe, phi: &Map, x0: PointId, fuel: &mut usize) -> Result<Map, SystemError> {
    spend(fuel)?;
    let bs: BTreeSet<PointId> = phi.keys().copied().filter(|&x| x != x0).collect();
    let b0 = nearest(u, &bs, x0);
    let c0 = phi[&b0];
    if b0 == c0 {
        return solve_at(u, phi, b0, fuel);
    }
    let m = u.c(x0, b0, c0);
    if m != b0 && m != c0 {
        // B and C sit in different branches at m: fold φ into an involution
        let mut psi: Map = phi.clone();
        for (&x, &y) in phi {
            if x != x0 {
                psi.insert(y, x);
            }
        }
        psi.insert(m, m);
        return close(u, &psi);
    }
    if m == c0 {
        translation_toward(u, phi, x0, b0, fuel)
    } else {
        let inv: Map = phi.iter().map(|(&a, &b)| (b, a)).collect();
        let b0i = nearest(u, &inv.keys().copied().filter(|&x| x != x0).collect(), x0);
        let r = translation_toward(u, &inv, x0, b0i, fuel)?;
        Ok(r.into_iter().map(|(a, b)| (b, a)).collect())
    }
}

/// φ moves b0 strictly towards the fixed point x0: choose the far end y of
/// the translation arc, recurse beyond y, and rebuild the corridor D(y, x0)
/// from full orbit segments.
fn translation_toward(u: &mut Universe, phi: &Map, x0: PointId, b0: PointId, fuel: &mut usize) -> Result<Map, SystemError> {
    spend(fuel)?;
    let inv: Map = phi.iter().map(|(&a, &b)| (b, a)).collect();
    let mut x1 = b0;
    while let Some(&p) = inv.get(&x1) {
        if p == b0 {
            break;
        }
        x1 = p;
    }
    let hull = points_of(phi);
    let uu = u.clone();
    let keep = |v: PointId| v != x1 && uu.between(x1, x0, v);
    let accept = |u2: &Universe, y: PointId, m: &Map| {
        m.iter().all(|(&a, &b)| !u2.strictly_between(a, y, x0) || u2.strictly_between(b, a, x0))
    };
    let (u2, y, m) = find_fixed(u, phi, &hull, x1, &keep, &accept)
        .ok_or_else(|| SystemError::NoProgress(format!("no far end for the translation arc through {x1}")))?;
    *u = u2;
    let beyond = |p: PointId| p != y && u.between(y, p, x0);
    let mut far: Map = m.iter().filter(|(a, _)| beyond(**a)).map(|(&a, &b)| (a, b)).collect();
    far.insert(y, y);
    let mut out = solve_at(u, &far, y, fuel)?;
    let corridor: Map = m.iter().filter(|(a, _)| in_d(u, **a, y, x0)).map(|(&a, &b)| (a, b)).collect();
    out.extend(build_corridor(u, &corridor, y, x0, 1, fuel)?);
    out.insert(x0, x0);
    Ok(out)
}

/// Rebuilds the points of a corridor D(y, x0) on which g translates towards
/// x0: every point is pulled back into one fundamental domain and pushed
/// forward K ≥ 4 times, so all orbits have the same length and start in the
/// same fundamental domain.
fn build_corridor(
    u: &mut Universe,
    corridor: &Map,
    y: PointId,
    x0: PointId,
    min_len: usize,
    fuel: &mut usize,
) -> Result<Map, SystemError> {
    if corridor.is_empty() {
        return Ok(Map::new());
    }
    let mut seed: Map = corridor.clone();
    seed.insert(y, y);
    seed.insert(x0, x0);
    let mut g = PartialIso::from_pairs(u, seed.iter().map(|(&a, &b)| (a, b)))?;
    let pts: BTreeSet<PointId> = points_of(corridor);
    let proj: BTreeMap<PointId, PointId> = pts.iter().map(|&q| (q, u.c(q, y, x0))).collect();
    // the projection nearest to y
    let w = *proj.values().find(|&&p| proj.values().all(|&o| u.between(p, y, o))).unwrap();
    let gw = g.forward(u, w)?;
    let mut pulled: BTreeMap<PointId, (PointId, usize)> = BTreeMap::new();
    for &q in &pts {
        let mut a = proj[&q];
        let mut z = q;
        let mut j = 0;
        while !(u.between(a, w, gw) && a != gw) {
            spend(fuel)?;
            a = g.backward(u, a)?;
            z = g.backward(u, z)?;
            j += 1;
        }
        pulled.insert(q, (z, j));
    }
    let mut k = 4.max(min_len);
    for (&q, &(_, j)) in &pulled {
        if corridor.contains_key(&q) {
            k = k.max(j + 1);
        } else {
            k = k.max(j);
        }
    }
    let mut f0: BTreeSet<PointId> = pulled.values().map(|&(z, _)| z).collect();
    f0.insert(y);
    f0.insert(x0);
    let f0 = u.cl(&f0);
    let mut out = Map::new();
    for &f in f0.iter().filter(|&&f| f != y && f != x0) {
        let mut cur = f;
        for _ in 0..k {
            spend(fuel)?;
            let nx = g.forward(u, cur)?;
            out.insert(cur, nx);
            cur = nx;
        }
    }
    Ok(out)
}

/// Pulls every point of a branch chain back into its first branch.
fn pull_back(
    u: &mut Universe,
    g: &mut PartialIso,
    phi: &Map,
    x0: PointId,
    seq: &[PointId],
) -> Result<BTreeSet<PointId>, SystemError> {
    let mut p: BTreeSet<PointId> = BTreeSet::from([x0]);
    for q in points_of(phi) {
        if q == x0 {
            continue;
        }
        let k = seq.iter().position(|&r| u.c(x0, q, r) != x0).expect("point lies in the chain");
        let mut z = q;
        for _ in 0..k {
            z = g.backward(u, z)?;
        }
        p.insert(z);
    }
    Ok(u.cl(&p))
}

/// An open chain of branches: close it up so φ has order n on the chain.
fn case_b1(u: &mut Universe, phi: &Map, x0: PointId, seq: &[PointId], fuel: &mut usize) -> Result<Map, SystemError> {
    spend(fuel)?;
    let n = seq.len();
    let mut g = PartialIso::from_pairs(u, phi.iter().map(|(&a, &b)| (a, b)))?;
    let f = pull_back(u, &mut g, phi, x0, seq)?;
    let mut out = Map::from([(x0, x0)]);
    for &p in f.iter().filter(|&&p| p != x0) {
        let mut cur = p;
        for _ in 0..n - 1 {
            let nx = g.forward(u, cur)?;
            out.insert(cur, nx);
            cur = nx;
        }
        out.insert(cur, p);
    }
    Ok(out)
}

/// A closed chain of n ≥ 2 branches: solve for ψ = φⁿ on the first branch
/// and spread the result around the chain.
fn case_b2(u: &mut Universe, phi: &Map, x0: PointId, seq: &[PointId], fuel: &mut usize) -> Result<Map, SystemError> {
    spend(fuel)?;
    let n = seq.len();
    let mut g = PartialIso::from_pairs(u, phi.iter().map(|(&a, &b)| (a, b)))?;
    let f = pull_back(u, &mut g, phi, x0, seq)?;
    let mut psi = Map::from([(x0, x0)]);
    for &p in f.iter().filter(|&&p| p != x0) {
        let mut cur = p;
        for _ in 0..n {
            cur = g.forward(u, cur)?;
        }
        psi.insert(p, cur);
    }
    let psi2 = solve_at(u, &psi, x0, fuel)?;
    let mut out = Map::from([(x0, x0)]);
    for (&b, &c) in psi2.iter().filter(|(b, _)| **b != x0) {
        let mut cur = b;
        for _ in 0..n - 1 {
            let nx = g.forward(u, cur)?;
            out.insert(cur, nx);
            cur = nx;
        }
        out.insert(cur, c);
    }
    Ok(out)
}
