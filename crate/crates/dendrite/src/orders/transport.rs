//! Moving a finite c-closed set so that one convex converging order on it
//! becomes another.

use std::collections::{BTreeMap, BTreeSet};

use super::{check_clo, convexity_violation, decode, rooted_encoding, CloWitness, ComponentOrder, OrderError};
use crate::iso::PartialIso;
use crate::label::PointId;
use crate::universe::{Target, Universe};

#[derive(Clone, Debug)]
pub struct Transport {
    pub iso: PartialIso,
    /// w2 extended to the image of f
    pub target: CloWitness,
}

/// A partial isomorphism g on f ∪ g(f) with x ≺₁ y ⟺ g(x) ≺₂ g(y) on f.
/// The image is a fresh copy of f grown off the first point of w2's hull
/// seen from its root, so its relative order under w2 can be chosen freely.
/// When both roots are the same end the copy is hung on the arc toward it.
pub fn transport_order(
    u: &mut Universe,
    f: &BTreeSet<PointId>,
    w1: &CloWitness,
    w2: &CloWitness,
) -> Result<Transport, OrderError> {
    if let Some(&p) = f.iter().find(|p| !w1.points.contains(p)) {
        return Err(OrderError::NotInOrder(p));
    }
    if !u.is_c_closed(f) {
        return Err(OrderError::NotCClosed);
    }
    for w in [w1, w2] {
        if let Some(v) = convexity_violation(u, w)? {
            return Err(OrderError::DichotomyViolated { at: v.center, witness: vec![v.a, v.a_prime, v.b, v.b_prime] });
        }
    }
    if w1 == w2 {
        let iso = PartialIso::identity_on(f.iter().copied());
        return Ok(Transport { iso, target: w2.clone() });
    }
    let rank = w1.rank();
    let rho = u.first_point(f, u.proxy(w1.root)?)?;
    let tops: Vec<PointId> = if f.contains(&rho) {
        vec![rho]
    } else {
        let mut near: BTreeMap<PointId, PointId> = BTreeMap::new();
        for &d in f {
            let dir = u.tree().step_toward(rho, d).map_err(crate::universe::UniverseError::from)?;
            let e = near.entry(dir).or_insert(d);
            *e = u.c(rho, *e, d);
        }
        let mut t: Vec<PointId> = near.into_values().collect();
        t.sort_by_key(|p| rank[p]);
        t
    };
    let mut children: BTreeMap<PointId, Vec<PointId>> = BTreeMap::new();
    for &y in f {
        if tops.contains(&y) {
            continue;
        }
        let parent = u.path(y, rho)?.into_iter().skip(1).find(|q| f.contains(q)).expect("tops lie between");
        children.entry(parent).or_default().push(y);
    }
    for v in children.values_mut() {
        v.sort_by_key(|p| rank[p]);
    }

    let mut enc = rooted_encoding(u, w2)?;
    let pi = u.first_point(&w2.points, u.proxy(w2.root)?)?;
    let same_end = matches!((w1.root, w2.root), (Target::End(a), Target::End(b)) if a == b);
    let hub_label = if tops.len() == 1 { u.label(tops[0])? } else { u.order_set().default_label() };
    let mut hub_order = Vec::new();
    let hub = if let (true, Target::End(e)) = (same_end, w2.root) {
        let mut t = u.end_anchor(e)?;
        if t == pi {
            t = u.refine_end(e)?;
        }
        let h = u.add_between(pi, t, hub_label)?;
        hub_order.push(u.component_of(h, Target::Point(pi))?);
        h
    } else {
        let h = u.add_branch_labeled(pi, hub_label)?;
        let ch = u.component_of(pi, Target::Point(h))?;
        match enc.get_mut(&pi) {
            Some(co) => co.order.push(ch),
            None => {
                let mut order: Vec<_> = w2
                    .points
                    .iter()
                    .filter(|&&p| p != pi)
                    .map(|&p| u.component_of(pi, Target::Point(p)))
                    .collect::<Result<BTreeSet<_>, _>>()?
                    .into_iter()
                    .collect();
                if w2.root != Target::Point(pi) {
                    let r = u.component_of(pi, w2.root)?;
                    order.retain(|&c| c != r);
                }
                order.push(ch);
                enc.insert(pi, ComponentOrder { at: pi, order });
            }
        }
        h
    };

    let mut map = BTreeMap::new();
    let mut stack = Vec::new();
    if tops.len() == 1 {
        map.insert(tops[0], hub);
        stack.push(tops[0]);
    } else {
        for &t in &tops {
            let g = u.add_branch_labeled(hub, u.label(t)?)?;
            hub_order.push(u.component_of(hub, Target::Point(g))?);
            map.insert(t, g);
            stack.push(t);
        }
    }
    enc.insert(hub, ComponentOrder { at: hub, order: hub_order });
    while let Some(y) = stack.pop() {
        let gy = map[&y];
        let mut order = enc.remove(&gy).map(|co| co.order).unwrap_or_default();
        for &c in children.get(&y).into_iter().flatten() {
            let gc = u.add_branch_labeled(gy, u.label(c)?)?;
            order.push(u.component_of(gy, Target::Point(gc))?);
            map.insert(c, gc);
            stack.push(c);
        }
        enc.insert(gy, ComponentOrder { at: gy, order });
    }

    let mut pts = w2.points.clone();
    pts.extend(map.values().copied());
    pts.insert(hub);
    let target = decode(u, w2.root, &enc, &u.cl(&pts))?;
    let iso = PartialIso::from_pairs(u, map)?;
    Ok(Transport { iso, target })
}

/// Checks a transport exactly; the message names the first failure.
pub fn verify_transport(
    u: &Universe,
    f: &BTreeSet<PointId>,
    w1: &CloWitness,
    w2: &CloWitness,
    t: &Transport,
) -> Result<(), String> {
    let g = |x: &PointId| t.iso.get(*x).ok_or_else(|| format!("{x} is not mapped"));
    let pairs: Vec<(PointId, PointId)> = f.iter().map(|x| Ok((*x, g(x)?))).collect::<Result<_, String>>()?;
    PartialIso::from_pairs(u, pairs.iter().copied()).map_err(|e| e.to_string())?;
    let r1 = w1.rank();
    let r2 = t.target.rank();
    for &(a, ga) in &pairs {
        for &(b, gb) in &pairs {
            let (Some(x), Some(y)) = (r2.get(&ga), r2.get(&gb)) else {
                return Err(format!("{ga} or {gb} is not in the target order"));
            };
            if (r1[&a] < r1[&b]) != (x < y) {
                return Err(format!("{a}, {b} change order"));
            }
        }
    }
    let check = check_clo(u, &t.target).map_err(|e| e.to_string())?;
    if !check.ok() {
        return Err(format!("target fails its checks: {check:?}"));
    }
    if t.target.root != w2.root {
        return Err("target root differs from w2".into());
    }
    let kept: Vec<PointId> = t.target.order.iter().copied().filter(|p| w2.points.contains(p)).collect();
    if kept != w2.order {
        return Err("target does not extend w2".into());
    }
    if let (Target::End(a), Target::End(b)) = (w1.root, w2.root) {
        if a == b {
            let p = u.proxy(w1.root).map_err(|e| e.to_string())?;
            let image: BTreeSet<PointId> = pairs.iter().map(|&(_, y)| y).collect();
            for &(a, ga) in &pairs {
                for &(b, gb) in &pairs {
                    let m = u.c(a, b, p);
                    let m2 = u.c(ga, gb, p);
                    let ok = match t.iso.get(m) {
                        Some(gm) if f.contains(&m) => gm == m2,
                        _ => !image.contains(&m2),
                    };
                    if !ok {
                        return Err(format!("meet of {a} and {b} toward the end is not preserved"));
                    }
                }
            }
        }
    }
    Ok(())
}
