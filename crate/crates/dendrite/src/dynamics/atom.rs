//! A single lazily answered automorphism: a growing partial isomorphism plus
//! the rules that decide images of points it has not seen yet.

use std::collections::BTreeMap;

use super::support::Part;
use super::DynError;
use crate::iso::PartialIso;
use crate::label::{EndId, PointId};
use crate::universe::{Target, Universe};

#[derive(Clone, Debug)]
pub(crate) enum Rule {
    /// translation along the arc from `from` to `to`, fixing both ends, on
    /// the component of the complement of the ends containing the arc
    Axis { from: PointId, to: Target, toward_to: bool },
    /// the parts are permuted cyclically and g^n is the identity on them
    Cycle { parts: Vec<Part>, n: usize },
}

#[derive(Clone, Debug)]
pub(crate) struct Atom {
    pub memo: PartialIso,
    pub rules: Vec<Rule>,
    /// answer x ↦ x whenever that is consistent with the memo
    pub prefer_fixed: bool,
}

fn axis_end(u: &Universe, to: Target) -> Result<PointId, DynError> {
    Ok(u.proxy(to)?)
}

impl Rule {
    fn covers(&self, u: &Universe, x: PointId) -> Result<bool, DynError> {
        match self {
            Rule::Axis { from, to, .. } => {
                let z = axis_end(u, *to)?;
                if z == *from || x == *from {
                    return Ok(false);
                }
                let p = u.c(x, *from, z);
                Ok(p != *from && (matches!(to, Target::End(_)) || p != z))
            }
            Rule::Cycle { parts, .. } => {
                for p in parts {
                    if p.contains(u, x)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}

impl Atom {
    pub fn new(memo: PartialIso, rules: Vec<Rule>, prefer_fixed: bool) -> Self {
        Atom { memo, rules, prefer_fixed }
    }

    pub fn forward(&mut self, u: &mut Universe, x: PointId) -> Result<PointId, DynError> {
        if let Some(y) = self.memo.get(x) {
            return Ok(y);
        }
        u.label(x)?;
        for r in self.rules.clone() {
            if r.covers(u, x)? {
                return match r {
                    Rule::Axis { from, to, toward_to } => self.via_axis(u, from, to, toward_to, x, true),
                    Rule::Cycle { n, .. } => self.cycle(u, &r, n, x),
                };
            }
        }
        self.fallback(u, x, true)
    }

    pub fn backward(&mut self, u: &mut Universe, y: PointId) -> Result<PointId, DynError> {
        if let Some(x) = self.memo.get_inv(y) {
            return Ok(x);
        }
        u.label(y)?;
        for r in self.rules.clone() {
            if r.covers(u, y)? {
                return match r {
                    Rule::Axis { from, to, toward_to } => self.via_axis(u, from, to, toward_to, y, false),
                    Rule::Cycle { n, .. } => {
                        // g⁻¹ = gⁿ⁻¹ on the parts; answering y closes its orbit
                        self.cycle(u, &r, n, y)?;
                        Ok(self.memo.get_inv(y).expect("orbit closed"))
                    }
                };
            }
        }
        self.fallback(u, y, false)
    }

    fn fallback(&mut self, u: &mut Universe, x: PointId, forward: bool) -> Result<PointId, DynError> {
        if self.prefer_fixed {
            if self.memo.add_pair(u, x, x).is_ok() {
                return Ok(x);
            }
        }
        Ok(if forward { self.memo.forward(u, x)? } else { self.memo.backward(u, x)? })
    }

    fn pairs(&self, forward: bool) -> BTreeMap<PointId, PointId> {
        if forward {
            self.memo.pairs().clone()
        } else {
            self.memo.inverse().pairs().clone()
        }
    }

    fn record(&mut self, u: &Universe, x: PointId, y: PointId, forward: bool) -> Result<(), DynError> {
        let (a, b) = if forward { (x, y) } else { (y, x) };
        self.memo.add_pair(u, a, b)?;
        Ok(())
    }

    /// Answers a point of the translation support: first its foot on the
    /// axis, then the point itself.
    fn via_axis(
        &mut self,
        u: &mut Universe,
        from: PointId,
        to: Target,
        toward_to: bool,
        x: PointId,
        forward: bool,
    ) -> Result<PointId, DynError> {
        let z = axis_end(u, to)?;
        let foot = u.c(x, from, z);
        let f = self.pairs(forward);
        if !f.contains_key(&foot) {
            self.axis_point(u, from, to, toward_to == forward, foot, forward)?;
        }
        if foot == x {
            return Ok(self.pairs(forward)[&x]);
        }
        Ok(if forward { self.memo.forward(u, x)? } else { self.memo.backward(u, x)? })
    }

    /// Places the image of an axis point q strictly beyond q in the direction
    /// of motion, between the images of its answered neighbours.
    fn axis_point(
        &mut self,
        u: &mut Universe,
        from: PointId,
        to: Target,
        increasing: bool,
        q: PointId,
        forward: bool,
    ) -> Result<PointId, DynError> {
        let f = self.pairs(forward);
        let depth = |u: &Universe, p: PointId| u.path(from, p).map(|v| v.len());
        let z = axis_end(u, to)?;
        let dq = depth(u, q)?;
        let mut lo = (0, from);
        let mut hi: Option<(usize, PointId)> = None;
        for &p in f.keys() {
            if p == from || !u.between(p, from, z) {
                continue;
            }
            let d = depth(u, p)?;
            if d < dq && d > lo.0 {
                lo = (d, p);
            } else if d > dq && hi.is_none_or(|(h, _)| d < h) {
                hi = Some((d, p));
            }
        }
        let glo = f[&lo.1];
        let ghi = hi.map(|(_, p)| f[&p]);
        let later = |u: &Universe, a: PointId, b: PointId| if u.between(a, from, b) { b } else { a };
        let l = u.label(q)?;
        let img = if increasing {
            let lower = later(u, q, glo);
            match ghi {
                Some(h) => u.add_between(lower, h, l)?,
                None => {
                    let Target::End(e) = to else { unreachable!("a point axis end is answered") };
                    between_end(u, lower, e, l)?
                }
            }
        } else {
            let upper = match ghi {
                Some(h) if u.between(h, from, q) => h,
                _ => q,
            };
            u.add_between(glo, upper, l)?
        };
        self.record(u, q, img, forward)?;
        Ok(img)
    }

    /// Answers x in a cyclically permuted part by closing its whole orbit.
    fn cycle(&mut self, u: &mut Universe, r: &Rule, n: usize, x: PointId) -> Result<PointId, DynError> {
        if let Some(y) = self.memo.get(x) {
            return Ok(y);
        }
        let dom = self.memo.domain();
        let q = u.first_point(&dom, x)?;
        if q != x && !dom.contains(&q) && r.covers(u, q)? {
            self.cycle(u, r, n, q)?;
        }
        let mut orbit = vec![x];
        for _ in 1..n {
            let last = *orbit.last().unwrap();
            orbit.push(self.memo.forward(u, last)?);
        }
        let last = *orbit.last().unwrap();
        if n > 1 {
            self.record(u, last, x, true)?;
        } else {
            self.record(u, x, x, true)?;
        }
        Ok(self.memo.get(x).expect("recorded"))
    }
}

/// A fresh point strictly between `a` and the end `e`.
fn between_end(u: &mut Universe, a: PointId, e: EndId, l: crate::label::Label) -> Result<PointId, DynError> {
    let mut tip = u.end_anchor(e)?;
    if tip == a {
        tip = u.refine_end(e)?;
    }
    Ok(u.add_between(a, tip, l)?)
}
