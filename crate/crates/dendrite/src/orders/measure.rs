//! The invariant measure on orders rooted at ξ, realized lazily: each
//! branch point keeps an order on its materialized components away from ξ,
//! and a new component is inserted into a uniformly chosen gap.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{branch_points, build_clo, open_components, sort_points, CloWitness, ComponentOrder, ComponentOrders, OrderError};
use crate::iso::PartialIso;
use crate::label::{EndId, PointId};
use crate::universe::{Target, Universe};

#[derive(Clone, Debug)]
pub struct InvariantSampler {
    xi: EndId,
    rng: ChaCha8Rng,
    orders: ComponentOrders,
}

pub fn sample_invariant(u: &Universe, xi: EndId, seed: u64) -> Result<InvariantSampler, OrderError> {
    u.end_anchor(xi)?;
    Ok(InvariantSampler { xi, rng: ChaCha8Rng::seed_from_u64(seed), orders: ComponentOrders::new() })
}

impl InvariantSampler {
    pub fn xi(&self) -> EndId {
        self.xi
    }

    /// The order at b, after inserting components materialized since the
    /// last visit.
    pub fn component_order(&mut self, u: &Universe, b: PointId) -> Result<&ComponentOrder, OrderError> {
        let open = open_components(u, Target::End(self.xi), b)?;
        let co = self.orders.entry(b).or_insert_with(|| ComponentOrder { at: b, order: Vec::new() });
        for c in open {
            if !co.order.contains(&c) {
                let i = self.rng.gen_range(0..=co.order.len());
                co.order.insert(i, c);
            }
        }
        Ok(co)
    }

    pub fn compare(&mut self, u: &Universe, a: PointId, b: PointId) -> Result<Ordering, OrderError> {
        let p = u.end_anchor(self.xi)?;
        let c = u.c(a, b, p);
        if c != a && c != b {
            self.component_order(u, c)?;
        }
        super::compare(u, p, &self.orders, a, b)
    }

    /// The sampled order on `pts`, increasing.
    pub fn restrict(&mut self, u: &Universe, pts: &[PointId]) -> Result<Vec<PointId>, OrderError> {
        let p = u.end_anchor(self.xi)?;
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                let c = u.c(a, b, p);
                if c != a && c != b {
                    self.component_order(u, c)?;
                }
            }
        }
        sort_points(u, p, &self.orders, pts.iter().copied())
    }

    /// The sampled order on every materialized branch point.
    pub fn witness(&mut self, u: &Universe) -> Result<CloWitness, OrderError> {
        for b in branch_points(u) {
            self.component_order(u, b)?;
        }
        build_clo(u, self.xi, &self.orders)
    }

    pub fn snapshot(&self) -> ComponentOrders {
        self.orders.clone()
    }
}

/// Lehmer rank of a permutation of 0..n.
pub fn perm_index(perm: &[usize]) -> usize {
    let mut idx = 0;
    for (i, &p) in perm.iter().enumerate() {
        let smaller = perm[i + 1..].iter().filter(|&&q| q < p).count();
        idx = idx * (perm.len() - i) + smaller;
    }
    idx
}

/// How often each relative order of `pts` is drawn, indexed by perm_index
/// of the positions of pts in the sampled order.
pub fn pattern_counts(u: &Universe, xi: EndId, pts: &[PointId], trials: u64, seed: u64) -> Result<Vec<u64>, OrderError> {
    let n = pts.len();
    let mut counts = vec![0u64; (1..=n).product()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let mut s = sample_invariant(u, xi, rng.gen())?;
        let sorted = s.restrict(u, pts)?;
        let perm: Vec<usize> = sorted.iter().map(|p| pts.iter().position(|q| q == p).expect("same points")).collect();
        counts[perm_index(&perm)] += 1;
    }
    Ok(counts)
}

/// g⁻¹(f) for a random partial automorphism g fixing the direction of ξ:
/// g fixes a fresh point toward ξ, takes a few random pairs, and is then
/// extended generically, growing the universe where needed.
pub fn xi_fixing_preimage(u: &mut Universe, xi: EndId, f: &[PointId], seed: u64) -> Result<Vec<PointId>, OrderError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = u.refine_end(xi)?;
    let mut g = PartialIso::identity_on([a]).with_seed(rng.gen());
    let pts: Vec<PointId> = branch_points(u).into_iter().filter(|&p| p != a).collect();
    for _ in 0..rng.gen_range(1..=3) {
        let x = *pts.choose(&mut rng).expect("points");
        let y = *pts.choose(&mut rng).expect("points");
        let _ = g.add_pair(u, x, y);
    }
    f.iter().map(|&y| Ok(g.backward(u, y)?)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub counts: Vec<Vec<u64>>,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareReport {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

fn p_value(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).expect("positive dof").sf(stat)
}

/// Goodness of fit against the uniform distribution.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquareReport {
    let n: u64 = counts.iter().sum();
    let e = n as f64 / counts.len() as f64;
    let statistic = if e > 0.0 { counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum() } else { 0.0 };
    let dof = counts.len().saturating_sub(1);
    ChiSquareReport { counts: vec![counts.to_vec()], statistic, dof, p_value: p_value(statistic, dof) }
}

/// Homogeneity of two count vectors over the same bins; empty bins are
/// dropped.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquareReport {
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let total = na + nb;
    let mut statistic = 0.0;
    let mut bins = 0;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        bins += 1;
        for (obs, row) in [(x as f64, na), (y as f64, nb)] {
            let e = row * col / total;
            statistic += (obs - e).powi(2) / e;
        }
    }
    let dof = bins.max(1) - 1;
    ChiSquareReport { counts: vec![a.to_vec(), b.to_vec()], statistic, dof, p_value: p_value(statistic, dof) }
}

/// Points that appear in different components at b away from ξ, one per
/// component, where such points exist.
pub fn component_representatives(u: &Universe, xi: EndId, b: PointId) -> Result<Vec<PointId>, OrderError> {
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    let open = open_components(u, Target::End(xi), b)?;
    for p in u.points() {
        if p == b {
            continue;
        }
        let c = u.component_of(b, Target::Point(p))?;
        if open.contains(&c) && seen.insert(c) {
            reps.push(p);
        }
    }
    Ok(reps)
}
