use super::CloWitness;
use crate::label::{OrderSet, PointId};
use crate::universe::{Target, Universe};

/// A converging order that is not convex: two branches at a hub c, with a
/// before a′ but b′ before b.
#[derive(Clone, Debug)]
pub struct NonconvexExample {
    pub universe: Universe,
    pub witness: CloWitness,
    pub x0: PointId,
    pub c: PointId,
    pub a: PointId,
    pub a_prime: PointId,
    pub b: PointId,
    pub b_prime: PointId,
}

pub fn nonconvex_example() -> NonconvexExample {
    let mut u = Universe::new(OrderSet::infinite());
    let x0 = u.root();
    let mut grow = |at| u.add_branch(at).expect("infinite order");
    let c = grow(x0);
    let a = grow(c);
    let a_prime = grow(c);
    let b = grow(a);
    let s = grow(a);
    let b_prime = grow(a_prime);
    let t = grow(a_prime);
    let order = vec![x0, c, a, a_prime, b_prime, b, s, t];
    let witness = CloWitness::new(&u, order, Target::Point(x0)).expect("c-closed");
    NonconvexExample { universe: u, witness, x0, c, a, a_prime, b, b_prime }
}
