//! A homeomorphism of D₃ fixing a regular point x, swapping the two
//! components of X ∖ {x}, whose square translates each component along an
//! arc from x to an end.

use super::{rotation, translation, LazyAutomorphism};
use crate::label::{EndId, Label, OrderSet, PointId};
use crate::universe::{Target, Universe};

pub struct D3Example {
    pub universe: Universe,
    pub g: LazyAutomorphism,
    /// the regular fixed point
    pub x: PointId,
    /// branch points in C₁ and C₂
    pub c1: PointId,
    pub c2: PointId,
    /// the end of C₂ the translation runs to
    pub end: EndId,
}

/// g = ψ ∘ τ where ψ swaps C₁ and C₂ with ψ² = id and τ translates C₂
/// toward `end`, fixing everything else. On C₁ this is ψ, on C₂ it is ψ ∘ τ,
/// and g² restricted to either component is a translation.
pub fn build_example_d3() -> D3Example {
    let mut u = Universe::new(OrderSet::new([3], false));
    let c1 = u.root();
    let x = u.add_branch_labeled(c1, Label::Regular).expect("room at the root");
    let c2 = u.add_branch(x).expect("x is regular with one neighbour");
    let end = u.register_end(c2).expect("c2 has room");
    let psi = rotation(&mut u, x, &[c1, c2], 1).expect("c1 and c2 lie in different components of x");
    let tau = translation(&mut u, x, Target::End(end), true, 2).expect("the ray from x to the end is a valid axis");
    let g = psi.compose(&tau);
    D3Example { universe: u, g, x, c1, c2, end }
}
