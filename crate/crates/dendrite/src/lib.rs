//! Finitary combinatorics of the universal Ważewski dendrite.

pub mod betweenness;
pub mod boundary;
pub mod canon;
pub mod dynamics;
pub mod iso;
pub mod label;
pub mod orbit_count;
pub mod orders;
pub mod systems;
pub mod tree;
pub mod universe;

pub use label::{EndId, Label, OrderSet, PointId};
pub use tree::FiniteTree;
pub use universe::{ComponentRef, Target, Universe};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/median-trees.md")]
    pub mod median_trees {}
    #[doc = include_str!("../../../book/src/universe.md")]
    pub mod universe {}
    #[doc = include_str!("../../../book/src/systems.md")]
    pub mod systems {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    pub mod dynamics {}
    #[doc = include_str!("../../../book/src/orders.md")]
    pub mod orders {}
    #[doc = include_str!("../../../book/src/boundary.md")]
    pub mod boundary {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
