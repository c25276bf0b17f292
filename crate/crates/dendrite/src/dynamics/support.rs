//! Open supports: finite unions of components of the complement of a few
//! cut points.

use serde::{Deserialize, Serialize};

use super::DynError;
use crate::label::PointId;
use crate::universe::{Target, Universe};

/// The component of X ∖ cut containing `rep`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub cut: Vec<PointId>,
    pub rep: Target,
}

impl Part {
    /// The component of X ∖ {at} containing `rep`.
    pub fn at(at: PointId, rep: impl Into<Target>) -> Self {
        Part { cut: vec![at], rep: rep.into() }
    }

    /// D(y, z) given a point `inner` of ]y, z[.
    pub fn gap(y: PointId, z: PointId, inner: PointId) -> Self {
        Part { cut: vec![y, z], rep: Target::Point(inner) }
    }

    pub fn contains(&self, u: &Universe, x: PointId) -> Result<bool, DynError> {
        if self.cut.contains(&x) {
            return Ok(false);
        }
        let r = u.proxy(self.rep)?;
        u.label(x)?;
        Ok(self.cut.iter().all(|&b| !u.between(b, x, r)))
    }

    /// Two connected open sets meet iff one contains a representative of
    /// the other or a boundary point of the other.
    pub fn meets(&self, other: &Part, u: &Universe) -> Result<bool, DynError> {
        for (a, b) in [(self, other), (other, self)] {
            if b.contains(u, u.proxy(a.rep)?)? {
                return Ok(true);
            }
            for &c in &a.cut {
                if b.contains(u, c)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    pub parts: Vec<Part>,
}

impl Support {
    pub fn new(parts: Vec<Part>) -> Self {
        Support { parts }
    }

    pub fn contains(&self, u: &Universe, x: PointId) -> Result<bool, DynError> {
        for p in &self.parts {
            if p.contains(u, x)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn cut_points(&self) -> impl Iterator<Item = PointId> + '_ {
        self.parts.iter().flat_map(|p| p.cut.iter().copied())
    }

    pub fn meets(&self, other: &Support, u: &Universe) -> Result<bool, DynError> {
        for a in &self.parts {
            for b in &other.parts {
                if a.meets(b, u)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}
