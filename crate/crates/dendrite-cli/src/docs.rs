//! JSON documents read through `--input`. Outputs of the generating
//! subcommands contain these keys, so they can be piped straight back in;
//! unknown keys are ignored.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use dendrite::boundary::KPoint;
use dendrite::orders::CloWitness;
use dendrite::systems::{Embedding, SystemJson};
use dendrite::universe::UniverseJson;
use dendrite::{EndId, PointId};

/// An embedding as a list of pairs.
pub type Pairs = Vec<(PointId, PointId)>;

pub fn pairs(e: &Embedding) -> Pairs {
    e.iter().map(|(&a, &b)| (a, b)).collect()
}

pub fn embedding(p: &Pairs) -> Embedding {
    p.iter().copied().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamInput {
    pub base: SystemJson,
    pub s1: SystemJson,
    pub s2: SystemJson,
    pub i1: Pairs,
    pub i2: Pairs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointInput {
    pub s: SystemJson,
    pub t: SystemJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloDoc {
    pub universe: UniverseJson,
    pub witness: CloWitness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransportInput {
    pub universe: UniverseJson,
    pub w1: CloWitness,
    pub w2: CloWitness,
    pub f: BTreeSet<PointId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KDoc {
    pub universe: UniverseJson,
    pub kpoint: KPoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceDoc {
    pub universe: UniverseJson,
    pub sequence: Vec<EndId>,
}
