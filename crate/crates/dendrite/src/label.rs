//! Point identities, order labels and order sets.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Identity of a materialized point. Ids are never reused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub u64);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// Identity of a registered ideal end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EndId(pub u64);

impl fmt::Display for EndId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// The order of a point: a branch order `n >= 3`, infinite order, or one of
/// the two non-branch kinds that may appear as designated vertices of ⟨F⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Finite(u32),
    Infinite,
    Regular,
    End,
}

impl Label {
    pub fn is_branch(self) -> bool {
        matches!(self, Label::Finite(_) | Label::Infinite)
    }

    /// Maximum degree a vertex with this label may have.
    pub fn degree_cap(self) -> Option<usize> {
        match self {
            Label::Finite(n) => Some(n as usize),
            Label::Infinite => None,
            Label::Regular => Some(2),
            Label::End => Some(1),
        }
    }

    pub fn is_valid(self) -> bool {
        !matches!(self, Label::Finite(n) if n < 3)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Finite(n) => write!(f, "{n}"),
            Label::Infinite => write!(f, "inf"),
            Label::Regular => write!(f, "reg"),
            Label::End => write!(f, "end"),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Label::Finite(n) => s.serialize_u32(*n),
            Label::Infinite => s.serialize_str("inf"),
            Label::Regular => s.serialize_str("reg"),
            Label::End => s.serialize_str("end"),
        }
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Label;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer >= 3 or one of \"inf\", \"reg\", \"end\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Label, E> {
                if v >= 3 && v <= u32::MAX as u64 {
                    Ok(Label::Finite(v as u32))
                } else {
                    Err(E::custom(format!("branch order {v} is below 3")))
                }
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Label, E> {
                if v < 0 {
                    return Err(E::custom("negative order"));
                }
                self.visit_u64(v as u64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Label, E> {
                match v {
                    "inf" => Ok(Label::Infinite),
                    "reg" => Ok(Label::Regular),
                    "end" => Ok(Label::End),
                    _ => Err(E::custom(format!("unknown label {v:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// A set S of admissible branch orders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSet {
    finite: BTreeSet<u32>,
    infinite: bool,
}

impl OrderSet {
    /// S = {∞}.
    pub fn infinite() -> Self {
        OrderSet { finite: BTreeSet::new(), infinite: true }
    }

    pub fn new(finite: impl IntoIterator<Item = u32>, infinite: bool) -> Self {
        let finite: BTreeSet<u32> = finite.into_iter().filter(|&n| n >= 3).collect();
        assert!(infinite || !finite.is_empty(), "order set must be nonempty");
        OrderSet { finite, infinite }
    }

    pub fn contains(&self, l: Label) -> bool {
        match l {
            Label::Finite(n) => self.finite.contains(&n),
            Label::Infinite => self.infinite,
            Label::Regular | Label::End => false,
        }
    }

    pub fn is_infinite_only(&self) -> bool {
        self.infinite && self.finite.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        let mut v: Vec<Label> = self.finite.iter().map(|&n| Label::Finite(n)).collect();
        if self.infinite {
            v.push(Label::Infinite);
        }
        v
    }

    /// The label used when a construction needs "some" branch order.
    pub fn default_label(&self) -> Label {
        if self.infinite {
            Label::Infinite
        } else {
            Label::Finite(*self.finite.iter().next_back().unwrap())
        }
    }
}

impl Default for OrderSet {
    fn default() -> Self {
        OrderSet::infinite()
    }
}
