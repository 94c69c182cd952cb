use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Token identifier: a plain integer (`7`) or a dotted node (`6.1`).
///
/// Ordering is lexicographic over `(major, minor)` with a missing minor
/// sorting first, so `6 < 6.1 < 6.2 < 7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    major: u32,
    minor: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NodeIdError {
    #[error("node id must be positive, got {0:?}")]
    Zero(String),
    #[error("dotted node minor must be >= 1, got {0:?}")]
    ZeroMinor(String),
    #[error("invalid node id {0:?}")]
    Invalid(String),
}

impl NodeId {
    /// Plain integer node. Panics on zero, which is reserved for the root sentinel.
    pub fn int(major: u32) -> Self {
        assert!(major > 0, "node ids start at 1");
        NodeId { major, minor: None }
    }

    /// Dotted node `major.minor`. Panics when either part is zero.
    pub fn dotted(major: u32, minor: u32) -> Self {
        assert!(major > 0 && minor > 0, "dotted ids need major >= 1 and minor >= 1");
        NodeId {
            major,
            minor: Some(minor),
        }
    }

    pub fn new(major: u32, minor: Option<u32>) -> Result<Self, NodeIdError> {
        let shown = match minor {
            Some(m) => format!("{major}.{m}"),
            None => major.to_string(),
        };
        if major == 0 {
            return Err(NodeIdError::Zero(shown));
        }
        if minor == Some(0) {
            return Err(NodeIdError::ZeroMinor(shown));
        }
        Ok(NodeId { major, minor })
    }

    pub fn major(self) -> u32 {
        self.major
    }

    pub fn minor(self) -> Option<u32> {
        self.minor
    }

    pub fn is_dotted(self) -> bool {
        self.minor.is_some()
    }

    pub fn is_integer(self) -> bool {
        self.minor.is_none()
    }

    /// Same node with its major part moved by `delta`.
    pub fn shifted(self, delta: u32) -> Self {
        NodeId {
            major: self.major + delta,
            minor: self.minor,
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.minor {
            Some(m) => write!(f, "{}.{}", self.major, m),
            None => write!(f, "{}", self.major),
        }
    }
}

impl FromStr for NodeId {
    type Err = NodeIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || NodeIdError::Invalid(s.to_string());
        let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
        match t.split_once('.') {
            Some((maj, min)) => {
                if !digits(maj) || !digits(min) {
                    return Err(bad());
                }
                let major = maj.parse().map_err(|_| bad())?;
                let minor = min.parse().map_err(|_| bad())?;
                NodeId::new(major, Some(minor))
            }
            None => {
                if !digits(t) {
                    return Err(bad());
                }
                NodeId::new(t.parse().map_err(|_| bad())?, None)
            }
        }
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(NodeIdVisitor)
    }
}

struct NodeIdVisitor;

impl Visitor<'_> for NodeIdVisitor {
    type Value = NodeId;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a node id such as \"6\" or \"6.1\"")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<NodeId, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<NodeId, E> {
        let major = u32::try_from(v).map_err(E::custom)?;
        NodeId::new(major, None).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<NodeId, E> {
        let major = u32::try_from(v).map_err(E::custom)?;
        NodeId::new(major, None).map_err(E::custom)
    }
}

/// Head of a token: the root sentinel or another node.
///
/// The sentinel is its own variant so renumbering can never collide with it;
/// textual formats write it as `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Root,
    Node(NodeId),
}

impl Head {
    pub fn node(self) -> Option<NodeId> {
        match self {
            Head::Root => None,
            Head::Node(id) => Some(id),
        }
    }

    pub fn is_root(self) -> bool {
        matches!(self, Head::Root)
    }
}

impl From<NodeId> for Head {
    fn from(id: NodeId) -> Self {
        Head::Node(id)
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Root => f.write_str("0"),
            Head::Node(id) => id.fmt(f),
        }
    }
}

impl FromStr for Head {
    type Err = NodeIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "0" {
            Ok(Head::Root)
        } else {
            s.parse().map(Head::Node)
        }
    }
}

impl Serialize for Head {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Head {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct HeadVisitor;
        impl Visitor<'_> for HeadVisitor {
            type Value = Head;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"0\" or a node id")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Head, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Head, E> {
                if v == 0 {
                    Ok(Head::Root)
                } else {
                    NodeIdVisitor.visit_u64(v).map(Head::Node)
                }
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Head, E> {
                if v == 0 {
                    Ok(Head::Root)
                } else {
                    NodeIdVisitor.visit_i64(v).map(Head::Node)
                }
            }
        }
        deserializer.deserialize_any(HeadVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_places_dotted_between_integers() {
        let six = NodeId::int(6);
        let six_one = NodeId::dotted(6, 1);
        let seven = NodeId::int(7);
        assert!(six < six_one);
        assert!(six_one < seven);
        assert!(NodeId::dotted(6, 1) < NodeId::dotted(6, 2));
    }

    #[test]
    fn parses_and_prints() {
        assert_eq!("6.1".parse::<NodeId>().unwrap(), NodeId::dotted(6, 1));
        assert_eq!(NodeId::dotted(6, 1).to_string(), "6.1");
        assert_eq!("12".parse::<NodeId>().unwrap(), NodeId::int(12));
        assert!("0".parse::<NodeId>().is_err());
        assert!("6.0".parse::<NodeId>().is_err());
        assert!("6.".parse::<NodeId>().is_err());
        assert!("-3".parse::<NodeId>().is_err());
        assert!("1-2".parse::<NodeId>().is_err());
    }

    #[test]
    fn head_sentinel_is_zero() {
        assert_eq!("0".parse::<Head>().unwrap(), Head::Root);
        assert_eq!(Head::Root.to_string(), "0");
        assert_eq!("3".parse::<Head>().unwrap(), Head::Node(NodeId::int(3)));
    }

    #[test]
    fn serde_accepts_strings_and_numbers() {
        let id: NodeId = serde_json::from_str("\"6.1\"").unwrap();
        assert_eq!(id, NodeId::dotted(6, 1));
        let id: NodeId = serde_json::from_str("4").unwrap();
        assert_eq!(id, NodeId::int(4));
        let h: Head = serde_json::from_str("0").unwrap();
        assert_eq!(h, Head::Root);
        assert_eq!(serde_json::to_string(&NodeId::dotted(6, 1)).unwrap(), "\"6.1\"");
    }
}
