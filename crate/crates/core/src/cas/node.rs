use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::canonical::{self, b64, decimal};
use crate::digest::sha256;

use super::CasError;

/// Largest data blob a single node may carry (256 KiB).
pub const CHUNK_SIZE: usize = 262_144;
/// Most links an interior node may carry.
pub const MAX_LINKS: usize = 1024;

/// SHA-256 of a node's canonical encoding, shown as 64 lowercase hex chars.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectHash([u8; 32]);

impl ObjectHash {
    pub const fn from_bytes(bytes: [u8; 32]) -> Self {
        ObjectHash(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for ObjectHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for ObjectHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ObjectHash({})", self.to_hex())
    }
}

impl FromStr for ObjectHash {
    type Err = CasError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 64 || !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(CasError::BadHash(s.to_string()));
        }
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out).map_err(|_| CasError::BadHash(s.to_string()))?;
        Ok(ObjectHash(out))
    }
}

impl Serialize for ObjectHash {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for ObjectHash {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Link {
    pub name: String,
    pub hash: ObjectHash,
    /// Raw content bytes reachable through this link.
    #[serde(with = "decimal")]
    pub size: u64,
}

impl Link {
    pub fn chunk(hash: ObjectHash, size: u64) -> Self {
        Link {
            name: String::new(),
            hash,
            size,
        }
    }
}

/// A leaf carries data and no links; an interior node carries two or more
/// unnamed links and no data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DagNode {
    #[serde(with = "b64")]
    pub data: Vec<u8>,
    pub links: Vec<Link>,
}

impl DagNode {
    pub fn leaf(data: Vec<u8>) -> Self {
        DagNode {
            data,
            links: Vec::new(),
        }
    }

    pub fn interior(links: Vec<Link>) -> Self {
        DagNode {
            data: Vec::new(),
            links,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.links.is_empty()
    }

    pub fn validate(&self) -> Result<(), CasError> {
        if self.data.len() > CHUNK_SIZE {
            return Err(CasError::ChunkTooLarge(self.data.len()));
        }
        if self.links.len() > MAX_LINKS {
            return Err(CasError::TooManyLinks(self.links.len()));
        }
        if self.links.is_empty() {
            return Ok(());
        }
        if !self.data.is_empty() {
            return Err(CasError::InvalidNode("node has both data and links".into()));
        }
        if self.links.len() < 2 {
            return Err(CasError::InvalidNode(
                "interior node needs at least 2 links".into(),
            ));
        }
        if self.links.iter().any(|l| !l.name.is_empty()) {
            return Err(CasError::InvalidNode("chunk links must be unnamed".into()));
        }
        Ok(())
    }

    /// Canonical JSON: `{"data":<base64>,"links":[{"hash","name","size"}...]}`.
    pub fn encode(&self) -> Vec<u8> {
        canonical::to_vec(self)
    }

    /// Strict inverse of [`DagNode::encode`]; also enforces node shape.
    pub fn decode(bytes: &[u8]) -> Result<Self, CasError> {
        let node: DagNode =
            canonical::from_slice(bytes).map_err(|e| CasError::Malformed(e.to_string()))?;
        node.validate()?;
        Ok(node)
    }
}

pub fn hash_node(node: &DagNode) -> Result<ObjectHash, CasError> {
    node.validate()?;
    Ok(ObjectHash(sha256(&node.encode())))
}
