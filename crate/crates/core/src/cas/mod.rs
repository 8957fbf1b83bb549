//! Content-addressed object store: 256 KiB chunking into a two-level DAG,
//! deduplicated by hash.

mod file;
mod node;
mod store;

use thiserror::Error;

pub use file::{add_file, cat_file, stat, stat_by_traversal, Stat, MAX_FILE_SIZE};
pub use node::{hash_node, DagNode, Link, ObjectHash, CHUNK_SIZE, MAX_LINKS};
pub use store::{NodeSource, ObjectStore, Put};

#[derive(Debug, Error)]
pub enum CasError {
    #[error("chunk of {0} bytes exceeds 262144")]
    ChunkTooLarge(usize),
    #[error("{0} links exceeds the fan-out cap of 1024")]
    TooManyLinks(usize),
    #[error("invalid node: {0}")]
    InvalidNode(String),
    #[error("malformed node encoding: {0}")]
    Malformed(String),
    #[error("file of {0} bytes exceeds the 256 MiB cap")]
    FileTooLarge(usize),
    #[error("bad object hash {0:?}")]
    BadHash(String),
    #[error("object {0} not found")]
    NotFound(ObjectHash),
    #[error("object {0} is corrupt")]
    CorruptObject(ObjectHash),
    #[error("object {0} does not match its link size")]
    SizeMismatch(ObjectHash),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
