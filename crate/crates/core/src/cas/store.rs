use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use super::node::{hash_node, DagNode, ObjectHash};
use super::CasError;

/// Outcome of a put.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Put {
    Stored(ObjectHash),
    AlreadyPresent(ObjectHash),
}

impl Put {
    pub fn hash(self) -> ObjectHash {
        match self {
            Put::Stored(h) | Put::AlreadyPresent(h) => h,
        }
    }

    pub fn is_new(self) -> bool {
        matches!(self, Put::Stored(_))
    }
}

/// Something that can hand out nodes by hash. The exchange server serves
/// from any implementation.
pub trait NodeSource: Send + Sync {
    fn fetch(&self, hash: &ObjectHash) -> Result<Option<DagNode>, CasError>;
}

/// Directory-backed object store: `objects/<2 hex>/<62 hex>`, each file the
/// node's canonical encoding.
///
/// Writes go to a temp file in the shard directory and are renamed into
/// place, so readers never see a partial object and concurrent puts of the
/// same node are harmless.
#[derive(Debug, Clone)]
pub struct ObjectStore {
    objects: PathBuf,
}

impl ObjectStore {
    pub fn open(root: impl AsRef<Path>) -> Result<Self, CasError> {
        let objects = root.as_ref().join("objects");
        fs::create_dir_all(&objects)?;
        Ok(ObjectStore { objects })
    }

    pub fn object_path(&self, hash: &ObjectHash) -> PathBuf {
        let hex = hash.to_hex();
        self.objects.join(&hex[..2]).join(&hex[2..])
    }

    pub fn contains(&self, hash: &ObjectHash) -> bool {
        self.object_path(hash).is_file()
    }

    pub fn put_node(&self, node: &DagNode) -> Result<Put, CasError> {
        let hash = hash_node(node)?;
        let path = self.object_path(&hash);
        if path.is_file() {
            return Ok(Put::AlreadyPresent(hash));
        }
        let shard = path.parent().expect("object paths are sharded");
        fs::create_dir_all(shard)?;
        let mut tmp = tempfile::NamedTempFile::new_in(shard)?;
        tmp.write_all(&node.encode())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| CasError::Io(e.error))?;
        Ok(Put::Stored(hash))
    }

    /// Read a node and check it still hashes to its name.
    pub fn get_node(&self, hash: &ObjectHash) -> Result<DagNode, CasError> {
        let bytes = match fs::read(self.object_path(hash)) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == ErrorKind::NotFound => return Err(CasError::NotFound(*hash)),
            Err(e) => return Err(e.into()),
        };
        let node = DagNode::decode(&bytes).map_err(|_| CasError::CorruptObject(*hash))?;
        if hash_node(&node)? != *hash {
            return Err(CasError::CorruptObject(*hash));
        }
        Ok(node)
    }

    pub fn remove(&self, hash: &ObjectHash) -> Result<bool, CasError> {
        match fs::remove_file(self.object_path(hash)) {
            Ok(()) => Ok(true),
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(false),
            Err(e) => Err(e.into()),
        }
    }

    /// Hashes of every stored object, sorted. Temp files are skipped.
    pub fn list(&self) -> Result<Vec<ObjectHash>, CasError> {
        let mut out = Vec::new();
        for shard in fs::read_dir(&self.objects)? {
            let shard = shard?;
            if !shard.file_type()?.is_dir() {
                continue;
            }
            let prefix = shard.file_name().to_string_lossy().into_owned();
            for entry in fs::read_dir(shard.path())? {
                let name = entry?.file_name().to_string_lossy().into_owned();
                if let Ok(hash) = format!("{prefix}{name}").parse() {
                    out.push(hash);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn len(&self) -> Result<usize, CasError> {
        Ok(self.list()?.len())
    }

    pub fn is_empty(&self) -> Result<bool, CasError> {
        Ok(self.len()? == 0)
    }

    /// Objects whose content no longer matches their name.
    pub fn audit(&self) -> Result<Vec<ObjectHash>, CasError> {
        let mut bad = Vec::new();
        for hash in self.list()? {
            match self.get_node(&hash) {
                Ok(_) => {}
                Err(CasError::CorruptObject(h)) => bad.push(h),
                Err(e) => return Err(e),
            }
        }
        Ok(bad)
    }
}

impl NodeSource for ObjectStore {
    fn fetch(&self, hash: &ObjectHash) -> Result<Option<DagNode>, CasError> {
        match self.get_node(hash) {
            Ok(node) => Ok(Some(node)),
            Err(CasError::NotFound(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> (tempfile::TempDir, ObjectStore) {
        let dir = tempfile::tempdir().unwrap();
        let store = ObjectStore::open(dir.path()).unwrap();
        (dir, store)
    }

    #[test]
    fn put_then_get() {
        let (_dir, store) = store();
        let node = DagNode::leaf(b"temperature".to_vec());
        let hash = store.put_node(&node).unwrap().hash();
        assert_eq!(store.get_node(&hash).unwrap(), node);
        let hex = hash.to_hex();
        assert!(store
            .object_path(&hash)
            .ends_with(format!("objects/{}/{}", &hex[..2], &hex[2..])));
        assert_eq!(
            std::fs::read(store.object_path(&hash)).unwrap(),
            node.encode()
        );
    }

    #[test]
    fn put_is_idempotent() {
        let (_dir, store) = store();
        let node = DagNode::leaf(vec![7; 100]);
        assert!(store.put_node(&node).unwrap().is_new());
        assert_eq!(store.len().unwrap(), 1);
        assert!(!store.put_node(&node).unwrap().is_new());
        assert_eq!(store.len().unwrap(), 1);
    }

    #[test]
    fn unknown_hash_not_found() {
        let (_dir, store) = store();
        let hash = ObjectHash::from_bytes([5; 32]);
        assert!(matches!(store.get_node(&hash), Err(CasError::NotFound(h)) if h == hash));
        assert_eq!(store.fetch(&hash).unwrap(), None);
    }

    #[test]
    fn corrupted_file_detected() {
        let (_dir, store) = store();
        let hash = store
            .put_node(&DagNode::leaf(b"abc".to_vec()))
            .unwrap()
            .hash();
        let path = store.object_path(&hash);

        std::fs::write(&path, DagNode::leaf(b"abd".to_vec()).encode()).unwrap();
        assert!(matches!(store.get_node(&hash), Err(CasError::CorruptObject(h)) if h == hash));

        std::fs::write(&path, b"not json").unwrap();
        assert!(matches!(
            store.get_node(&hash),
            Err(CasError::CorruptObject(_))
        ));
        assert_eq!(store.audit().unwrap(), vec![hash]);
    }

    #[test]
    fn invalid_node_not_stored() {
        let (_dir, store) = store();
        assert!(store
            .put_node(&DagNode::leaf(vec![0; super::super::CHUNK_SIZE + 1]))
            .is_err());
        assert!(store.is_empty().unwrap());
    }

    #[test]
    fn concurrent_puts_of_same_node() {
        let (_dir, store) = store();
        let node = DagNode::leaf(vec![3; 4096]);
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| store.put_node(&node).unwrap());
            }
        });
        assert_eq!(store.len().unwrap(), 1);
        assert!(store.audit().unwrap().is_empty());
    }
}
