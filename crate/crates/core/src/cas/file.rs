use super::node::{DagNode, Link, ObjectHash, CHUNK_SIZE, MAX_LINKS};
use super::store::ObjectStore;
use super::CasError;

pub const MAX_FILE_SIZE: usize = CHUNK_SIZE * MAX_LINKS;

/// Size and shape of a stored file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stat {
    pub total_size: u64,
    pub node_count: u64,
    pub depth: u32,
}

/// Store `content` and return its root. Content up to one chunk is a
/// single leaf; anything longer becomes one interior node over 256 KiB
/// leaves.
pub fn add_file(store: &ObjectStore, content: &[u8]) -> Result<ObjectHash, CasError> {
    if content.len() > MAX_FILE_SIZE {
        return Err(CasError::FileTooLarge(content.len()));
    }
    if content.len() <= CHUNK_SIZE {
        return Ok(store.put_node(&DagNode::leaf(content.to_vec()))?.hash());
    }
    let links = content
        .chunks(CHUNK_SIZE)
        .map(|chunk| {
            let hash = store.put_node(&DagNode::leaf(chunk.to_vec()))?.hash();
            Ok(Link::chunk(hash, chunk.len() as u64))
        })
        .collect::<Result<Vec<_>, CasError>>()?;
    Ok(store.put_node(&DagNode::interior(links))?.hash())
}

/// Reassemble the file under `root`, checking every link's size.
pub fn cat_file(store: &ObjectStore, root: &ObjectHash) -> Result<Vec<u8>, CasError> {
    let mut out = Vec::new();
    append_subtree(store, root, &mut out)?;
    Ok(out)
}

fn append_subtree(
    store: &ObjectStore,
    hash: &ObjectHash,
    out: &mut Vec<u8>,
) -> Result<(), CasError> {
    let node = store.get_node(hash)?;
    if node.is_leaf() {
        out.extend_from_slice(&node.data);
        return Ok(());
    }
    for link in &node.links {
        let before = out.len();
        append_subtree(store, &link.hash, out)?;
        if (out.len() - before) as u64 != link.size {
            return Err(CasError::SizeMismatch(link.hash));
        }
    }
    Ok(())
}

/// Size and shape from the root alone, using link sizes.
pub fn stat(store: &ObjectStore, root: &ObjectHash) -> Result<Stat, CasError> {
    let node = store.get_node(root)?;
    if node.is_leaf() {
        return Ok(Stat {
            total_size: node.data.len() as u64,
            node_count: 1,
            depth: 1,
        });
    }
    Ok(Stat {
        total_size: node.links.iter().map(|l| l.size).sum(),
        node_count: 1 + node.links.len() as u64,
        depth: 2,
    })
}

/// Same as [`stat`], but by reading every reachable node.
pub fn stat_by_traversal(store: &ObjectStore, root: &ObjectHash) -> Result<Stat, CasError> {
    let node = store.get_node(root)?;
    if node.is_leaf() {
        return Ok(Stat {
            total_size: node.data.len() as u64,
            node_count: 1,
            depth: 1,
        });
    }
    let mut total = Stat {
        total_size: 0,
        node_count: 1,
        depth: 0,
    };
    for link in &node.links {
        let child = stat_by_traversal(store, &link.hash)?;
        total.total_size += child.total_size;
        total.node_count += child.node_count;
        total.depth = total.depth.max(child.depth);
    }
    total.depth += 1;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn store() -> (tempfile::TempDir, ObjectStore) {
        let dir = tempfile::tempdir().unwrap();
        let store = ObjectStore::open(dir.path()).unwrap();
        (dir, store)
    }

    fn random_bytes(len: usize, seed: u64) -> Vec<u8> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut out = vec![0u8; len];
        rng.fill(&mut out[..]);
        out
    }

    // Oracle: expected node count from the chunking rule alone.
    fn expected_nodes(len: usize) -> u64 {
        if len <= CHUNK_SIZE {
            1
        } else {
            len.div_ceil(CHUNK_SIZE) as u64 + 1
        }
    }

    #[test]
    fn empty_file_is_one_empty_leaf() {
        let (_dir, store) = store();
        let root = add_file(&store, b"").unwrap();
        assert_eq!(store.len().unwrap(), 1);
        assert_eq!(cat_file(&store, &root).unwrap(), b"");
        assert_eq!(
            stat(&store, &root).unwrap(),
            Stat {
                total_size: 0,
                node_count: 1,
                depth: 1
            }
        );
    }

    #[test]
    fn exactly_one_chunk_is_a_single_leaf() {
        let (_dir, store) = store();
        let root = add_file(&store, &random_bytes(CHUNK_SIZE, 1)).unwrap();
        assert!(store.get_node(&root).unwrap().is_leaf());
        assert_eq!(store.len().unwrap(), 1);
    }

    #[test]
    fn million_bytes_is_four_leaves_and_a_root() {
        let (_dir, store) = store();
        let content = random_bytes(1_000_000, 2);
        let root = add_file(&store, &content).unwrap();
        assert_eq!(store.len().unwrap(), 5);
        let node = store.get_node(&root).unwrap();
        let sizes: Vec<u64> = node.links.iter().map(|l| l.size).collect();
        assert_eq!(sizes, [262_144, 262_144, 262_144, 213_568]);
        assert_eq!(sizes.iter().sum::<u64>(), 1_000_000);
        let expected = Stat {
            total_size: 1_000_000,
            node_count: 5,
            depth: 2,
        };
        assert_eq!(stat(&store, &root).unwrap(), expected);
        assert_eq!(stat_by_traversal(&store, &root).unwrap(), expected);
        assert_eq!(cat_file(&store, &root).unwrap(), content);
    }

    #[test]
    fn boundary_sizes_round_trip() {
        let (_dir, store) = store();
        for (i, len) in [
            0,
            1,
            CHUNK_SIZE - 1,
            CHUNK_SIZE,
            CHUNK_SIZE + 1,
            4 * 1024 * 1024,
        ]
        .into_iter()
        .enumerate()
        {
            let content = random_bytes(len, 10 + i as u64);
            let before = store.len().unwrap();
            let root = add_file(&store, &content).unwrap();
            assert_eq!(
                store.len().unwrap() - before,
                expected_nodes(len) as usize,
                "len {len}"
            );
            assert_eq!(cat_file(&store, &root).unwrap(), content, "len {len}");
            assert_eq!(stat(&store, &root).unwrap().total_size, len as u64);
            assert_eq!(
                stat(&store, &root).unwrap(),
                stat_by_traversal(&store, &root).unwrap()
            );
        }
    }

    #[test]
    fn oversized_file_rejected() {
        let (_dir, store) = store();
        let content = vec![0u8; MAX_FILE_SIZE + 1];
        assert!(matches!(
            add_file(&store, &content),
            Err(CasError::FileTooLarge(_))
        ));
        assert!(store.is_empty().unwrap());
    }

    #[test]
    fn adding_twice_dedups_across_stores() {
        let (_a, first) = store();
        let (_b, second) = store();
        let content = random_bytes(700_000, 3);
        let root = add_file(&first, &content).unwrap();
        let count = first.len().unwrap();
        assert_eq!(add_file(&first, &content).unwrap(), root);
        assert_eq!(first.len().unwrap(), count);
        assert_eq!(add_file(&second, &content).unwrap(), root);
    }

    #[test]
    fn edit_changes_root_but_shares_chunks() {
        let (_dir, store) = store();
        let v1 = random_bytes(1_000_000, 4);
        let mut v2 = v1.clone();
        v2[999_999] ^= 1;
        let r1 = add_file(&store, &v1).unwrap();
        let r2 = add_file(&store, &v2).unwrap();
        assert_ne!(r1, r2);
        // Three leading chunks shared; last leaf and root differ.
        assert_eq!(store.len().unwrap(), 5 + 2);
    }

    #[test]
    fn missing_leaf_named_in_error() {
        let (_dir, store) = store();
        let root = add_file(&store, &random_bytes(600_000, 5)).unwrap();
        let victim = store.get_node(&root).unwrap().links[1].hash;
        store.remove(&victim).unwrap();
        assert!(matches!(cat_file(&store, &root), Err(CasError::NotFound(h)) if h == victim));
        assert!(
            matches!(stat_by_traversal(&store, &root), Err(CasError::NotFound(h)) if h == victim)
        );
        assert!(stat(&store, &root).is_ok());
    }

    #[test]
    fn lying_link_size_detected() {
        let (_dir, store) = store();
        let a = store
            .put_node(&DagNode::leaf(b"aaaa".to_vec()))
            .unwrap()
            .hash();
        let b = store
            .put_node(&DagNode::leaf(b"bb".to_vec()))
            .unwrap()
            .hash();
        let root = store
            .put_node(&DagNode::interior(vec![
                Link::chunk(a, 4),
                Link::chunk(b, 3),
            ]))
            .unwrap()
            .hash();
        assert!(matches!(cat_file(&store, &root), Err(CasError::SizeMismatch(h)) if h == b));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn size_algebra(len in 0usize..(3 * CHUNK_SIZE + 10), seed in any::<u64>()) {
            let (_dir, store) = store();
            let content = random_bytes(len, seed);
            let root = add_file(&store, &content).unwrap();
            let s = stat(&store, &root).unwrap();
            prop_assert_eq!(s.total_size, len as u64);
            prop_assert_eq!(s.node_count, expected_nodes(len));
            prop_assert_eq!(cat_file(&store, &root).unwrap(), content);
        }

        #[test]
        fn single_byte_edit_changes_root(len in 1usize..(2 * CHUNK_SIZE), pos in any::<prop::sample::Index>(), seed in any::<u64>()) {
            let (_dir, store) = store();
            let content = random_bytes(len, seed);
            let mut edited = content.clone();
            edited[pos.index(len)] ^= 0xff;
            prop_assert_ne!(add_file(&store, &content).unwrap(), add_file(&store, &edited).unwrap());
        }
    }
}
