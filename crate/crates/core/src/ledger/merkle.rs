use crate::digest::{sha256, sha256_pair, Hash};

/// Binary Merkle root over transaction hashes.
///
/// Each layer hashes adjacent pairs; a layer with an odd count pairs its
/// last element with itself. One leaf is its own root and the empty list
/// maps to SHA-256 of the empty string.
pub fn merkle_root(leaves: &[Hash]) -> Hash {
    if leaves.is_empty() {
        return sha256(&[]);
    }
    let mut layer = leaves.to_vec();
    while layer.len() > 1 {
        layer = layer
            .chunks(2)
            .map(|pair| match pair {
                [left, right] => sha256_pair(left, right),
                [only] => sha256_pair(only, only),
                _ => unreachable!(),
            })
            .collect();
    }
    layer[0]
}
