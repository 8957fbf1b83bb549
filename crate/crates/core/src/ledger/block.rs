use serde::{Deserialize, Serialize};

use crate::canonical::{self, decimal, hex0x};
use crate::digest::{sha256, Hash, ZERO_HASH};

use super::keys::{recover_signer, Signer};
use super::merkle::merkle_root;
use super::state::{ChainState, GenesisConfig, Head};
use super::tx::Transaction;
use super::{ChainError, ChainFault, SealError};

/// An authority-sealed batch of transactions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    #[serde(with = "decimal")]
    pub height: u64,
    #[serde(with = "hex0x::digest")]
    pub prev_hash: Hash,
    #[serde(with = "hex0x::digest")]
    pub merkle_root: Hash,
    #[serde(with = "decimal")]
    pub timestamp: u64,
    pub transactions: Vec<Transaction>,
    #[serde(with = "hex0x")]
    pub sealer_signature: Vec<u8>,
    #[serde(with = "hex0x::digest")]
    pub block_hash: Hash,
}

#[derive(Serialize)]
struct HeaderView<'a> {
    #[serde(with = "decimal")]
    height: &'a u64,
    #[serde(with = "hex0x::digest")]
    prev_hash: &'a Hash,
    #[serde(with = "hex0x::digest")]
    merkle_root: &'a Hash,
    #[serde(with = "decimal")]
    timestamp: &'a u64,
}

#[derive(Serialize)]
struct SealedHeaderView<'a> {
    #[serde(flatten)]
    header: HeaderView<'a>,
    #[serde(with = "hex0x")]
    sealer_signature: &'a Vec<u8>,
}

impl Block {
    fn header_view(&self) -> HeaderView<'_> {
        HeaderView {
            height: &self.height,
            prev_hash: &self.prev_hash,
            merkle_root: &self.merkle_root,
            timestamp: &self.timestamp,
        }
    }

    /// Bytes the sealer signs.
    pub fn header_bytes(&self) -> Vec<u8> {
        canonical::to_vec(&self.header_view())
    }

    pub fn compute_hash(&self) -> Hash {
        sha256(&canonical::to_vec(&SealedHeaderView {
            header: self.header_view(),
            sealer_signature: &self.sealer_signature,
        }))
    }

    /// Merkle root recomputed from the transactions as stored, rehashing
    /// each one rather than trusting its `tx_hash` field.
    pub fn compute_merkle_root(&self) -> Hash {
        let hashes: Vec<Hash> = self
            .transactions
            .iter()
            .map(Transaction::compute_hash)
            .collect();
        merkle_root(&hashes)
    }

    pub fn encode(&self) -> Vec<u8> {
        canonical::to_vec(self)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, canonical::CanonicalError> {
        canonical::from_slice(bytes)
    }

    fn sealed(
        height: u64,
        prev_hash: Hash,
        timestamp: u64,
        transactions: Vec<Transaction>,
        sealer: &dyn Signer,
    ) -> Block {
        let mut block = Block {
            height,
            prev_hash,
            merkle_root: ZERO_HASH,
            timestamp,
            transactions,
            sealer_signature: Vec::new(),
            block_hash: ZERO_HASH,
        };
        block.merkle_root = block.compute_merkle_root();
        block.sealer_signature = sealer.sign_sealed(&block.header_bytes());
        block.block_hash = block.compute_hash();
        block
    }

    /// Height 0, zero parent, no transactions, timestamp 0.
    pub fn genesis(sealer: &dyn Signer) -> Block {
        Block::sealed(0, ZERO_HASH, 0, Vec::new(), sealer)
    }

    pub fn head(&self) -> Head {
        Head {
            hash: self.block_hash,
            height: self.height,
        }
    }
}

/// State right after the genesis block sealed by `sealer`.
pub fn genesis_state(genesis: GenesisConfig, genesis_block: &Block) -> ChainState {
    let sealer = recover_signer(
        &genesis_block.sealer_signature,
        &genesis_block.header_bytes(),
    )
    .expect("genesis block is sealed");
    let mut state = ChainState::from_genesis(genesis, sealer);
    state.set_head(genesis_block.head());
    state
}

/// Apply `pending` in order on top of `state` and seal the result as the
/// next block. Nothing is applied unless every transaction succeeds.
pub fn seal_block(
    pending: Vec<Transaction>,
    state: &ChainState,
    sealer: &dyn Signer,
    timestamp: u64,
) -> Result<(Block, ChainState), SealError> {
    if sealer.address() != state.sealer() {
        return Err(SealError::UnauthorizedSealer(sealer.address()));
    }
    let mut next = state.clone();
    for (index, tx) in pending.iter().enumerate() {
        next.apply_tx_mut(tx)
            .map_err(|cause| SealError::Rejected { index, cause })?;
    }
    let head = state.head();
    let block = Block::sealed(head.height + 1, head.hash, timestamp, pending, sealer);
    next.set_head(block.head());
    Ok((block, next))
}

fn check_header(block: &Block) -> Result<super::Address, ChainFault> {
    if block.compute_merkle_root() != block.merkle_root {
        return Err(ChainFault::MerkleRootMismatch);
    }
    if block.compute_hash() != block.block_hash {
        return Err(ChainFault::BlockHashMismatch);
    }
    recover_signer(&block.sealer_signature, &block.header_bytes())
        .ok_or(ChainFault::BadSealerSignature)
}

/// Replay `blocks` from `genesis`, checking every link, root, seal and
/// transaction. Returns the resulting state.
pub fn verify_chain(blocks: &[Block], genesis: &GenesisConfig) -> Result<ChainState, ChainError> {
    let at = |height: u64| move |fault: ChainFault| ChainError { height, fault };

    let first = blocks.first().ok_or(ChainError {
        height: 0,
        fault: ChainFault::MissingGenesis,
    })?;
    if first.height != 0 || first.prev_hash != ZERO_HASH {
        return Err(at(first.height)(ChainFault::BrokenLink));
    }
    if !first.transactions.is_empty() || first.timestamp != 0 {
        return Err(at(0)(ChainFault::BadGenesis));
    }
    let sealer = check_header(first).map_err(at(0))?;
    let mut state = genesis_state(genesis.clone(), first);

    for (expected_height, block) in (1u64..).zip(&blocks[1..]) {
        let fail = at(block.height);
        if block.height != expected_height || block.prev_hash != state.head().hash {
            return Err(fail(ChainFault::BrokenLink));
        }
        if check_header(block).map_err(at(block.height))? != sealer {
            return Err(fail(ChainFault::BadSealerSignature));
        }
        for (index, tx) in block.transactions.iter().enumerate() {
            state.apply_tx_mut(tx).map_err(|cause| ChainError {
                height: block.height,
                fault: ChainFault::Tx { index, cause },
            })?;
        }
        state.set_head(block.head());
    }
    Ok(state)
}
