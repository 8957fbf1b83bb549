//! Account-balance ledger: signed transfers, authority-sealed blocks and
//! full-chain replay.

mod address;
mod block;
mod chain;
mod keys;
mod merkle;
mod state;
mod tx;

use primitive_types::U256;
use thiserror::Error;

pub use address::{derive_address, Address};
pub use block::{genesis_state, seal_block, verify_chain, Block};
pub use chain::{query_transactions, read_blocks, Chain, TxFilter, TxRow};
pub use keys::{recover_signer, Keypair, Signer};
pub use merkle::merkle_root;
pub use state::{apply_tx, verify_tx, Account, ChainState, GenesisConfig, Head};
pub use tx::{build_and_sign_tx, Gas, Transaction, DEFAULT_GAS_LIMIT, DEFAULT_GAS_PRICE};

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("invalid public key")]
    InvalidKey,
    #[error("invalid address {0:?}")]
    InvalidAddress(String),
    #[error("bad genesis config: {0}")]
    Genesis(String),
    #[error("chain file line {line}: {reason}")]
    ChainFile { line: usize, reason: String },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Seal(#[from] SealError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TxError {
    #[error("signature does not verify for the sender")]
    BadSignature,
    #[error("stored tx hash does not match its contents")]
    TxHashMismatch,
    #[error("nonce mismatch: expected {expected}, found {found}")]
    NonceMismatch { expected: u64, found: u64 },
    #[error("insufficient balance: need {required}, have {available}")]
    InsufficientBalance { required: U256, available: U256 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SealError {
    #[error("seal rejected at tx {index}: {cause}")]
    Rejected { index: usize, cause: TxError },
    #[error("{0} is not the chain's sealer")]
    UnauthorizedSealer(Address),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainFault {
    #[error("chain has no genesis block")]
    MissingGenesis,
    #[error("genesis block must be empty with timestamp 0")]
    BadGenesis,
    #[error("block hash mismatch")]
    BlockHashMismatch,
    #[error("broken link to parent")]
    BrokenLink,
    #[error("merkle root mismatch")]
    MerkleRootMismatch,
    #[error("bad sealer signature")]
    BadSealerSignature,
    #[error("tx {index}: {cause}")]
    Tx { index: usize, cause: TxError },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("block {height}: {fault}")]
pub struct ChainError {
    pub height: u64,
    pub fault: ChainFault,
}
