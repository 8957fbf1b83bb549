use primitive_types::U256;
use serde::{Deserialize, Serialize};

use crate::canonical::{self, decimal, hex0x, u256};
use crate::digest::{sha256, Hash};

use super::address::Address;
use super::keys::{recover_signer, Signer};
use super::TxError;

pub const DEFAULT_GAS_LIMIT: u64 = 100_000;
pub const DEFAULT_GAS_PRICE: u64 = 0;

/// A signed value transfer between two accounts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transaction {
    pub from: Address,
    pub to: Address,
    #[serde(with = "u256")]
    pub value: U256,
    #[serde(with = "decimal")]
    pub nonce: u64,
    #[serde(with = "u256")]
    pub gas_limit: U256,
    #[serde(with = "u256")]
    pub gas_price: U256,
    #[serde(with = "hex0x")]
    pub signature: Vec<u8>,
    #[serde(with = "hex0x::digest")]
    pub tx_hash: Hash,
}

/// The fields covered by the sender's signature.
#[derive(Serialize)]
struct SigningView<'a> {
    from: &'a Address,
    to: &'a Address,
    #[serde(with = "u256")]
    value: &'a U256,
    #[serde(with = "decimal")]
    nonce: &'a u64,
    #[serde(with = "u256")]
    gas_limit: &'a U256,
    #[serde(with = "u256")]
    gas_price: &'a U256,
}

/// Signing fields plus the signature; hashed to give `tx_hash`.
#[derive(Serialize)]
struct HashView<'a> {
    #[serde(flatten)]
    body: SigningView<'a>,
    #[serde(with = "hex0x")]
    signature: &'a Vec<u8>,
}

/// Gas settings for a transfer. `Default` gives the private-chain values
/// (limit 100000, price 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gas {
    pub limit: U256,
    pub price: U256,
}

impl Default for Gas {
    fn default() -> Self {
        Gas {
            limit: U256::from(DEFAULT_GAS_LIMIT),
            price: U256::from(DEFAULT_GAS_PRICE),
        }
    }
}

impl Transaction {
    fn signing_view(&self) -> SigningView<'_> {
        SigningView {
            from: &self.from,
            to: &self.to,
            value: &self.value,
            nonce: &self.nonce,
            gas_limit: &self.gas_limit,
            gas_price: &self.gas_price,
        }
    }

    pub fn signing_bytes(&self) -> Vec<u8> {
        canonical::to_vec(&self.signing_view())
    }

    pub fn compute_hash(&self) -> Hash {
        sha256(&canonical::to_vec(&HashView {
            body: self.signing_view(),
            signature: &self.signature,
        }))
    }

    /// Canonical encoding of every field, as stored inside a block.
    pub fn encode(&self) -> Vec<u8> {
        canonical::to_vec(self)
    }

    /// Flat fee charged to the sender and credited to the sealer.
    pub fn fee(&self) -> Option<U256> {
        self.gas_limit.checked_mul(self.gas_price)
    }

    /// Check the signature and stored hash, independent of any account state.
    pub fn check_integrity(&self) -> Result<(), TxError> {
        match recover_signer(&self.signature, &self.signing_bytes()) {
            Some(signer) if signer == self.from => {}
            _ => return Err(TxError::BadSignature),
        }
        if self.compute_hash() != self.tx_hash {
            return Err(TxError::TxHashMismatch);
        }
        Ok(())
    }
}

/// Build a transfer from `sender`, sign it and fill in its hash.
pub fn build_and_sign_tx(
    sender: &dyn Signer,
    to: Address,
    value: U256,
    nonce: u64,
    gas: Gas,
) -> Transaction {
    let mut tx = Transaction {
        from: sender.address(),
        to,
        value,
        nonce,
        gas_limit: gas.limit,
        gas_price: gas.price,
        signature: Vec::new(),
        tx_hash: [0; 32],
    };
    tx.signature = sender.sign_sealed(&tx.signing_bytes());
    tx.tx_hash = tx.compute_hash();
    tx
}
