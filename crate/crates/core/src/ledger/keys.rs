//! Signing keys for sensor wallets and the block sealer.
//!
//! A signature as stored on chain is the signer's public key followed by the
//! raw signature, so a verifier can check that the key hashes to the claimed
//! address without a separate key directory.

use ed25519_dalek::{Signature, Signer as _, SigningKey, VerifyingKey};
use rand::rngs::OsRng;

use super::address::{derive_address, Address};
use super::LedgerError;

pub const PUBLIC_KEY_LEN: usize = 32;
pub const SEALED_SIGNATURE_LEN: usize = PUBLIC_KEY_LEN + 64;

/// Anything that can produce a sealed signature for a ledger address.
pub trait Signer: Send + Sync {
    fn public_key(&self) -> Vec<u8>;

    /// Sign `message`, returning `public_key || signature`.
    fn sign_sealed(&self, message: &[u8]) -> Vec<u8>;

    fn address(&self) -> Address {
        derive_address(&self.public_key()).expect("signer exposes a valid public key")
    }
}

/// Ed25519 keypair, the default ledger signing scheme.
#[derive(Clone)]
pub struct Keypair {
    signing: SigningKey,
}

impl Keypair {
    pub fn generate() -> Self {
        Keypair {
            signing: SigningKey::generate(&mut OsRng),
        }
    }

    pub fn from_seed(seed: [u8; 32]) -> Self {
        Keypair {
            signing: SigningKey::from_bytes(&seed),
        }
    }

    pub fn seed(&self) -> [u8; 32] {
        self.signing.to_bytes()
    }

    /// Parse the on-disk key file format: `0x` + 64 hex chars of seed.
    pub fn from_hex(text: &str) -> Result<Self, LedgerError> {
        let body = text
            .trim()
            .strip_prefix("0x")
            .ok_or(LedgerError::InvalidKey)?;
        let mut seed = [0u8; 32];
        hex::decode_to_slice(body, &mut seed).map_err(|_| LedgerError::InvalidKey)?;
        Ok(Self::from_seed(seed))
    }

    pub fn to_hex(&self) -> String {
        format!("0x{}", hex::encode(self.seed()))
    }
}

impl std::fmt::Debug for Keypair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Keypair")
            .field("address", &self.address())
            .finish()
    }
}

impl Signer for Keypair {
    fn public_key(&self) -> Vec<u8> {
        self.signing.verifying_key().to_bytes().to_vec()
    }

    fn sign_sealed(&self, message: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(SEALED_SIGNATURE_LEN);
        out.extend_from_slice(&self.public_key());
        out.extend_from_slice(&self.signing.sign(message).to_bytes());
        out
    }
}

/// Verify a sealed signature over `message` and return the signer's address.
pub fn recover_signer(sealed: &[u8], message: &[u8]) -> Option<Address> {
    if sealed.len() != SEALED_SIGNATURE_LEN {
        return None;
    }
    let (key, sig) = sealed.split_at(PUBLIC_KEY_LEN);
    let key = VerifyingKey::from_bytes(key.try_into().ok()?).ok()?;
    let sig = Signature::from_slice(sig).ok()?;
    key.verify_strict(message, &sig).ok()?;
    derive_address(key.as_bytes()).ok()
}
