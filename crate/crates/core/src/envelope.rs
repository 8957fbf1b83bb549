//! Hybrid encryption for published files.
//!
//! Each envelope gets a fresh 256-bit file key. The payload is sealed with
//! ChaCha20-Poly1305 under that key, and the key itself is wrapped for one
//! recipient: an ephemeral X25519 agreement with the recipient's public key,
//! HKDF-SHA256 to a key-encryption key, then ChaCha20-Poly1305 again.
//!
//! Serialized form is canonical JSON with base64 byte fields:
//! `{"ciphertext","nonce","recipient_fingerprint","version","wrapped_key"}`.
//! `wrapped_key` is the 32-byte ephemeral public key followed by the
//! 48-byte sealed file key. The header fields are bound into the payload as
//! associated data, so every byte of the envelope is authenticated.

use chacha20poly1305::aead::{Aead, KeyInit, Payload};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce};
use hkdf::Hkdf;
use rand::rngs::OsRng;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::Sha256;
use thiserror::Error;
use x25519_dalek::{EphemeralSecret, PublicKey, StaticSecret};

use crate::canonical::{self, b64, decimal};
use crate::digest::sha256;

/// X25519 + HKDF-SHA256 key wrap, ChaCha20-Poly1305 payload.
pub const ENVELOPE_VERSION: u32 = 1;

const WRAP_INFO: &[u8] = b"thermoledger envelope v1 key wrap";
const KEY_LEN: usize = 32;
const NONCE_LEN: usize = 12;
const TAG_LEN: usize = 16;
const WRAPPED_KEY_LEN: usize = KEY_LEN + KEY_LEN + TAG_LEN;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("invalid public key")]
    InvalidKey,
    #[error("envelope is addressed to another recipient")]
    WrongRecipient,
    #[error("envelope failed authentication")]
    AuthenticationFailed,
    #[error("malformed envelope: {0}")]
    MalformedEnvelope(String),
}

/// A recipient's X25519 keypair.
#[derive(Clone)]
pub struct Identity {
    secret: StaticSecret,
    public: PublicKey,
}

impl Identity {
    pub fn generate() -> Self {
        Self::from_secret_bytes(random_array())
    }

    pub fn from_secret_bytes(bytes: [u8; 32]) -> Self {
        let secret = StaticSecret::from(bytes);
        let public = PublicKey::from(&secret);
        Identity { secret, public }
    }

    pub fn public_key(&self) -> [u8; 32] {
        self.public.to_bytes()
    }

    pub fn fingerprint(&self) -> String {
        fingerprint(&self.public_key())
    }

    /// Key file format: `0x` + 64 hex chars.
    pub fn to_hex(&self) -> String {
        format!("0x{}", hex::encode(self.secret.to_bytes()))
    }

    pub fn from_hex(text: &str) -> Result<Self, EnvelopeError> {
        Ok(Self::from_secret_bytes(parse_key_hex(text)?))
    }
}

impl std::fmt::Debug for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Identity")
            .field("fingerprint", &self.fingerprint())
            .finish()
    }
}

/// Parse a public or secret key written as `0x` + 64 hex chars.
pub fn parse_key_hex(text: &str) -> Result<[u8; 32], EnvelopeError> {
    let body = text
        .trim()
        .strip_prefix("0x")
        .ok_or(EnvelopeError::InvalidKey)?;
    let mut out = [0u8; 32];
    hex::decode_to_slice(body, &mut out).map_err(|_| EnvelopeError::InvalidKey)?;
    Ok(out)
}

/// Hex SHA-256 of a public key.
pub fn fingerprint(public_key: &[u8]) -> String {
    hex::encode(sha256(public_key))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    #[serde(with = "decimal")]
    pub version: u32,
    pub recipient_fingerprint: String,
    #[serde(with = "b64")]
    pub wrapped_key: Vec<u8>,
    #[serde(with = "b64")]
    pub nonce: Vec<u8>,
    #[serde(with = "b64")]
    pub ciphertext: Vec<u8>,
}

#[derive(Serialize)]
struct HeaderView<'a> {
    #[serde(with = "decimal")]
    version: &'a u32,
    recipient_fingerprint: &'a str,
    #[serde(with = "b64")]
    wrapped_key: &'a Vec<u8>,
}

impl Envelope {
    fn associated_data(&self) -> Vec<u8> {
        canonical::to_vec(&HeaderView {
            version: &self.version,
            recipient_fingerprint: &self.recipient_fingerprint,
            wrapped_key: &self.wrapped_key,
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        canonical::to_vec(self)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, EnvelopeError> {
        let envelope: Envelope = canonical::from_slice(bytes)
            .map_err(|e| EnvelopeError::MalformedEnvelope(e.to_string()))?;
        if envelope.version != ENVELOPE_VERSION {
            return Err(EnvelopeError::MalformedEnvelope(format!(
                "unsupported version {}",
                envelope.version
            )));
        }
        if envelope.wrapped_key.len() != WRAPPED_KEY_LEN {
            return Err(EnvelopeError::MalformedEnvelope(
                "wrapped key length".into(),
            ));
        }
        if envelope.nonce.len() != NONCE_LEN {
            return Err(EnvelopeError::MalformedEnvelope("nonce length".into()));
        }
        Ok(envelope)
    }
}

fn random_array<const N: usize>() -> [u8; N] {
    let mut out = [0u8; N];
    OsRng.fill_bytes(&mut out);
    out
}

fn key_encryption_key(
    shared: &[u8; 32],
    ephemeral: &[u8; 32],
    recipient: &[u8; 32],
) -> ChaCha20Poly1305 {
    let mut salt = [0u8; 64];
    salt[..32].copy_from_slice(ephemeral);
    salt[32..].copy_from_slice(recipient);
    let mut kek = [0u8; KEY_LEN];
    Hkdf::<Sha256>::new(Some(&salt), shared)
        .expand(WRAP_INFO, &mut kek)
        .expect("32 bytes is a valid HKDF output length");
    ChaCha20Poly1305::new(Key::from_slice(&kek))
}

// Each KEK is used exactly once, so a fixed nonce is safe for the wrap.
const WRAP_NONCE: [u8; NONCE_LEN] = [0; NONCE_LEN];

/// Encrypt `plaintext` so only the holder of `recipient_public_key`'s secret
/// can read it. Returns the serialized envelope.
pub fn encrypt_for(
    recipient_public_key: &[u8],
    plaintext: &[u8],
) -> Result<Vec<u8>, EnvelopeError> {
    let recipient: [u8; 32] = recipient_public_key
        .try_into()
        .map_err(|_| EnvelopeError::InvalidKey)?;
    let ephemeral = EphemeralSecret::random_from_rng(OsRng);
    let ephemeral_public = PublicKey::from(&ephemeral).to_bytes();
    let shared = ephemeral.diffie_hellman(&PublicKey::from(recipient));
    if !shared.was_contributory() {
        return Err(EnvelopeError::InvalidKey);
    }

    let file_key: [u8; KEY_LEN] = random_array();
    let kek = key_encryption_key(shared.as_bytes(), &ephemeral_public, &recipient);
    let sealed_key = kek
        .encrypt(Nonce::from_slice(&WRAP_NONCE), &file_key[..])
        .expect("in-memory encryption cannot fail");
    let mut wrapped_key = ephemeral_public.to_vec();
    wrapped_key.extend_from_slice(&sealed_key);

    let mut envelope = Envelope {
        version: ENVELOPE_VERSION,
        recipient_fingerprint: fingerprint(&recipient),
        wrapped_key,
        nonce: random_array::<NONCE_LEN>().to_vec(),
        ciphertext: Vec::new(),
    };
    let aad = envelope.associated_data();
    envelope.ciphertext = ChaCha20Poly1305::new(Key::from_slice(&file_key))
        .encrypt(
            Nonce::from_slice(&envelope.nonce),
            Payload {
                msg: plaintext,
                aad: &aad,
            },
        )
        .expect("in-memory encryption cannot fail");
    Ok(envelope.encode())
}

/// Open a serialized envelope with `identity`.
pub fn decrypt(envelope: &[u8], identity: &Identity) -> Result<Vec<u8>, EnvelopeError> {
    let envelope = Envelope::decode(envelope)?;
    if envelope.recipient_fingerprint != identity.fingerprint() {
        return Err(EnvelopeError::WrongRecipient);
    }
    let (ephemeral, sealed_key) = envelope.wrapped_key.split_at(KEY_LEN);
    let ephemeral: [u8; 32] = ephemeral.try_into().expect("length checked in decode");
    let shared = identity.secret.diffie_hellman(&PublicKey::from(ephemeral));
    if !shared.was_contributory() {
        return Err(EnvelopeError::AuthenticationFailed);
    }
    let kek = key_encryption_key(shared.as_bytes(), &ephemeral, &identity.public_key());
    let file_key = kek
        .decrypt(Nonce::from_slice(&WRAP_NONCE), sealed_key)
        .map_err(|_| EnvelopeError::AuthenticationFailed)?;
    let aad = envelope.associated_data();
    ChaCha20Poly1305::new(Key::from_slice(&file_key))
        .decrypt(
            Nonce::from_slice(&envelope.nonce),
            Payload {
                msg: &envelope.ciphertext,
                aad: &aad,
            },
        )
        .map_err(|_| EnvelopeError::AuthenticationFailed)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use proptest::prelude::*;
    use rand::RngCore;

    #[test]
    fn identities_are_distinct() {
        let prints: HashSet<String> = (0..100)
            .map(|_| Identity::generate().fingerprint())
            .collect();
        assert_eq!(prints.len(), 100);
    }

    #[test]
    fn fingerprint_from_public_key_alone() {
        let id = Identity::generate();
        assert_eq!(fingerprint(&id.public_key()), id.fingerprint());
        let back = Identity::from_hex(&id.to_hex()).unwrap();
        assert_eq!(back.fingerprint(), id.fingerprint());
    }

    #[test]
    fn empty_plaintext_round_trips() {
        let id = Identity::generate();
        let sealed = encrypt_for(&id.public_key(), b"").unwrap();
        assert_eq!(decrypt(&sealed, &id).unwrap(), b"");
    }

    #[test]
    fn encryption_is_randomized() {
        let id = Identity::generate();
        let a = Envelope::decode(&encrypt_for(&id.public_key(), b"same bytes").unwrap()).unwrap();
        let b = Envelope::decode(&encrypt_for(&id.public_key(), b"same bytes").unwrap()).unwrap();
        assert_ne!(a.ciphertext, b.ciphertext);
        assert_ne!(a.wrapped_key, b.wrapped_key);
        assert_ne!(a.nonce, b.nonce);
    }

    #[test]
    fn other_identity_is_wrong_recipient() {
        let alice = Identity::generate();
        let mallory = Identity::generate();
        let sealed = encrypt_for(&alice.public_key(), b"records").unwrap();
        assert_eq!(
            decrypt(&sealed, &mallory),
            Err(EnvelopeError::WrongRecipient)
        );
    }

    #[test]
    fn bad_public_keys_rejected() {
        assert_eq!(encrypt_for(&[1; 31], b"x"), Err(EnvelopeError::InvalidKey));
        // The identity point gives an all-zero shared secret.
        assert_eq!(encrypt_for(&[0; 32], b"x"), Err(EnvelopeError::InvalidKey));
    }

    #[test]
    fn every_single_byte_mutation_is_detected() {
        let id = Identity::generate();
        let sealed = encrypt_for(&id.public_key(), b"22.9,22.8,22.7").unwrap();
        for i in 0..sealed.len() {
            for flip in [0x01u8, 0x20, 0x80] {
                let mut bad = sealed.clone();
                bad[i] ^= flip;
                assert!(decrypt(&bad, &id).is_err(), "byte {i} flip {flip:#x}");
            }
        }
    }

    #[test]
    fn ciphertext_flip_fails_authentication() {
        let id = Identity::generate();
        let mut envelope =
            Envelope::decode(&encrypt_for(&id.public_key(), b"abc").unwrap()).unwrap();
        envelope.ciphertext[0] ^= 1;
        assert_eq!(
            decrypt(&envelope.encode(), &id),
            Err(EnvelopeError::AuthenticationFailed)
        );
    }

    #[test]
    fn layout_uses_expected_keys() {
        let id = Identity::generate();
        let sealed = String::from_utf8(encrypt_for(&id.public_key(), b"x").unwrap()).unwrap();
        assert!(sealed.starts_with(r#"{"ciphertext":""#));
        assert!(sealed.contains(&format!(
            r#""recipient_fingerprint":"{}""#,
            id.fingerprint()
        )));
        assert!(sealed.contains(r#""version":"1""#));
    }

    #[test]
    fn multi_megabyte_round_trip() {
        let id = Identity::generate();
        let mut data = vec![0u8; 4 * 1024 * 1024];
        OsRng.fill_bytes(&mut data);
        let sealed = encrypt_for(&id.public_key(), &data).unwrap();
        assert_eq!(decrypt(&sealed, &id).unwrap(), data);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn round_trip(data in prop::collection::vec(any::<u8>(), 0..5000)) {
            let id = Identity::generate();
            let sealed = encrypt_for(&id.public_key(), &data).unwrap();
            prop_assert_eq!(decrypt(&sealed, &id).unwrap(), data);
        }
    }
}
