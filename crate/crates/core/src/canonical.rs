//! Canonical JSON encoding shared by every on-disk and on-wire structure.
//!
//! Rules: object keys sorted bytewise ascending, no insignificant whitespace,
//! integers rendered as decimal strings, byte strings as text (hex or base64,
//! depending on the structure). Decoding is strict: the input must be exactly
//! the bytes that re-encoding the decoded value produces, so two distinct byte
//! strings never decode to the same value.

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CanonicalError {
    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("input is not in canonical form")]
    NonCanonical,
}

/// Encode a value as canonical JSON bytes.
///
/// Going through `serde_json::Value` sorts object keys, since the default
/// map type is a `BTreeMap<String, _>`.
pub fn to_vec<T: Serialize>(value: &T) -> Vec<u8> {
    let tree = serde_json::to_value(value).expect("canonical types always serialize");
    serde_json::to_vec(&tree).expect("a json value always serializes")
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    String::from_utf8(to_vec(value)).expect("serde_json emits utf-8")
}

/// Decode canonical JSON, rejecting any input that is not byte-identical to
/// the canonical encoding of the decoded value.
pub fn from_slice<T: Serialize + DeserializeOwned>(bytes: &[u8]) -> Result<T, CanonicalError> {
    let value: T = serde_json::from_slice(bytes)?;
    if to_vec(&value) != bytes {
        return Err(CanonicalError::NonCanonical);
    }
    Ok(value)
}

/// Serde helpers for integers carried as decimal strings.
pub mod decimal {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::fmt::Display;
    use std::str::FromStr;

    pub fn serialize<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let text = String::deserialize(d)?;
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(D::Error::custom(format!("not a decimal integer: {text:?}")));
        }
        text.parse().map_err(D::Error::custom)
    }
}

/// 256-bit unsigned amounts as decimal strings.
pub mod u256 {
    use primitive_types::U256;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn parse(text: &str) -> Option<U256> {
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        U256::from_dec_str(text).ok()
    }

    pub fn serialize<S: Serializer>(value: &U256, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<U256, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).ok_or_else(|| D::Error::custom(format!("not a 256-bit decimal: {text:?}")))
    }
}

/// `0x`-prefixed lowercase hex byte strings.
pub mod hex0x {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn encode(bytes: &[u8]) -> String {
        format!("0x{}", hex::encode(bytes))
    }

    pub fn decode(text: &str) -> Option<Vec<u8>> {
        let body = text.strip_prefix("0x")?;
        if body.bytes().any(|b| b.is_ascii_uppercase()) {
            return None;
        }
        hex::decode(body).ok()
    }

    pub fn serialize<T: AsRef<[u8]>, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&encode(value.as_ref()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        decode(&text).ok_or_else(|| D::Error::custom(format!("bad 0x-hex string: {text:?}")))
    }

    pub mod digest {
        use super::*;

        pub fn serialize<S: Serializer>(value: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&encode(value))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
            let bytes = super::deserialize(d)?;
            bytes
                .try_into()
                .map_err(|_| D::Error::custom("digest must be 32 bytes"))
        }
    }
}

/// Standard padded base64 byte strings.
pub mod b64 {
    use base64::engine::general_purpose::STANDARD;
    use base64::Engine;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<T: AsRef<[u8]>, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&STANDARD.encode(value.as_ref()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        STANDARD.decode(text.as_bytes()).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Sample {
        zeta: String,
        #[serde(with = "decimal")]
        alpha: u64,
        #[serde(with = "hex0x")]
        bytes: Vec<u8>,
    }

    fn sample() -> Sample {
        Sample {
            zeta: "z".into(),
            alpha: 42,
            bytes: vec![0xab, 0x01],
        }
    }

    #[test]
    fn keys_sorted_and_compact() {
        assert_eq!(
            to_string(&sample()),
            r#"{"alpha":"42","bytes":"0xab01","zeta":"z"}"#
        );
    }

    #[test]
    fn strict_decode_accepts_canonical() {
        let bytes = to_vec(&sample());
        assert_eq!(from_slice::<Sample>(&bytes).unwrap(), sample());
    }

    #[test]
    fn strict_decode_rejects_variants() {
        for text in [
            r#"{"bytes":"0xab01","alpha":"42","zeta":"z"}"#,
            r#"{"alpha":"42", "bytes":"0xab01","zeta":"z"}"#,
            r#"{"alpha":"42","bytes":"0xAB01","zeta":"z"}"#,
            r#"{"alpha":"042","bytes":"0xab01","zeta":"z"}"#,
            r#"{"alpha":"+42","bytes":"0xab01","zeta":"z"}"#,
            r#"{"alpha":42,"bytes":"0xab01","zeta":"z"}"#,
        ] {
            assert!(from_slice::<Sample>(text.as_bytes()).is_err(), "{text}");
        }
    }
}
