//! Frames are a 4-byte big-endian length followed by that many bytes of
//! canonical JSON:
//!
//! ```text
//! {"hash":"<64 hex>","type":"get"}
//! {"hash":"<64 hex>","node":{"data":..,"links":[..]},"type":"node"}
//! {"hash":"<64 hex>","type":"missing"}
//! ```

use std::io::{self, ErrorKind, Read, Write};

use serde::{Deserialize, Serialize};

use crate::canonical;
use crate::cas::{DagNode, ObjectHash};

use super::ExchangeError;

/// Largest accepted frame body (1 MiB).
pub const MAX_FRAME_LEN: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageType {
    Get,
    Node,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireMessage {
    #[serde(rename = "type")]
    pub kind: MessageType,
    pub hash: ObjectHash,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<DagNode>,
}

impl WireMessage {
    pub fn get(hash: ObjectHash) -> Self {
        WireMessage {
            kind: MessageType::Get,
            hash,
            node: None,
        }
    }

    pub fn node(hash: ObjectHash, node: DagNode) -> Self {
        WireMessage {
            kind: MessageType::Node,
            hash,
            node: Some(node),
        }
    }

    pub fn missing(hash: ObjectHash) -> Self {
        WireMessage {
            kind: MessageType::Missing,
            hash,
            node: None,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        canonical::to_vec(self)
    }

    /// Strict decode. The node payload is checked for shape but not against
    /// `hash`; that is the receiver's job.
    pub fn decode(bytes: &[u8]) -> Result<Self, ExchangeError> {
        let msg: WireMessage =
            canonical::from_slice(bytes).map_err(|e| ExchangeError::Protocol(e.to_string()))?;
        match (&msg.kind, &msg.node) {
            (MessageType::Node, Some(node)) => node
                .validate()
                .map_err(|e| ExchangeError::Protocol(e.to_string()))?,
            (MessageType::Node, None) => {
                return Err(ExchangeError::Protocol(
                    "node message without payload".into(),
                ))
            }
            (_, Some(_)) => return Err(ExchangeError::Protocol("unexpected node payload".into())),
            _ => {}
        }
        Ok(msg)
    }
}

pub fn write_frame(out: &mut impl Write, body: &[u8]) -> Result<(), ExchangeError> {
    if body.len() > MAX_FRAME_LEN {
        return Err(ExchangeError::FrameTooLarge(body.len()));
    }
    out.write_all(&(body.len() as u32).to_be_bytes())?;
    out.write_all(body)?;
    Ok(())
}

pub fn write_message(out: &mut impl Write, msg: &WireMessage) -> Result<(), ExchangeError> {
    write_frame(out, &msg.encode())
}

/// Read one frame body. `Ok(None)` means the peer closed cleanly between
/// frames.
pub fn read_frame(input: &mut impl Read) -> Result<Option<Vec<u8>>, ExchangeError> {
    let mut len = [0u8; 4];
    match input.read_exact(&mut len[..1]) {
        Ok(()) => {}
        Err(e) if e.kind() == ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e.into()),
    }
    input.read_exact(&mut len[1..]).map_err(truncated)?;
    let len = u32::from_be_bytes(len) as usize;
    if len > MAX_FRAME_LEN {
        return Err(ExchangeError::FrameTooLarge(len));
    }
    let mut body = vec![0u8; len];
    input.read_exact(&mut body).map_err(truncated)?;
    Ok(Some(body))
}

pub fn read_message(input: &mut impl Read) -> Result<Option<WireMessage>, ExchangeError> {
    read_frame(input)?
        .map(|body| WireMessage::decode(&body))
        .transpose()
}

fn truncated(e: io::Error) -> ExchangeError {
    if e.kind() == ErrorKind::UnexpectedEof {
        ExchangeError::ConnectionLost("truncated frame".into())
    } else {
        e.into()
    }
}

/// Decode every frame in `bytes`, as a receiver would off the socket.
pub fn decode_stream(mut bytes: &[u8]) -> Result<Vec<WireMessage>, ExchangeError> {
    let mut out = Vec::new();
    while let Some(msg) = read_message(&mut bytes)? {
        out.push(msg);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cas::{hash_node, Link, CHUNK_SIZE, MAX_LINKS};

    #[test]
    fn get_frame_is_bit_exact() {
        let hash = hash_node(&DagNode::leaf(b"abc".to_vec())).unwrap();
        let mut buf = Vec::new();
        write_message(&mut buf, &WireMessage::get(hash)).unwrap();
        let body = format!(r#"{{"hash":"{hash}","type":"get"}}"#);
        assert_eq!(&buf[..4], &(body.len() as u32).to_be_bytes());
        assert_eq!(&buf[4..], body.as_bytes());
    }

    #[test]
    fn stream_round_trip() {
        let node = DagNode::leaf(vec![1, 2, 3]);
        let hash = hash_node(&node).unwrap();
        let msgs = vec![
            WireMessage::get(hash),
            WireMessage::node(hash, node),
            WireMessage::missing(hash),
        ];
        let mut buf = Vec::new();
        for m in &msgs {
            write_message(&mut buf, m).unwrap();
        }
        assert_eq!(decode_stream(&buf).unwrap(), msgs);
    }

    #[test]
    fn largest_nodes_fit_in_a_frame() {
        let leaf = DagNode::leaf(vec![0xff; CHUNK_SIZE]);
        let hash = hash_node(&leaf).unwrap();
        assert!(WireMessage::node(hash, leaf).encode().len() <= MAX_FRAME_LEN);
        let interior = DagNode::interior(vec![Link::chunk(hash, CHUNK_SIZE as u64); MAX_LINKS]);
        assert!(WireMessage::node(hash, interior).encode().len() <= MAX_FRAME_LEN);
    }

    #[test]
    fn oversized_and_truncated_frames_rejected() {
        let mut big = ((MAX_FRAME_LEN + 1) as u32).to_be_bytes().to_vec();
        big.extend_from_slice(b"{}");
        assert!(matches!(
            decode_stream(&big),
            Err(ExchangeError::FrameTooLarge(_))
        ));
        assert!(matches!(
            decode_stream(&[0, 0]),
            Err(ExchangeError::ConnectionLost(_))
        ));
        assert!(matches!(
            decode_stream(&[0, 0, 0, 9, b'{']),
            Err(ExchangeError::ConnectionLost(_))
        ));
        assert!(decode_stream(&[]).unwrap().is_empty());
    }

    #[test]
    fn payload_must_match_type() {
        let hash = hash_node(&DagNode::leaf(vec![])).unwrap();
        for body in [
            format!(r#"{{"hash":"{hash}","type":"node"}}"#),
            format!(r#"{{"hash":"{hash}","node":{{"data":"","links":[]}},"type":"get"}}"#),
            format!(r#"{{"hash":"{hash}","type":"put"}}"#),
            format!(r#"{{"type":"get","hash":"{hash}"}}"#),
        ] {
            assert!(WireMessage::decode(body.as_bytes()).is_err(), "{body}");
        }
    }
}
