//! Pull-only node exchange between two stores over TCP.

mod client;
mod server;
mod wire;

use thiserror::Error;

use crate::cas::{CasError, ObjectHash};

pub use client::fetch_dag;
pub use server::{handle_connection, serve, ServerHandle};
pub use wire::{
    decode_stream, read_frame, read_message, write_frame, write_message, MessageType, WireMessage,
    MAX_FRAME_LEN,
};

pub const DEFAULT_PORT: u16 = 4737;

#[derive(Debug, Error)]
pub enum ExchangeError {
    #[error("peer sent data not matching {0}")]
    HashMismatch(ObjectHash),
    #[error("peer does not have {0}")]
    RemoteMissing(ObjectHash),
    #[error("connection lost: {0}")]
    ConnectionLost(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("frame of {0} bytes exceeds 1 MiB")]
    FrameTooLarge(usize),
    #[error(transparent)]
    Store(#[from] CasError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
