use std::io::{BufReader, BufWriter, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use crate::cas::{hash_node, CasError, DagNode, ObjectHash, ObjectStore};

use super::wire::{read_message, write_message, MessageType, WireMessage};
use super::ExchangeError;

/// Requests kept in flight while fetching the children of one node.
const PIPELINE_WINDOW: usize = 16;
const IO_TIMEOUT: Duration = Duration::from_secs(30);

struct Session {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

impl Session {
    fn connect(endpoint: impl ToSocketAddrs) -> Result<Self, ExchangeError> {
        let stream = TcpStream::connect(endpoint)?;
        stream.set_nodelay(true)?;
        stream.set_read_timeout(Some(IO_TIMEOUT))?;
        stream.set_write_timeout(Some(IO_TIMEOUT))?;
        Ok(Session {
            reader: BufReader::new(stream.try_clone()?),
            writer: BufWriter::new(stream),
        })
    }

    /// Request every hash, then read the answers in the same order. Each
    /// node is checked against the hash it was requested under.
    fn get_many(&mut self, hashes: &[ObjectHash]) -> Result<Vec<DagNode>, ExchangeError> {
        for hash in hashes {
            write_message(&mut self.writer, &WireMessage::get(*hash)).map_err(lost)?;
        }
        self.writer.flush().map_err(|e| lost(e.into()))?;
        hashes.iter().map(|hash| self.receive(hash)).collect()
    }

    fn receive(&mut self, requested: &ObjectHash) -> Result<DagNode, ExchangeError> {
        let reply = read_message(&mut self.reader)
            .map_err(lost)?
            .ok_or_else(|| ExchangeError::ConnectionLost("peer closed the connection".into()))?;
        if reply.hash != *requested {
            return Err(ExchangeError::Protocol(format!(
                "asked for {requested}, got a reply for {}",
                reply.hash
            )));
        }
        match reply.kind {
            MessageType::Missing => Err(ExchangeError::RemoteMissing(*requested)),
            MessageType::Node => {
                let node = reply.node.expect("decode checks node payloads");
                match hash_node(&node) {
                    Ok(actual) if actual == *requested => Ok(node),
                    _ => Err(ExchangeError::HashMismatch(*requested)),
                }
            }
            MessageType::Get => Err(ExchangeError::Protocol("peer sent a request".into())),
        }
    }
}

/// Socket failures once a session is open mean the peer went away.
fn lost(e: ExchangeError) -> ExchangeError {
    match e {
        ExchangeError::Io(io) => ExchangeError::ConnectionLost(io.to_string()),
        other => other,
    }
}

/// A local copy of `hash` if one exists and is intact.
fn local_node(store: &ObjectStore, hash: &ObjectHash) -> Result<Option<DagNode>, ExchangeError> {
    match store.get_node(hash) {
        Ok(node) => Ok(Some(node)),
        Err(CasError::NotFound(_)) | Err(CasError::CorruptObject(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Copy the DAG under `root` from the peer at `endpoint` into `store`,
/// skipping nodes already held locally. Returns how many nodes crossed the
/// wire.
///
/// Leaves are written as they arrive and the root last, so a failed fetch
/// never leaves a root whose children are missing.
pub fn fetch_dag(
    endpoint: impl ToSocketAddrs,
    root: &ObjectHash,
    store: &ObjectStore,
) -> Result<usize, ExchangeError> {
    let mut session: Option<Session> = None;
    let connect = |session: &mut Option<Session>| -> Result<(), ExchangeError> {
        if session.is_none() {
            *session = Some(Session::connect(&endpoint)?);
        }
        Ok(())
    };

    let (root_node, root_fetched) = match local_node(store, root)? {
        Some(node) => (node, false),
        None => {
            connect(&mut session)?;
            let node = session.as_mut().unwrap().get_many(&[*root])?.remove(0);
            (node, true)
        }
    };

    let mut transferred = usize::from(root_fetched);
    let mut wanted = Vec::new();
    for link in &root_node.links {
        if local_node(store, &link.hash)?.is_none() && !wanted.contains(&link.hash) {
            wanted.push(link.hash);
        }
    }
    for window in wanted.chunks(PIPELINE_WINDOW) {
        connect(&mut session)?;
        let nodes = session.as_mut().unwrap().get_many(window)?;
        for (hash, node) in window.iter().zip(nodes) {
            if !node.is_leaf() {
                return Err(ExchangeError::Protocol(format!(
                    "{hash} is not a leaf; only two-level DAGs are supported"
                )));
            }
            store.put_node(&node)?;
            transferred += 1;
        }
    }
    if root_fetched {
        store.put_node(&root_node)?;
    }
    Ok(transferred)
}
