use std::io::{BufReader, BufWriter, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use crate::cas::NodeSource;

use super::wire::{read_message, write_message, MessageType, WireMessage};
use super::ExchangeError;

/// A running exchange server. Dropping the handle stops accepting new
/// connections; connections already open run until their peer hangs up.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    accept: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Block until the accept loop exits (it only does so after `shutdown`).
    pub fn join(mut self) {
        if let Some(handle) = self.accept.take() {
            let _ = handle.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop_accepting();
    }

    fn stop_accepting(&mut self) {
        if let Some(handle) = self.accept.take() {
            self.stop.store(true, Ordering::SeqCst);
            // Wake the blocking accept.
            let _ = TcpStream::connect(self.addr);
            let _ = handle.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_accepting();
    }
}

/// Serve nodes from `source` on `addr`, one thread per connection.
pub fn serve(
    source: Arc<dyn NodeSource>,
    addr: impl ToSocketAddrs,
) -> Result<ServerHandle, ExchangeError> {
    let listener = TcpListener::bind(addr)?;
    let addr = listener.local_addr()?;
    let stop = Arc::new(AtomicBool::new(false));
    let accept = {
        let stop = Arc::clone(&stop);
        thread::spawn(move || {
            for conn in listener.incoming() {
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = conn else { continue };
                let source = Arc::clone(&source);
                thread::spawn(move || {
                    let _ = handle_connection(source.as_ref(), stream);
                });
            }
        })
    };
    Ok(ServerHandle {
        addr,
        stop,
        accept: Some(accept),
    })
}

/// Answer requests on one connection, in order, until the peer closes or
/// sends something invalid.
pub fn handle_connection(source: &dyn NodeSource, stream: TcpStream) -> Result<(), ExchangeError> {
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    while let Some(request) = read_message(&mut reader)? {
        if request.kind != MessageType::Get {
            return Err(ExchangeError::Protocol("expected a get request".into()));
        }
        let reply = match source.fetch(&request.hash) {
            Ok(Some(node)) => WireMessage::node(request.hash, node),
            // Unreadable or corrupt objects are not served.
            Ok(None) | Err(_) => WireMessage::missing(request.hash),
        };
        write_message(&mut writer, &reply)?;
        // Only flush once the pipelined requests already received are
        // answered.
        if reader.buffer().is_empty() {
            writer.flush()?;
        }
    }
    writer.flush()?;
    Ok(())
}
