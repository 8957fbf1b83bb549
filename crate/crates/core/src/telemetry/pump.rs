use std::num::NonZeroUsize;

use crate::ledger::{build_and_sign_tx, Address, ChainState, Gas, Keypair, Signer, Transaction};

use super::codec::{encode_reading, EncodingPolicy};
use super::ingest::SensorReading;
use super::TelemetryError;

/// How often the sending address changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    Never,
    Every(NonZeroUsize),
}

impl Rotation {
    pub fn every(k: usize) -> Option<Self> {
        NonZeroUsize::new(k).map(Rotation::Every)
    }

    /// Addresses needed to send `n` readings.
    pub fn addresses_needed(self, n: usize) -> usize {
        match self {
            Rotation::Never => n.min(1),
            Rotation::Every(k) => n.div_ceil(k.get()),
        }
    }

    fn slot(self, index: usize) -> usize {
        match self {
            Rotation::Never => 0,
            Rotation::Every(k) => index / k.get(),
        }
    }
}

/// Sender wallets (funded at genesis) and the schedule for switching
/// between them.
#[derive(Debug, Clone)]
pub struct RotationPolicy {
    pub rotation: Rotation,
    pub pool: Vec<Keypair>,
}

impl RotationPolicy {
    pub fn new(rotation: Rotation, pool: Vec<Keypair>) -> Self {
        RotationPolicy { rotation, pool }
    }
}

/// Turn readings into signed transfers to `receiver`, one per reading and
/// in reading order. Each transfer is checked against a running copy of
/// `state`, so the result can be sealed as one block.
pub fn pump(
    readings: &[SensorReading],
    policy: &RotationPolicy,
    receiver: Address,
    state: &ChainState,
    encoding: &EncodingPolicy,
    gas: Gas,
) -> Result<Vec<Transaction>, TelemetryError> {
    let needed = policy.rotation.addresses_needed(readings.len());
    if needed > policy.pool.len() {
        return Err(TelemetryError::PoolExhausted {
            needed,
            available: policy.pool.len(),
        });
    }

    let mut working = state.clone();
    let mut out = Vec::with_capacity(readings.len());
    for (index, reading) in readings.iter().enumerate() {
        let sender = &policy.pool[policy.rotation.slot(index)];
        let value = encode_reading(reading.temperature, encoding)?;
        let nonce = working.nonce(&sender.address());
        let tx = build_and_sign_tx(sender, receiver, value, nonce, gas);
        working
            .apply_tx_mut(&tx)
            .map_err(|cause| TelemetryError::Ledger { index, cause })?;
        out.push(tx);
    }
    Ok(out)
}
