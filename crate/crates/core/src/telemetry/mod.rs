//! Sensor readings to ledger transfers: exact fixed-point codec, CSV
//! ingestion and the rotating-address pump.

mod codec;
mod ingest;
mod pump;

use thiserror::Error;

use crate::ledger::TxError;

pub use codec::{
    decode_value, encode_reading, DecodedTemperature, EncodingPolicy, Temperature,
    ABSOLUTE_ZERO_MILLI, MAX_READING_MILLI,
};
pub use ingest::{ingest_csv, ingest_csv_path, SensorReading, CSV_HEADER};
pub use pump::{pump, Rotation, RotationPolicy};

#[derive(Debug, Error)]
pub enum TelemetryError {
    #[error("bad temperature {0:?}")]
    BadTemperature(String),
    #[error("reading {0} °C plus offset is negative")]
    NegativeValue(Temperature),
    #[error("encoding offset must be non-negative")]
    NegativeOffset,
    #[error("csv header must be sensor_id,timestamp,temperature_c")]
    MissingHeader,
    #[error("line {line}: {reason}")]
    BadRow { line: u64, reason: String },
    #[error("address pool exhausted: need {needed}, have {available}")]
    PoolExhausted { needed: usize, available: usize },
    #[error("reading {index}: {cause}")]
    Ledger { index: usize, cause: TxError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

// Io holds a non-comparable error, so equality is only meaningful for the
// value-carrying variants tests match on.
impl PartialEq for TelemetryError {
    fn eq(&self, other: &Self) -> bool {
        use TelemetryError::*;
        match (self, other) {
            (BadTemperature(a), BadTemperature(b)) => a == b,
            (NegativeValue(a), NegativeValue(b)) => a == b,
            (NegativeOffset, NegativeOffset) | (MissingHeader, MissingHeader) => true,
            (BadRow { line: a, reason: r }, BadRow { line: b, reason: s }) => a == b && r == s,
            (
                PoolExhausted {
                    needed: a,
                    available: b,
                },
                PoolExhausted {
                    needed: c,
                    available: d,
                },
            ) => a == c && b == d,
            (Ledger { index: a, cause: x }, Ledger { index: b, cause: y }) => a == b && x == y,
            _ => false,
        }
    }
}
