#![no_main]

use libfuzzer_sys::fuzz_target;
use thermoledger::telemetry::{encode_reading, ingest_csv, EncodingPolicy};

fuzz_target!(|data: &[u8]| {
    if let Ok(readings) = ingest_csv(data) {
        for reading in readings {
            let _ = encode_reading(reading.temperature, &EncodingPolicy::default());
        }
    }
});
