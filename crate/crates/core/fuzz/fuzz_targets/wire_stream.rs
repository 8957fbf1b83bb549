#![no_main]

use libfuzzer_sys::fuzz_target;
use thermoledger::exchange::{decode_stream, WireMessage};

fuzz_target!(|data: &[u8]| {
    let _ = WireMessage::decode(data);
    let _ = decode_stream(data);
});
