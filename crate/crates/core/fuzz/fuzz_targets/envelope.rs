#![no_main]

use libfuzzer_sys::fuzz_target;
use thermoledger::envelope::{decrypt, Envelope, Identity};

fuzz_target!(|data: &[u8]| {
    if let Ok(envelope) = Envelope::decode(data) {
        assert_eq!(envelope.encode(), data);
    }
    let identity = Identity::from_secret_bytes([7; 32]);
    let _ = decrypt(data, &identity);
});
