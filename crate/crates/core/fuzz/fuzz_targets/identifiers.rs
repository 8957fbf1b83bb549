#![no_main]

use libfuzzer_sys::fuzz_target;
use thermoledger::cas::ObjectHash;
use thermoledger::ledger::Address;
use thermoledger::telemetry::Temperature;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(address) = text.parse::<Address>() {
        assert_eq!(address.to_string(), text);
    }
    if let Ok(hash) = text.parse::<ObjectHash>() {
        assert_eq!(hash.to_string(), text);
    }
    if let Ok(t) = text.parse::<Temperature>() {
        assert_eq!(t.to_string().parse::<Temperature>().unwrap(), t);
    }
});
