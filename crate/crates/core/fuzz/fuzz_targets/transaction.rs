#![no_main]

use libfuzzer_sys::fuzz_target;
use thermoledger::canonical;
use thermoledger::ledger::Transaction;

fuzz_target!(|data: &[u8]| {
    if let Ok(tx) = canonical::from_slice::<Transaction>(data) {
        assert_eq!(tx.encode(), data);
        let _ = tx.check_integrity();
    }
});
