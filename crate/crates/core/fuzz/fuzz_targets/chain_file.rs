#![no_main]

use libfuzzer_sys::fuzz_target;
use thermoledger::ledger::{read_blocks, verify_chain, GenesisConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(blocks) = read_blocks(data) {
        let encoded: Vec<u8> = blocks
            .iter()
            .flat_map(|b| {
                let mut line = b.encode();
                line.push(b'\n');
                line
            })
            .collect();
        assert_eq!(encoded, data);
        let _ = verify_chain(&blocks, &GenesisConfig::new());
    }
});
