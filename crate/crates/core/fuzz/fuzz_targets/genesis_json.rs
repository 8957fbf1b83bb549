#![no_main]

use libfuzzer_sys::fuzz_target;
use thermoledger::ledger::GenesisConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(genesis) = GenesisConfig::from_json(data) {
        assert!(genesis.total_supply().is_some());
        assert_eq!(
            GenesisConfig::from_json(&genesis.to_json()).unwrap(),
            genesis
        );
    }
});
