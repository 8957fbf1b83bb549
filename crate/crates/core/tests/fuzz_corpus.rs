//! Replays the checked-in fuzz seeds through the same parsers the fuzz
//! targets exercise, so a stable toolchain covers them too.

use std::fs;
use std::path::Path;

use thermoledger::canonical;
use thermoledger::cas::{DagNode, ObjectHash};
use thermoledger::envelope::{decrypt, Envelope, Identity};
use thermoledger::exchange::decode_stream;
use thermoledger::ledger::{read_blocks, verify_chain, Address, GenesisConfig, Transaction};
use thermoledger::telemetry::{ingest_csv, Temperature};

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut paths: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    assert!(!paths.is_empty(), "no seeds for {target}");
    paths.iter().map(|p| fs::read(p).unwrap()).collect()
}

#[test]
fn chain_file_seeds_verify() {
    let genesis = GenesisConfig::from_json(&seeds("genesis_json")[1]).unwrap();
    for seed in seeds("chain_file") {
        let blocks = read_blocks(&seed).unwrap();
        verify_chain(&blocks, &genesis).unwrap();
    }
}

#[test]
fn transaction_seeds_round_trip() {
    for seed in seeds("transaction") {
        let tx: Transaction = canonical::from_slice(&seed).unwrap();
        assert_eq!(tx.encode(), seed);
        tx.check_integrity().unwrap();
    }
}

#[test]
fn genesis_seeds_parse() {
    for seed in seeds("genesis_json") {
        let genesis = GenesisConfig::from_json(&seed).unwrap();
        assert_eq!(genesis.to_json(), seed);
    }
}

#[test]
fn dag_node_seeds_round_trip() {
    for seed in seeds("dag_node") {
        assert_eq!(DagNode::decode(&seed).unwrap().encode(), seed);
    }
}

#[test]
fn envelope_seeds_open() {
    let identity = Identity::from_secret_bytes([7; 32]);
    for seed in seeds("envelope") {
        assert_eq!(Envelope::decode(&seed).unwrap().encode(), seed);
        decrypt(&seed, &identity).unwrap();
    }
}

#[test]
fn wire_seeds_decode() {
    for seed in seeds("wire_stream") {
        assert!(!decode_stream(&seed).unwrap().is_empty());
    }
}

#[test]
fn sensor_csv_seeds_ingest() {
    for seed in seeds("sensor_csv") {
        assert!(!ingest_csv(seed.as_slice()).unwrap().is_empty());
    }
}

#[test]
fn identifier_seeds_parse() {
    let parsed = seeds("identifiers")
        .into_iter()
        .map(|s| String::from_utf8(s).unwrap())
        .filter(|s| {
            s.parse::<Address>().is_ok()
                || s.parse::<ObjectHash>().is_ok()
                || s.parse::<Temperature>().is_ok()
        })
        .count();
    assert_eq!(parsed, 3);
}
