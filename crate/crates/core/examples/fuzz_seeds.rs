//! Regenerates the checked-in fuzz corpus seeds:
//!
//! ```text
//! cargo run -p thermoledger --example fuzz_seeds -- crates/core/fuzz/corpus
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use primitive_types::U256;
use thermoledger::cas::hash_node;
use thermoledger::cas::{DagNode, Link};
use thermoledger::envelope::{encrypt_for, Identity};
use thermoledger::exchange::{write_message, WireMessage};
use thermoledger::ledger::{build_and_sign_tx, Chain, Gas, GenesisConfig, Keypair, Signer};

fn write(root: &Path, target: &str, name: &str, bytes: &[u8]) {
    let dir = root.join(target);
    fs::create_dir_all(&dir).expect("create corpus dir");
    fs::write(dir.join(name), bytes).expect("write seed");
}

fn main() {
    let root: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("crates/core/fuzz/corpus"));

    let sealer = Keypair::from_seed([1; 32]);
    let alice = Keypair::from_seed([2; 32]);
    let bob = Keypair::from_seed([3; 32]);
    let genesis = GenesisConfig::new()
        .with_allocation(alice.address(), U256::exp10(21))
        .with_allocation(bob.address(), U256::from(5));
    write(&root, "genesis_json", "two_accounts", &genesis.to_json());
    write(&root, "genesis_json", "empty", b"{}");

    let gas = Gas {
        limit: U256::from(21_000),
        price: U256::from(1),
    };
    let tx = build_and_sign_tx(
        &alice,
        bob.address(),
        U256::from(22_900_000_000_000_000_000u128),
        0,
        gas,
    );
    write(&root, "transaction", "signed", &tx.encode());

    let mut chain = Chain::new(genesis, &sealer);
    chain
        .seal(vec![tx], &sealer, 1_464_775_200)
        .expect("valid block");
    let lines: Vec<u8> = chain
        .blocks()
        .iter()
        .flat_map(|b| {
            let mut line = b.encode();
            line.push(b'\n');
            line
        })
        .collect();
    write(&root, "chain_file", "two_blocks", &lines);
    let genesis_line = lines.split_inclusive(|&b| b == b'\n').next().unwrap();
    write(&root, "chain_file", "genesis_only", genesis_line);

    let leaf = DagNode::leaf(b"22.9,22.8,22.7".to_vec());
    let leaf_hash = hash_node(&leaf).unwrap();
    let interior = DagNode::interior(vec![Link::chunk(leaf_hash, 14), Link::chunk(leaf_hash, 14)]);
    write(&root, "dag_node", "leaf", &leaf.encode());
    write(
        &root,
        "dag_node",
        "empty_leaf",
        &DagNode::leaf(Vec::new()).encode(),
    );
    write(&root, "dag_node", "interior", &interior.encode());

    let recipient = Identity::from_secret_bytes([7; 32]);
    let sealed = encrypt_for(&recipient.public_key(), b"occupancy: 3").unwrap();
    write(&root, "envelope", "for_fixed_identity", &sealed);

    let mut stream = Vec::new();
    write_message(&mut stream, &WireMessage::get(leaf_hash)).unwrap();
    write_message(&mut stream, &WireMessage::node(leaf_hash, leaf)).unwrap();
    write_message(&mut stream, &WireMessage::missing(leaf_hash)).unwrap();
    write(&root, "wire_stream", "get_node_missing", &stream);

    write(
        &root,
        "sensor_csv",
        "three_rows",
        b"sensor_id,timestamp,temperature_c\ns1,2016-06-01T10:00:00,22.9\ns1,2016-06-01T10:10:00Z,-4.25\ns2,2016-06-01T10:20:00+02:00,0\n",
    );

    write(
        &root,
        "identifiers",
        "address",
        alice.address().to_string().as_bytes(),
    );
    write(
        &root,
        "identifiers",
        "object_hash",
        leaf_hash.to_string().as_bytes(),
    );
    write(&root, "identifiers", "temperature", b"-273.15");
}
