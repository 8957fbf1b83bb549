#![no_main]

use libfuzzer_sys::fuzz_target;
use thermoledger::cas::DagNode;

fuzz_target!(|data: &[u8]| {
    if let Ok(node) = DagNode::decode(data) {
        assert_eq!(node.encode(), data);
    }
});
