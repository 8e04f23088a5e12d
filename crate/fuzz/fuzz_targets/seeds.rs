#![no_main]

use libfuzzer_sys::fuzz_target;
use sqt_core::harness::{parse_seeds, MAX_SEEDS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(seeds) = parse_seeds(text) {
        assert!(!seeds.is_empty());
        assert!(seeds.len() as u64 <= MAX_SEEDS);
    }
});
