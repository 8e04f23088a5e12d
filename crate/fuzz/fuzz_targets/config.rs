#![no_main]

use libfuzzer_sys::fuzz_target;
use sqt_core::harness::{parse_config, parse_config_pairs};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_config_pairs(text);
    if let Ok(cfg) = parse_config(text, &[]) {
        cfg.validate().expect("parsed configs are valid");
    }
});
