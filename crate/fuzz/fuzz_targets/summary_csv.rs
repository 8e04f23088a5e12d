#![no_main]

use libfuzzer_sys::fuzz_target;
use sqt_core::harness::{compare_sets, parse_summary_csv, ResultSet};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_summary_csv(text);
    if let Ok(set) = ResultSet::parse(text) {
        let _ = compare_sets(&set, &set).map(|t| t.to_string());
    }
});
