#![no_main]

use libfuzzer_sys::fuzz_target;
use sqt_core::agent::{QOperator, Variant};
use sqt_core::tabular::TabularAlgo;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(algo) = TabularAlgo::parse(text) {
        assert_eq!(TabularAlgo::parse(&algo.to_string()).unwrap(), algo);
    }
    let _ = Variant::parse(text);
    let _ = QOperator::parse(text, 0.5);
});
