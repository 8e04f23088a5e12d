#![no_main]

use libfuzzer_sys::fuzz_target;
use sqt_core::harness::{parse_run_csv, write_run_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_run_csv(text) {
        let mut out = Vec::new();
        write_run_csv(&mut out, &rows).unwrap();
        let back = parse_run_csv(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(back.len(), rows.len());
    }
});
