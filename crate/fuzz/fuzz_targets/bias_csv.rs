#![no_main]

use libfuzzer_sys::fuzz_target;
use sqt_core::tabular::{parse_bias_csv, write_bias_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_bias_csv(text) {
        let mut out = Vec::new();
        write_bias_csv(&mut out, &rows).unwrap();
        assert_eq!(
            parse_bias_csv(std::str::from_utf8(&out).unwrap()).unwrap(),
            rows
        );
    }
});
