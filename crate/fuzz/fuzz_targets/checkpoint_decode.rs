#![no_main]

use libfuzzer_sys::fuzz_target;
use sqt_core::agent::Checkpoint;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cp) = Checkpoint::decode(text) {
        let again = Checkpoint::decode(&cp.encode()).expect("re-decode of an encode");
        assert_eq!(again, cp);
        let _ = cp.networks();
    }
});
