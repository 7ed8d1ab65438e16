#![no_main]

use libfuzzer_sys::fuzz_target;
use markoff::pathfinder::{verify_path, PathCertificate};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = PathCertificate::from_json(text) {
        // bound replay work
        if c.moves.len() <= 1 << 16 {
            let _ = verify_path(&c);
        }
        let again = PathCertificate::from_json(&c.to_json()).expect("emitted JSON parses");
        assert_eq!(again, c);
    }
});
