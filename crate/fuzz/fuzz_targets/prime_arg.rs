#![no_main]

use libfuzzer_sys::fuzz_target;
use markoff::parse::{parse_big_prime, parse_prime};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_prime(text) {
        assert!(p.get() % 2 == 1);
    }
    // primality testing cost grows with the digit count
    if text.len() <= 256 {
        let _ = parse_big_prime(text);
    }
});
