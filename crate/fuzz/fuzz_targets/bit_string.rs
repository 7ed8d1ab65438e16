#![no_main]

use libfuzzer_sys::fuzz_target;
use markoff::field::PrimeModulus;
use markoff::hash::{hash_bits, BitString, HashField, HashParams};

fuzz_target!(|data: &[u8]| {
    let p = PrimeModulus::new(997).unwrap();
    let params = HashParams::new(p, 1).unwrap();
    let from_bytes = BitString::from_bytes(data);
    assert_eq!(from_bytes.len(), 8 * data.len());
    let out = hash_bits(&from_bytes, &params);
    assert!(p.on_surface(&out.vertex));
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(bits) = BitString::parse(text) {
            assert_eq!(bits.to_string(), text);
            assert!(p.on_surface(&hash_bits(&bits, &params).vertex));
        }
    }
});
