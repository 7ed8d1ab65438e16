#![no_main]

use libfuzzer_sys::fuzz_target;
use markoff::bigfield::BigPrime;
use markoff::field::PrimeModulus;
use markoff::hash::{digest_decode, digest_encode};
use num_bigint::BigUint;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let small = PrimeModulus::new(997).unwrap();
    if let Ok(v) = digest_decode(&small, text) {
        assert_eq!(digest_encode(&small, &v), text);
    }
    let big = BigPrime::new(BigUint::from(u128::MAX - 158)).unwrap();
    if let Ok(v) = digest_decode(&big, text) {
        assert_eq!(digest_encode(&big, &v), text);
    }
});
