#![no_main]

use libfuzzer_sys::fuzz_target;
use markoff::field::PrimeModulus;
use markoff::parse::parse_triple;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for n in [13u64, 997, 1_000_003] {
        let p = PrimeModulus::new(n).unwrap();
        if let Ok(t) = parse_triple(text, &p) {
            assert!(t.on_surface(&p));
        }
    }
});
