#![no_main]

use libfuzzer_sys::fuzz_target;
use markoff::lifting::descend;
use markoff::parse::parse_integer_triple;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if text.len() > 4096 {
        return;
    }
    if let Ok(t) = parse_integer_triple(text) {
        let d = descend(&t).expect("parsed triples are solutions");
        assert!(d.terminal.is_unit());
        assert_eq!(d.chain.len(), d.moves.len());
    }
});
