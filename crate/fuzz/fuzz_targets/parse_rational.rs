#![no_main]

use extend_core::rational::{parse_rational, to_exact_decimal, to_fraction_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(q) = parse_rational(text) {
        assert_eq!(parse_rational(&to_fraction_string(&q)).unwrap(), q);
        if let Some(d) = to_exact_decimal(&q) {
            assert_eq!(parse_rational(&d).unwrap(), q);
        }
    }
});
