#![no_main]

use euler_taylor::exact::{format_rational, parse_canonical_rational, parse_decimal, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(q) = parse_rational(data) {
        let text = format_rational(&q);
        assert_eq!(parse_canonical_rational(&text).ok().as_ref(), Some(&q));
    }
    if let Ok(q) = parse_decimal(data) {
        assert_eq!(parse_rational(&format_rational(&q)).ok().as_ref(), Some(&q));
    }
});
