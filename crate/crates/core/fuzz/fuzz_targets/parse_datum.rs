#![no_main]

use euler_taylor::field::{format_datum, parse_datum};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(field) = parse_datum(data) {
        assert!(field.check_invariants().is_ok());
        let again = parse_datum(&format_datum(&field)).expect("formatted datum parses");
        assert_eq!(again, field);
    }
});
