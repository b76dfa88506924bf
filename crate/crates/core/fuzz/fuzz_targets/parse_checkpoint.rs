#![no_main]

use euler_taylor::euler::{format_checkpoint, parse_checkpoint};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(cp) = parse_checkpoint(data) {
        // Only canonical text is accepted, so formatting reproduces it.
        assert_eq!(format_checkpoint(cp.order, cp.parity, &cp.field), data);
    }
});
