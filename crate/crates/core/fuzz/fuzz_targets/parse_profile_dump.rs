#![no_main]

use euler_taylor::symmetry::parse_profile_dump;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(profile) = parse_profile_dump(data, 1) {
        assert_eq!(parse_profile_dump(&profile.dump(), 1).ok().as_ref(), Some(&profile));
    }
});
