#![no_main]

use libfuzzer_sys::fuzz_target;
use mnl_core::SpaceParams;

fuzz_target!(|data: &str| {
    if let Ok(s) = SpaceParams::parse(data) {
        let shown = s.to_string();
        let inner = shown.trim_start_matches('(').trim_end_matches(')');
        assert_eq!(SpaceParams::parse(inner).unwrap(), s);
        let _ = s.critical_exponent();
    }
});
