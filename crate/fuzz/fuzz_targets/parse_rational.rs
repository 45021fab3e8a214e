#![no_main]

use libfuzzer_sys::fuzz_target;
use mnl_core::rational::{format_rational, parse_rational};

fuzz_target!(|data: &str| {
    if let Ok(r) = parse_rational(data) {
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
});
