#![no_main]

use libfuzzer_sys::fuzz_target;
use mnl_core::parse_function;

fuzz_target!(|data: &str| {
    if let Ok(f) = parse_function(data) {
        if !data.trim_start().starts_with('{') {
            assert_eq!(parse_function(&f.label()).unwrap(), f);
        }
        let json = f.to_json().unwrap().to_string();
        assert_eq!(parse_function(&json).unwrap(), f);
    }
});
