#![no_main]

use libfuzzer_sys::fuzz_target;
use mnl_core::ExtRational;

fuzz_target!(|data: &str| {
    if let Ok(x) = data.parse::<ExtRational>() {
        assert_eq!(x.to_string().parse::<ExtRational>().unwrap(), x);
    }
});
