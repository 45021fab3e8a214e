#![no_main]

use libfuzzer_sys::fuzz_target;
use mnl_core::AnalyticFunction;

fuzz_target!(|data: &[u8]| {
    let Ok(v) = serde_json::from_slice::<serde_json::Value>(data) else { return };
    if let Ok(f) = AnalyticFunction::from_json(&v) {
        let back = AnalyticFunction::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
    }
});
