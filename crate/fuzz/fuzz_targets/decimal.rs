#![no_main]

use arpr::distributions::parse_decimal;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Some(v) = parse_decimal(s) {
        assert!(v.is_finite());
        assert_eq!(s.parse::<f64>().ok(), Some(v));
    }
});
