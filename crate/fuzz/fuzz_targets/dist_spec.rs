#![no_main]

use arpr::ParentDistribution;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    let Ok(d) = s.parse::<ParentDistribution>() else {
        return;
    };
    let again: ParentDistribution = d.to_string().parse().expect("display output must parse");
    assert_eq!(again, d);
    let _ = d.quantile(0.5);
    let _ = d.theta_true(0.6, 0.5);
});
