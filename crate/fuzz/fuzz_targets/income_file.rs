#![no_main]

use arpr::lip::{estimate_lq, estimate_w, Sample};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(sample) = Sample::parse(text) else {
        return;
    };
    assert!(sample.len() >= 2);
    assert!(sample.values().windows(2).all(|w| w[0] <= w[1]));
    for (alpha, beta) in [(0.6, 0.5), (0.5, 0.8), (0.99, 0.01)] {
        let w = estimate_w(&sample, alpha, beta);
        let lq = estimate_lq(&sample, alpha, beta);
        match (&w, &lq) {
            (Ok(w), Ok(lq)) => {
                assert_eq!(w, lq);
                assert!(w.eta <= w.trials);
            }
            (Err(_), Err(_)) => {}
            _ => panic!("estimators disagree: {w:?} vs {lq:?}"),
        }
    }
});
