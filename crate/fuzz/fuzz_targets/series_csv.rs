#![no_main]

use libfuzzer_sys::fuzz_target;
use sparsity_monitor::io::{format_series_csv, parse_series_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(records) = parse_series_csv(data) else { return };
    let bytes = format_series_csv(&records).expect("parsed records format");
    let back = parse_series_csv(&bytes).expect("formatted series parses");
    assert_eq!(back.len(), records.len());
    for (a, b) in back.iter().zip(&records) {
        assert_eq!(a.t, b.t);
        assert_eq!(a.g.to_bits(), b.g.to_bits());
    }
});
