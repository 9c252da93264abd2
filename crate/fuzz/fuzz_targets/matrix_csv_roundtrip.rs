#![no_main]

use libfuzzer_sys::fuzz_target;
use sparsity_monitor::io::{format_matrix_csv, parse_matrix_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(m) = parse_matrix_csv(data) else { return };
    let text = format_matrix_csv(&m);
    let back = parse_matrix_csv(text.as_bytes()).expect("formatted matrix parses");
    assert_eq!(back, m);
});
