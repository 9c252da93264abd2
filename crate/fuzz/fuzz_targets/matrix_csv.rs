#![no_main]

use libfuzzer_sys::fuzz_target;
use sparsity_monitor::io::parse_matrix_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = parse_matrix_csv(data) {
        assert_eq!(m.as_slice().len(), m.rows() * m.cols());
        assert!(m.as_slice().iter().all(|v| v.is_finite()));
    }
});
