#![no_main]

use libfuzzer_sys::fuzz_target;
use sparsity_monitor::io::{decode_pgm, encode_pgm_p5};

fuzz_target!(|data: &[u8]| {
    let Ok(m) = decode_pgm(data) else { return };
    assert!(m.rows() > 0 && m.cols() > 0);
    let max = m.as_slice().iter().fold(0.0f64, |a, &v| a.max(v));
    assert!(max <= 65535.0);
    let maxval = (max as u16).max(1);
    let encoded = encode_pgm_p5(&m, maxval).expect("decoded samples re-encode");
    assert_eq!(decode_pgm(&encoded).expect("re-encoded image decodes"), m);
});
