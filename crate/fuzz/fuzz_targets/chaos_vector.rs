#![no_main]

use cks_core::chaos::ChaosVector;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = ChaosVector::from_json_str(text) {
        let back = ChaosVector::from_json_str(&v.to_json_string()).expect("serialized vector parses");
        assert_eq!(back.nnz(), v.nnz());
        let _ = v.wiener_ito_norm_sq();
    }
});
