#![no_main]

use cks_core::weights::WeightConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = WeightConfig::from_json_str(text) {
        if let Ok(u) = cfg.build() {
            for r in [0.0, 0.5, 1.0, 10.0, u.r_max()] {
                let _ = u.log_eval(r);
            }
        }
    }
});
