#![no_main]

use cks_core::weights::{LogTable, WeightFunction};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = LogTable::parse_text(text) {
        let (lo, hi) = (table.r_min(), table.r_max());
        let _ = table.eval(0.5 * (lo + hi));
        let u = WeightFunction::from_table("fuzz", table);
        let _ = u.log_eval(hi);
    }
});
