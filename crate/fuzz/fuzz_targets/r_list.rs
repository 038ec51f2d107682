#![no_main]

use coxlab::io::parse_r_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rs) = parse_r_list(text) {
        assert!(!rs.is_empty() && rs.iter().all(|r| r.is_finite() && *r >= 0.0));
    }
});
