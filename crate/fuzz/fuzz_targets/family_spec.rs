#![no_main]

use coxlab::io::FamilySpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = text.parse::<FamilySpec>() else {
        return;
    };
    assert_eq!(spec.id().parse::<FamilySpec>().ok(), Some(spec));
    // Construction may refuse (e.g. Euclidean triangles) but must not panic.
    let _ = spec.build();
});
