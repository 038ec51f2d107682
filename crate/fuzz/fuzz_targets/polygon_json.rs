#![no_main]

use coxlab::io::{parse_polygon_json, polygon_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(loaded) = parse_polygon_json(text) else {
        return;
    };
    // Anything accepted is a valid polygon and survives a round trip.
    let p = loaded.polygon();
    assert!(p.is_convex() && p.area() > 0.0);
    let orders = loaded.coxeter().map(|c| c.orders());
    let again = polygon_json(p, orders, None).expect("accepted polygon serializes");
    let back = parse_polygon_json(&again).expect("serialized polygon reloads");
    assert_eq!(back.polygon().len(), p.len());
});
