#![no_main]

use coxlab::io::parse_ball_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ball) = parse_ball_json(text) {
        assert!(ball
            .elements
            .iter()
            .all(|e| e.word.iter().all(|&s| s < ball.n_generators)));
    }
});
