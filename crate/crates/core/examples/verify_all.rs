//! Runs every verification suite and prints the report.
//!
//! `cargo run --release --example verify_all -- 7`

use coxlab::verify::{run_suite, Suite, VerifyConfig};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);
    let t = std::time::Instant::now();
    let report = run_suite(Suite::All, &VerifyConfig::new(seed)).expect("valid config");
    print!("{}", report.render());
    eprintln!("{:.1} s", t.elapsed().as_secs_f64());
    std::process::exit(if report.passed { 0 } else { 1 });
}
