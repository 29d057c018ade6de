//! Runs a glob-selected subset of the named checks and prints a summary.

use rdlab::paperchecks::{run_checks, select, RunConfig};

fn main() {
    let pattern = std::env::args().nth(1).unwrap_or_else(|| "lem5.1*".into());
    let specs = select(&pattern).expect("pattern");
    for r in run_checks(&specs, &RunConfig::default()) {
        println!("{:<40} {:?}", r.id, r.status);
    }
}
