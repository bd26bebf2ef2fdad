//! One line per acceptance criterion; exits non-zero if any fails.
//!
//! Set `ACCEPTANCE_CHECKS=1,7,9` to run a subset.

use std::process::ExitCode;

use rydberg_switch::validation::{Suite, CHECKS};
use rydberg_switch::SolveOptions;

fn main() -> ExitCode {
    let selected: Vec<u32> = match std::env::var("ACCEPTANCE_CHECKS") {
        Ok(list) => list.split(',').filter_map(|s| s.trim().parse().ok()).collect(),
        Err(_) => CHECKS.iter().map(|(id, _)| *id).collect(),
    };
    let mut suite = Suite::new(SolveOptions::default());
    let mut failed = 0;
    for id in selected {
        let r = suite.run(id);
        println!("{r}");
        if !r.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} check(s) failed");
        ExitCode::FAILURE
    } else {
        println!("acceptance: all checks passed");
        ExitCode::SUCCESS
    }
}
