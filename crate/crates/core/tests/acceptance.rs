//! Runs the nine acceptance criteria of the default corpus and prints one
//! pass/fail line for each. Exits nonzero if any criterion fails.

use std::process::ExitCode;

use ruelle::corpus::{self, CriterionOutcome};

fn main() -> ExitCode {
    let criteria: [fn() -> CriterionOutcome; 9] = [
        corpus::criterion_main_identity,
        corpus::criterion_quadratic,
        corpus::criterion_cusp,
        corpus::criterion_rational,
        corpus::criterion_closed_transfer,
        corpus::criterion_chart_round_trip,
        corpus::criterion_rank,
        corpus::criterion_sum_rule,
        corpus::criterion_orbit_invariants,
    ];
    let mut failed = 0;
    for run in criteria {
        let outcome = run();
        println!("{}", outcome.summary());
        for check in outcome.checks.iter().filter(|c| !c.passed) {
            println!("    {} = {:.3e} (threshold {:.1e})", check.label, check.value, check.threshold);
        }
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
