use std::process::ExitCode;

use projcurv::acceptance::{criteria, run_criterion, Suite};

fn main() -> ExitCode {
    // `cargo test` passes libtest flags; only a `quick` argument is meaningful here.
    let suite = match std::env::var("PROJCURV_ACCEPTANCE").as_deref() {
        Ok("quick") => Suite::Quick,
        _ if std::env::args().any(|a| a == "quick") => Suite::Quick,
        _ => Suite::Full,
    };
    if std::env::args().any(|a| a == "--list") {
        for id in criteria(suite) {
            println!("criterion_{id}: test");
        }
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    for id in criteria(suite) {
        let report = run_criterion(id, suite).expect("known criterion");
        println!("{report}");
        for line in &report.details {
            println!("        {line}");
        }
        if !report.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} criteria, {failed} failed", criteria(suite).len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
