//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Set `FUNKRADON_FAST=1` for the quick subset.

use std::process::ExitCode;

use funkradon::acceptance;

fn main() -> ExitCode {
    let fast = std::env::var("FUNKRADON_FAST").is_ok_and(|v| v == "1");
    let results = acceptance::run_with(fast, |r| println!("{r}"));
    let failed = results.iter().filter(|r| !r.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed{}",
        results.len() - failed,
        if fast { " (fast subset)" } else { "" }
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
