//! One pass/fail line per acceptance criterion, at pinned sizes and seeds.
//! Runs without the test harness so the lines are never captured.

use weldlab::suite::{run_criterion, ACCEPTANCE_SEED, CRITERIA};

fn main() {
    let mut failed = Vec::new();
    for id in CRITERIA {
        let c = run_criterion(id, ACCEPTANCE_SEED).unwrap_or_else(|e| panic!("{id}: {e}"));
        println!("[{}] {} {}: {} ({:.1}s)", if c.pass { "PASS" } else { "FAIL" }, c.id, c.title, c.summary, c.seconds);
        if !c.pass {
            failed.push(c.id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: all {} criteria pass", CRITERIA.len());
}
