//! Acceptance battery: every shipped guarantee, one pass/fail line each.
//!
//! This is the same battery `ghyp selftest` runs; the test fails if any
//! criterion does.

use ghyp::selftest::{print_outcomes, run_all};

#[test]
fn acceptance_battery() {
    let outcomes = run_all(0xACCE97);
    let mut buf = Vec::new();
    let all_passed = print_outcomes(&outcomes, &mut buf).unwrap();
    // one line per criterion, visible with --nocapture and in CI logs
    print!("{}", String::from_utf8_lossy(&buf));
    assert_eq!(outcomes.len(), 10);
    assert!(all_passed, "failed criteria:\n{}", String::from_utf8_lossy(&buf));
}
