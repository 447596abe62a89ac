//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Set `ACCEPT_ONLY=3,12` to run a subset.

use pyramid_core::verify::{criteria, run_criterion, VerifyConfig};

#[test]
fn acceptance() {
    let only: Option<Vec<u32>> =
        std::env::var("ACCEPT_ONLY").ok().map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let cfg = VerifyConfig::default();
    let mut failed = Vec::new();
    for c in criteria() {
        if only.as_ref().is_some_and(|o| !o.contains(&c.id)) {
            continue;
        }
        let report = run_criterion(&c, &cfg);
        println!("{report}");
        if !report.passed {
            failed.push(report.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
