//! Full acceptance suite on the desk profile. Slow: one `n = 64` run to
//! `t = 128` plus the oracle checks.

use hallmhd::harness::acceptance::run_acceptance;
use hallmhd::harness::{ExperimentConfig, Profile};

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::profile(Profile::Desk, dir.path().join("desk"));
    let results = run_acceptance(&cfg);
    for r in &results {
        println!("{r}");
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", results.len());
    assert_eq!(results.len(), 13);
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
