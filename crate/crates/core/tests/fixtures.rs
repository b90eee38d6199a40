use std::path::PathBuf;

use tspaces::replay::{load_script, run_script};

const NAMES: [&str; 6] = ["p_chain", "w1_max", "w2_cases", "vsum_q3", "wsum_q2", "unitary_w"];

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

#[test]
fn originals_replay() {
    for name in NAMES {
        let script = load_script(&fixture(&format!("{name}.json"))).unwrap();
        let report = run_script(&script);
        assert!(report.passed, "{name}: {:?}", report.failure());
    }
}

#[test]
fn mutated_twins_fail() {
    for name in NAMES {
        let script = load_script(&fixture(&format!("mutated/{name}.json"))).unwrap();
        let report = run_script(&script);
        assert!(!report.passed, "{name} mutant passed");
    }
}

#[test]
fn p_chain_mutant_fails_at_eleven() {
    let script = load_script(&fixture("mutated/p_chain.json")).unwrap();
    let report = run_script(&script);
    let bad = report.failure().unwrap();
    assert_eq!(bad.op, "assert_equals");
    assert!(bad.detail.starts_with("e11 "), "{}", bad.detail);
}

#[test]
fn originals_reach_x_by_derivation() {
    for name in NAMES {
        let r = run_script(&load_script(&fixture(&format!("{name}.json"))).unwrap());
        let hit = r.steps.iter().any(|s| s.op == "assert_in" && s.detail.ends_with("by derivation"));
        assert!(hit, "{name}: no membership derived from the generators");
    }
}
