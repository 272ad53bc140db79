use std::io::Write;

use zhkit::suite::{run, SuiteConfig};

/// Writes the outcome line past the test harness's capture, then fails on a failure.
fn criterion(id: u32) {
    let out = run(id, &SuiteConfig::default());
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{out}").unwrap();
    stdout.flush().unwrap();
    assert!(out.passed(), "{out}");
}

#[test]
fn criterion_1_rule_soundness() {
    criterion(1);
}

#[test]
fn criterion_2_derivations() {
    criterion(2);
}

#[test]
fn criterion_3_gate_encodings() {
    criterion(3);
}

#[test]
fn criterion_4_universality() {
    criterion(4);
}

#[test]
fn criterion_5_successor() {
    criterion(5);
}

#[test]
fn criterion_6_reversible_compiler() {
    criterion(6);
}

#[test]
fn criterion_7_gate_count_scaling() {
    criterion(7);
}

#[test]
fn criterion_8_clifford() {
    criterion(8);
}

#[test]
fn criterion_9_extraction() {
    criterion(9);
}
