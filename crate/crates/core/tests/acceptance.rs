//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! per check (visible with `--nocapture`). Tolerances and resolutions are
//! pinned inside `torusflux::verify`.

use torusflux::verify::{self, CheckResult};

const SEED: u64 = 42;

fn report(criterion: &str, checks: &[CheckResult]) {
    let mut all_ok = true;
    for c in checks {
        println!(
            "{} criterion {criterion} / {}: value {:.3e} vs threshold {:.3e} ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.threshold,
            c.detail
        );
        all_ok &= c.passed;
    }
    assert!(all_ok, "criterion {criterion} failed");
}

#[test]
fn criterion_01_rotation_lengths() {
    let t = std::time::Instant::now();
    let checks = verify::criterion_rotation_lengths().expect("runs");
    report("1 (rotation lengths)", &checks);
    assert!(t.elapsed().as_secs_f64() < 1.0, "runtime budget: < 1 s");
}

#[test]
fn criterion_02_group_isomorphism() {
    let t = std::time::Instant::now();
    let checks = verify::criterion_group_isomorphism(SEED).expect("runs");
    report("2 (group isomorphism)", &checks);
    assert!(t.elapsed().as_secs_f64() < 120.0, "runtime budget: < 2 min");
}

#[test]
fn criterion_03_hodge_round_trip() {
    let t = std::time::Instant::now();
    let checks = verify::criterion_hodge_round_trip(SEED).expect("runs");
    report("3 (hodge round trip)", &checks);
    assert!(t.elapsed().as_secs_f64() < 10.0, "runtime budget: < 10 s");
}

#[test]
fn criterion_04_fathi_duality() {
    let t = std::time::Instant::now();
    let checks = verify::criterion_fathi_duality(SEED).expect("runs");
    report("4 (fathi duality)", &checks);
    assert!(t.elapsed().as_secs_f64() < 60.0, "runtime budget: < 1 min");
}

#[test]
fn criterion_05_hamiltonian_mass_flow() {
    let checks = verify::criterion_hamiltonian_mass_flow(SEED).expect("runs");
    report("5 (hamiltonian mass flow)", &checks);
}

#[test]
fn criterion_06_weinstein() {
    let t = std::time::Instant::now();
    let checks = verify::criterion_weinstein().expect("runs");
    report("6 (weinstein deformation)", &checks);
    assert!(t.elapsed().as_secs_f64() < 60.0, "runtime budget: < 1 min");
}

#[test]
fn criterion_07_ldefor2() {
    let checks = verify::criterion_ldefor2().expect("runs");
    report("7 (sequential deformation)", &checks);
}

#[test]
fn criterion_08_displacement() {
    let checks = verify::criterion_displacement().expect("runs");
    report("8 (displacement)", &checks);
}

#[test]
fn criterion_09_ugr() {
    let checks = verify::criterion_ugr().expect("runs");
    report("9 (one-parameter groups)", &checks);
}

#[test]
fn criterion_10_norm_symmetry() {
    let checks = verify::criterion_norm_symmetry(SEED).expect("runs");
    report("10 (norm symmetry)", &checks);
}
