use woundcount::acceptance::{criterion_ids, run_criterion};
use woundcount::denef::leading_constant;

/// Criterion 7 asks for a 1e-6 gap at truncation degree 12. For p = q = 2 the
/// omitted factors prod_{deg v > 12} (1 - q_v^-2) differ from 1 by about
/// sum_{d > 12} 2^-d / d ~ 1.8e-5, so no faithful truncation at D = 12 gets
/// there. It is reported as failing; the parts that can hold are asserted.
const KNOWN_RED: [u32; 1] = [7];

#[test]
fn acceptance_suite() {
    let mut failed = Vec::new();
    for id in criterion_ids() {
        let result = run_criterion(id).expect("known criterion");
        println!("{}", result.line());
        if !result.passed {
            failed.push(id);
        }
    }
    let unexpected: Vec<u32> = failed.iter().copied().filter(|id| !KNOWN_RED.contains(id)).collect();
    assert!(unexpected.is_empty(), "failed criteria: {unexpected:?}");
}

#[test]
fn constant_gap_is_the_tail() {
    let two = leading_constant(2, 2, 12);
    assert!(two.within_tail_bound());
    assert!(two.gap > 1e-6);
    // omitted relative factor, summed exactly over degrees 13..60
    let omitted: f64 = (13..=60u32)
        .map(|d| woundcount::polyfield::necklace_count(2, d) as f64 * (-(2f64.powi(-2 * d as i32))).ln_1p())
        .sum();
    assert!((two.gap - two.assembled * omitted.abs()).abs() < 1e-9);
    let three = leading_constant(3, 3, 12);
    assert!(three.gap <= 1e-6 && three.within_tail_bound());
}
