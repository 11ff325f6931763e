//! Acceptance suite: one PASS/FAIL line per criterion.

use stablewalk::harness::{run_acceptance, DEFAULT_ACCEPT_SEED};
use stablewalk::par::Execution;

fn main() {
    let run = run_acceptance(DEFAULT_ACCEPT_SEED, Execution::default()).expect("acceptance suite runs");
    let mut unexpected = Vec::new();
    for (c, t) in run.report.criteria.iter().zip(&run.timings) {
        println!("{}", c.line(*t));
        let on_time = *t <= c.budget;
        if let Some(why) = &c.known_failure {
            println!("    known failure: {why}");
            // The closed form must still agree with the minimization at 2a.
            assert!(c.metrics["relative_gap_doubled_a"] < 1e-6, "criterion {} diagnosis no longer holds", c.id);
        } else if !(c.passed && on_time) {
            unexpected.push(c.id);
        }
    }
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
