//! Randomized checks of the two trace inequalities behind the test bounds.
//!
//! cargo run --example trace_inequalities

use qht::finite_n::{power_difference_suite, split_trace_suite};

fn main() -> qht::Result<()> {
    let dims = [2, 3, 4, 5, 6];
    for suite in [
        split_trace_suite(7, 200, &dims)?,
        power_difference_suite(7, 200, &dims)?,
    ] {
        let worst = suite.worst().expect("non-empty suite");
        println!(
            "{:<10} {} instances, {} rank deficient, {} failures; tightest gap {:.3e} (tol {:.1e}, dim {})",
            suite.name,
            suite.rows.len(),
            suite.rank_deficient(),
            suite.failures(),
            worst.gap,
            worst.tolerance,
            worst.dim
        );
    }
    Ok(())
}
