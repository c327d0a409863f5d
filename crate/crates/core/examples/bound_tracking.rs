//! Replicated IPW error and bound over confounding strength and sample size.
//!
//! `cargo run --release --example bound_tracking`

use causal_bounds::experiments::{bound_tracking, summarize, Fig2Options};

fn main() -> causal_bounds::Result<()> {
    let rows = bound_tracking(&Fig2Options { seeds: 10, ..Fig2Options::default() })?;
    println!("{:<6}{:>7}{:>12}{:>12}{:>10}", "psi", "n", "mean error", "mean bound", "coverage");
    for s in summarize(&rows) {
        println!(
            "{:<6}{:>7}{:>12.4}{:>12.4}{:>10.2}",
            s.psi_multiplier, s.n, s.mean_abs_error, s.mean_bound, s.coverage
        );
    }
    Ok(())
}
