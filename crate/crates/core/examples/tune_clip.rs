//! Choose a clipping threshold by minimizing the error bound, at two sample
//! sizes.
//!
//! `cargo run --example tune_clip`

use causal_bounds::bounds::tune_clip_threshold;
use causal_bounds::estimators::{fit_propensity, PropensityKind};
use causal_bounds::experiments::FIG3_RHO_GRID;
use causal_bounds::sim::{generate, ScmConfig};

fn main() -> causal_bounds::Result<()> {
    for n in [1000, 10_000] {
        let data = generate(&ScmConfig::clip_tune().with_n(n).with_seed(5))?.data;
        let prop = fit_propensity(&data, PropensityKind::EmpiricalFrequency, None)?;
        let tuned = tune_clip_threshold(&data, &prop, &FIG3_RHO_GRID, 0.95, 0.01)?;
        println!("n={n}: best rho {}", tuned.best_rho);
        print!("{}", tuned.to_csv());
    }
    Ok(())
}
