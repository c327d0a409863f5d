//! Compute the four-term error bound for several weightings of one sample
//! and compare it with the actual error.
//!
//! `cargo run --example bounds`

use causal_bounds::bounds::total_bound;
use causal_bounds::estimators::{fit_propensity, ipw_estimate, PropensityKind};
use causal_bounds::model::{sample_ape, WeightFunction};
use causal_bounds::sim::{generate, ScmConfig};

fn main() -> causal_bounds::Result<()> {
    let sim = generate(&ScmConfig::sec6(1.0).with_seed(2))?;
    let data = &sim.data;
    let prop = fit_propensity(data, PropensityKind::Logistic, None)?;

    let report = total_bound(data, &prop.ipw_weights()?, 0.01, 0.95)?;
    let error = (ipw_estimate(data, &prop)?.value - sim.ace).abs();
    println!("ipw error {error:.4}, bound {:.4}", report.total);
    println!("{}", report.summary());
    println!("{}", report.to_json_string()?);

    let clipped = total_bound(data, &prop.with_clip(0.1)?.ipw_weights()?, 0.01, 0.95)?;
    println!(
        "clipped at 0.1: bias {:.4}, variance {:.4}",
        clipped.wld_t1.abs() + clipped.wld_t0.abs(),
        clipped.vr_t1 + clipped.vr_t0
    );

    let naive = total_bound(data, &WeightFunction::constant(1.0), 0.01, 0.95)?;
    let naive_error = (sample_ape(data)?.value - sim.ace).abs();
    println!("no adjustment: error {naive_error:.4}, bound {:.4}", naive.total);
    Ok(())
}
