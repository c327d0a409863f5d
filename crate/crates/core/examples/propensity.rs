//! Fit frequency and logistic propensity models and compare their scores
//! with the generating treatment model.
//!
//! `cargo run --example propensity`

use causal_bounds::estimators::logistic::sigmoid;
use causal_bounds::estimators::{fit_propensity, PropensityKind};
use causal_bounds::model::Covariates;
use causal_bounds::sim::{generate, ScmConfig};

fn main() -> causal_bounds::Result<()> {
    let config = ScmConfig::sec6(1.0).with_n(10_000).with_seed(11);
    let data = generate(&config)?.data;
    let logistic = fit_propensity(&data, PropensityKind::Logistic, None)?;
    let frequency = fit_propensity(&data, PropensityKind::EmpiricalFrequency, None)?;
    let fit = logistic.logistic_fit().expect("logistic model keeps its fit");
    println!("converged after {} iterations", fit.iterations);
    println!("coefficients {:?}", fit.coef.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>());
    println!("generating   {:?}", config.psi);
    println!("{:<8}{:>10}{:>12}{:>10}", "w", "true", "logistic", "freq");
    for w in Covariates::enumerate(config.d).step_by(5) {
        let truth = sigmoid(w.dot(&config.psi));
        println!("{:<8}{truth:>10.4}{:>12.4}{:>10.4}", w.to_string(), logistic.score(w)?, frequency.score(w)?);
    }
    let clipped = logistic.with_clip(0.3)?;
    let w = Covariates::from_components(&[1, 0, 1, 0, 1])?;
    println!("score at {w}: raw {:.4}, clipped to [0.3, 0.7] {:.4}", clipped.raw_score(w)?, clipped.score(w)?);
    Ok(())
}
