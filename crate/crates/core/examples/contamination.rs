//! Shift a fraction of outcomes with a latent-confounder rule and watch the
//! plain and robust means react.
//!
//! `cargo run --example contamination`

use causal_bounds::model::{Arm, ObservationalDataset};
use causal_bounds::robust::{contaminate_with_flags, robust_mean_1d, ShiftRule, UShift};
use causal_bounds::sim::{generate, ScmConfig};

fn main() -> causal_bounds::Result<()> {
    let clean = generate(&ScmConfig::supp_e(0.0).with_seed(9))?.data;
    let rule = ShiftRule { delta: 10.0, u: UShift::Normal { mean: 5.0, sd: 1.0 } };
    let treated = |d: &ObservationalDataset| -> Vec<f64> {
        d.rows().iter().filter(|r| r.arm == Arm::Treated).map(|r| r.y).collect()
    };
    println!("{:<6}{:>8}{:>12}{:>12}", "eta", "hit", "mean", "robust");
    for eta in [0.0, 0.05, 0.1, 0.2] {
        let (dirty, flags) = contaminate_with_flags(&clean, eta, rule, 42)?;
        let ys = treated(&dirty);
        let hit = flags.iter().filter(|&&f| f).count();
        println!(
            "{eta:<6}{hit:>8}{:>12.4}{:>12.4}",
            ys.iter().sum::<f64>() / ys.len() as f64,
            robust_mean_1d(&ys, eta, 0.01)?
        );
    }
    Ok(())
}
