//! Draw datasets from the built-in generator presets and report their
//! ground-truth effects.
//!
//! `cargo run --example simulate`

use causal_bounds::sim::{generate, population_ace, ScmConfig, PRESETS};

fn main() -> causal_bounds::Result<()> {
    for name in PRESETS {
        let config = ScmConfig::preset(name)?.with_seed(7);
        let sim = generate(&config)?;
        let [control, treated] = sim.data.arm_counts();
        let contaminated = sim.contaminated;
        println!(
            "{name:<11} n={:<6} d={} treated={treated:<5} control={control:<5} contaminated={contaminated:<4} ace={:.4}",
            sim.data.len(),
            sim.data.dim(),
            sim.ace
        );
    }
    // Binary-outcome generators without a latent confounder also have an
    // exact population effect.
    println!("sec6 population ace = {:.6}", population_ace(&ScmConfig::sec6(1.0), None)?);

    let sim = generate(&ScmConfig::supp_e(0.05).with_n(5).with_seed(1))?;
    let mut csv = Vec::new();
    sim.data.to_csv_writer(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    println!("{}", sim.ground_truth_json()?);
    Ok(())
}
