use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::Result;
use crate::estimators::logistic::sigmoid;
use crate::model::{Arm, Covariates, ObservationalDataset, Row};
use crate::sim::{ScmConfig, YMode};

/// A simulated sample and its counterfactual ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub data: ObservationalDataset,
    /// Mean over units of `y(t=1) − y(t=0)`.
    pub ace: f64,
    /// Rows whose outcome carries the `δ·u` shift (linear mode only).
    pub contaminated: usize,
}

#[derive(Serialize)]
struct GroundTruth {
    ace: f64,
}

impl Simulation {
    pub fn ground_truth_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&GroundTruth { ace: self.ace })?)
    }

    pub fn write_ground_truth(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.ground_truth_json()?)?;
        Ok(())
    }
}

/// The generator's RNG: ChaCha20 seeded through `seed_from_u64`.
pub fn rng_for(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent seed for replicate `index` of an experiment with `base` seed
/// (SplitMix64 finalizer over `base + index · φ`).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Samples `config.n` units from the structural equations.
///
/// Per unit the draws happen in a fixed order: `w_1..w_d`, `u`, the
/// treatment uniform, then either the outcome uniform (binary mode) or the
/// contamination uniform and the Gaussian noise (linear mode). The binary
/// ground truth evaluates both potential outcomes against the same outcome
/// uniform; the linear ground truth is exactly `lambda_t`.
pub fn generate(config: &ScmConfig) -> Result<Simulation> {
    config.validate()?;
    let mut rng = rng_for(config.seed);
    let mut rows = Vec::with_capacity(config.n);
    let mut effect_sum = 0.0;
    let mut contaminated = 0;
    for _ in 0..config.n {
        let mut bits = 0u64;
        for j in 0..config.d {
            if rng.random::<f64>() < config.w_p {
                bits |= 1 << j;
            }
        }
        let w = Covariates::new(bits, config.d)?;
        let z: f64 = rng.sample(StandardNormal);
        let u = config.mu_u + config.sigma_u * z;
        let e = sigmoid(w.dot(&config.psi) + config.kappa * u);
        let arm = if rng.random::<f64>() < e { Arm::Treated } else { Arm::Control };
        let t = arm.bit() as f64;
        let y = match config.y_mode {
            YMode::BernoulliSigmoid => {
                let v: f64 = rng.random();
                let base = w.dot(&config.nu) + config.tau * u;
                let y1 = (v < sigmoid(base + config.lambda_t)) as u8 as f64;
                let y0 = (v < sigmoid(base)) as u8 as f64;
                effect_sum += y1 - y0;
                if arm == Arm::Treated {
                    y1
                } else {
                    y0
                }
            }
            YMode::LinearGaussian => {
                let hit = rng.random::<f64>() < config.eta;
                let noise: f64 = rng.sample(StandardNormal);
                let shift = if hit {
                    contaminated += 1;
                    config.delta * u
                } else {
                    0.0
                };
                w.dot(&config.nu) + config.lambda_t * t + shift + config.noise_sigma * noise
            }
        };
        rows.push(Row { w, arm, y });
    }
    let ace = match config.y_mode {
        YMode::BernoulliSigmoid => effect_sum / config.n as f64,
        YMode::LinearGaussian => config.lambda_t,
    };
    Ok(Simulation { data: ObservationalDataset::new(config.d, rows)?, ace, contaminated })
}
