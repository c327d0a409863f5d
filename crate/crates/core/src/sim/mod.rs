//! Structural-equation data generator with counterfactual ground truth.
//!
//! Binary covariates, a logistic treatment assignment and either a Bernoulli
//! or a linear-Gaussian outcome, optionally confounded by a latent `u`.

mod config;
mod generate;
mod population;

pub use config::{ScmConfig, YMode, PRESETS, SEC6_NU, SEC6_PSI_DIRECTION};
pub use generate::{derive_seed, generate, rng_for, Simulation};
pub use population::{population_ace, population_joint, POPULATION_DIM_LIMIT};
