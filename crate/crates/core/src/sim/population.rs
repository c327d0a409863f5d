use crate::error::{Error, Result};
use crate::estimators::logistic::sigmoid;
use crate::model::{Arm, Cell, Covariates, DiscreteJoint};
use crate::sim::{ScmConfig, YMode};

/// Largest covariate dimension [`population_joint`] enumerates.
pub const POPULATION_DIM_LIMIT: usize = 12;

fn check_enumerable(config: &ScmConfig, u_grid: Option<&[(f64, f64)]>) -> Result<Vec<(f64, f64)>> {
    config.validate()?;
    if config.y_mode != YMode::BernoulliSigmoid {
        return Err(Error::UnsupportedMode("the exact joint requires the bernoulli-sigmoid outcome".into()));
    }
    if config.d > POPULATION_DIM_LIMIT {
        return Err(Error::TooLarge { d: config.d, limit: POPULATION_DIM_LIMIT });
    }
    match u_grid {
        Some(grid) => {
            if grid.is_empty() || grid.iter().any(|&(u, m)| !u.is_finite() || m.is_nan() || m < 0.0) {
                return Err(Error::invalid("u_grid", "needs finite points with nonnegative masses"));
            }
            let total: f64 = grid.iter().map(|g| g.1).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("u_grid", format!("masses sum to {total}, not 1")));
            }
            Ok(grid.to_vec())
        }
        None if config.kappa == 0.0 && config.tau == 0.0 => Ok(vec![(0.0, 1.0)]),
        None => Err(Error::UnsupportedMode("kappa or tau is nonzero; supply a discretized grid for u".into())),
    }
}

fn covariate_mass(config: &ScmConfig, w: Covariates) -> f64 {
    (0..config.d).map(|j| if w.get(j) == 1 { config.w_p } else { 1.0 - config.w_p }).product()
}

/// The exact joint over `(W, T, Y)` implied by the binary-outcome equations.
///
/// `u_grid` lists `(u, mass)` points standing in for the latent confounder;
/// it may be omitted when `kappa = tau = 0`.
pub fn population_joint(config: &ScmConfig, u_grid: Option<&[(f64, f64)]>) -> Result<DiscreteJoint> {
    let grid = check_enumerable(config, u_grid)?;
    let mut cells = Vec::with_capacity(4 << config.d);
    for w in Covariates::enumerate(config.d) {
        let qw = covariate_mass(config, w);
        let mut masses = [[0.0; 2]; 2];
        for &(u, mu) in &grid {
            let e = sigmoid(w.dot(&config.psi) + config.kappa * u);
            for arm in Arm::BOTH {
                let pt = if arm == Arm::Treated { e } else { 1.0 - e };
                let py1 = sigmoid(w.dot(&config.nu) + config.tau * u + config.lambda_t * arm.bit() as f64);
                masses[arm.index()][1] += mu * pt * py1;
                masses[arm.index()][0] += mu * pt * (1.0 - py1);
            }
        }
        for arm in Arm::BOTH {
            for (y, mass) in masses[arm.index()].iter().enumerate() {
                cells.push(Cell { w, arm, y: y as f64, p: qw * mass });
            }
        }
    }
    let total: f64 = cells.iter().map(|c| c.p).sum();
    cells.iter_mut().for_each(|c| c.p /= total);
    DiscreteJoint::new(config.d, cells)
}

/// `E_{W,U}[sigmoid(ν·w + τu + λ) − sigmoid(ν·w + τu)]`.
pub fn population_ace(config: &ScmConfig, u_grid: Option<&[(f64, f64)]>) -> Result<f64> {
    let grid = check_enumerable(config, u_grid)?;
    let mut ace = 0.0;
    for w in Covariates::enumerate(config.d) {
        let qw = covariate_mass(config, w);
        for &(u, mu) in &grid {
            let base = w.dot(&config.nu) + config.tau * u;
            ace += qw * mu * (sigmoid(base + config.lambda_t) - sigmoid(base));
        }
    }
    Ok(ace)
}
