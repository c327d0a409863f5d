use serde::Serialize;

use crate::error::Result;
use crate::estimators::{fit_propensity, ipw_estimate, PropensityKind};
use crate::experiments::{in_parallel, min_max, write_csv};
use crate::model::mean;
use crate::robust::{robust_ipw_estimate, ContaminationSpec};
use crate::sim::{derive_seed, generate, ScmConfig};

/// Contamination levels of the robust-IPW comparison table.
pub const SUPP_E_ETAS: [f64; 5] = [0.0, 0.05, 0.1, 0.15, 0.2];

/// One seed at one contamination level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuppEReplicate {
    pub eta: f64,
    pub seed: u64,
    pub ace: f64,
    pub robust: f64,
    pub standard: f64,
}

/// One line of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuppERow {
    pub eta: f64,
    pub robust_min: f64,
    pub robust_max: f64,
    pub standard_min: f64,
    pub standard_max: f64,
}

impl SuppERow {
    pub fn robust_midpoint(&self) -> f64 {
        (self.robust_min + self.robust_max) / 2.0
    }

    pub fn robust_width(&self) -> f64 {
        self.robust_max - self.robust_min
    }

    pub fn standard_width(&self) -> f64 {
        self.standard_max - self.standard_min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuppETable {
    pub rows: Vec<SuppERow>,
    pub replicates: Vec<SuppEReplicate>,
}

impl SuppETable {
    /// `eta,robust_min,robust_max,standard_min,standard_max`.
    pub fn to_csv(&self) -> Result<String> {
        write_csv(&self.rows)
    }

    fn at(&self, eta: f64) -> impl Iterator<Item = &SuppEReplicate> {
        self.replicates.iter().filter(move |r| r.eta == eta)
    }

    /// Mean of `|robust − ace|` over seeds at each level.
    pub fn robust_mean_abs_error(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| mean(&self.at(row.eta).map(|r| (r.robust - r.ace).abs()).collect::<Vec<_>>()))
            .collect()
    }

    /// Sample variances `(robust, standard)` across seeds at each level.
    pub fn variances(&self) -> Vec<(f64, f64)> {
        let var = |xs: Vec<f64>| {
            let m = mean(&xs);
            xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
        };
        self.rows
            .iter()
            .map(|row| {
                (var(self.at(row.eta).map(|r| r.robust).collect()), var(self.at(row.eta).map(|r| r.standard).collect()))
            })
            .collect()
    }
}

/// Robust IPW against frequency-propensity IPW on contaminated linear data,
/// `seeds` replicates per level. Replicate `i` uses the same seed at every
/// level. `preset` maps a contamination level to a generator config.
pub fn robust_table(preset: fn(f64) -> ScmConfig, etas: &[f64], seeds: usize, base_seed: u64) -> Result<SuppETable> {
    let jobs: Vec<(f64, usize)> = etas.iter().flat_map(|&eta| (0..seeds).map(move |i| (eta, i))).collect();
    let replicates = in_parallel(jobs.len(), |job| {
        let (eta, i) = jobs[job];
        let seed = derive_seed(base_seed, i as u64);
        let config = preset(eta).with_seed(seed);
        let sim = generate(&config)?;
        let prop = fit_propensity(&sim.data, PropensityKind::EmpiricalFrequency, None)?;
        let spec = ContaminationSpec::new(eta, config.noise_sigma)?;
        Ok(SuppEReplicate {
            eta,
            seed,
            ace: sim.ace,
            robust: robust_ipw_estimate(&sim.data, &spec)?.value,
            standard: ipw_estimate(&sim.data, &prop)?.value,
        })
    })?;
    let rows = etas
        .iter()
        .map(|&eta| {
            let at: Vec<_> = replicates.iter().filter(|r| r.eta == eta).collect();
            let (robust_min, robust_max) = min_max(at.iter().map(|r| r.robust));
            let (standard_min, standard_max) = min_max(at.iter().map(|r| r.standard));
            SuppERow { eta, robust_min, robust_max, standard_min, standard_max }
        })
        .collect();
    Ok(SuppETable { rows, replicates })
}
