use serde::Serialize;

use crate::bounds::total_bound;
use crate::error::Result;
use crate::estimators::{fit_propensity, ipw_estimate, PropensityKind};
use crate::experiments::{in_parallel, write_csv};
use crate::model::mean;
use crate::sim::{derive_seed, generate, ScmConfig};

pub const FIG2_PSI_MULTIPLIERS: [f64; 3] = [0.5, 1.0, 2.0];
pub const FIG2_NS: [usize; 3] = [500, 2000, 8000];

/// Grid and bound settings for the bound-versus-error study.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Options {
    pub psi_multipliers: Vec<f64>,
    pub ns: Vec<usize>,
    pub seeds: usize,
    pub base_seed: u64,
    /// Confidence of each variance term.
    pub p: f64,
    /// Overlap level assumed for the bias reference.
    pub rho: f64,
}

impl Default for Fig2Options {
    fn default() -> Self {
        Fig2Options {
            psi_multipliers: FIG2_PSI_MULTIPLIERS.to_vec(),
            ns: FIG2_NS.to_vec(),
            seeds: 20,
            base_seed: 0,
            p: 0.95,
            rho: 0.01,
        }
    }
}

/// Logistic-propensity IPW on one simulated sample and its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig2Row {
    pub psi_multiplier: f64,
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
    pub true_ace: f64,
    pub ipw: f64,
    pub abs_error: f64,
    pub wld_t1: f64,
    pub wld_t0: f64,
    pub vr_t1: f64,
    pub vr_t0: f64,
    pub bound: f64,
    pub covered: bool,
}

/// Averages over the replicates of one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig2Summary {
    pub psi_multiplier: f64,
    pub n: usize,
    pub mean_abs_error: f64,
    pub mean_bound: f64,
    pub coverage: f64,
}

pub fn bound_tracking(options: &Fig2Options) -> Result<Vec<Fig2Row>> {
    let jobs: Vec<(f64, usize, usize)> = options
        .psi_multipliers
        .iter()
        .flat_map(|&m| options.ns.iter().flat_map(move |&n| (0..options.seeds).map(move |i| (m, n, i))))
        .collect();
    in_parallel(jobs.len(), |job| {
        let (psi_multiplier, n, replicate) = jobs[job];
        let seed = derive_seed(options.base_seed, replicate as u64);
        let sim = generate(&ScmConfig::sec6(psi_multiplier).with_n(n).with_seed(seed))?;
        let prop = fit_propensity(&sim.data, PropensityKind::Logistic, None)?;
        let ipw = ipw_estimate(&sim.data, &prop)?.value;
        let report = total_bound(&sim.data, &prop.ipw_weights()?, options.rho, options.p)?;
        let abs_error = (ipw - sim.ace).abs();
        Ok(Fig2Row {
            psi_multiplier,
            n,
            replicate,
            seed,
            true_ace: sim.ace,
            ipw,
            abs_error,
            wld_t1: report.wld_t1,
            wld_t0: report.wld_t0,
            vr_t1: report.vr_t1,
            vr_t0: report.vr_t0,
            bound: report.total,
            covered: abs_error <= report.total,
        })
    })
}

/// One line per `(psi_multiplier, n)` in first-seen order.
pub fn summarize(rows: &[Fig2Row]) -> Vec<Fig2Summary> {
    let mut keys: Vec<(f64, usize)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.psi_multiplier, r.n)) {
            keys.push((r.psi_multiplier, r.n));
        }
    }
    keys.into_iter()
        .map(|(m, n)| {
            let group: Vec<&Fig2Row> = rows.iter().filter(|r| r.psi_multiplier == m && r.n == n).collect();
            Fig2Summary {
                psi_multiplier: m,
                n,
                mean_abs_error: mean(&group.iter().map(|r| r.abs_error).collect::<Vec<_>>()),
                mean_bound: mean(&group.iter().map(|r| r.bound).collect::<Vec<_>>()),
                coverage: group.iter().filter(|r| r.covered).count() as f64 / group.len() as f64,
            }
        })
        .collect()
}

pub fn rows_csv(rows: &[Fig2Row]) -> Result<String> {
    write_csv(rows)
}

pub fn summary_csv(rows: &[Fig2Row]) -> Result<String> {
    write_csv(&summarize(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_shapes() {
        let options =
            Fig2Options { psi_multipliers: vec![1.0], ns: vec![400, 800], seeds: 3, ..Fig2Options::default() };
        let rows = bound_tracking(&options).unwrap();
        assert_eq!(rows.len(), 6);
        let summary = summarize(&rows);
        assert_eq!(summary.len(), 2);
        assert!(rows_csv(&rows).unwrap().starts_with("psi_multiplier,n,replicate,seed,true_ace,ipw,abs_error,"));
        for r in &rows {
            assert!((r.bound - (r.wld_t1.abs() + r.wld_t0.abs() + r.vr_t1 + r.vr_t0)).abs() < 1e-12);
        }
    }
}
