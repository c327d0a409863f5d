use serde::Serialize;

use crate::bounds::tune_clip_threshold;
use crate::error::Result;
use crate::estimators::{fit_propensity, PropensityKind};
use crate::experiments::{in_parallel, write_csv};
use crate::sim::{derive_seed, generate, ScmConfig};

pub const FIG3_NS: [usize; 4] = [1000, 2000, 5000, 10_000];

pub const FIG3_RHO_GRID: [f64; 14] = [0.01, 0.02, 0.03, 0.04, 0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45];

/// Settings for the clipping-threshold study.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Options {
    pub ns: Vec<usize>,
    pub rhos: Vec<f64>,
    pub seeds: usize,
    pub base_seed: u64,
    pub p: f64,
    /// Overlap level of the generator, used for the bias reference.
    pub reference_rho: f64,
}

impl Default for Fig3Options {
    fn default() -> Self {
        Fig3Options {
            ns: FIG3_NS.to_vec(),
            rhos: FIG3_RHO_GRID.to_vec(),
            seeds: 10,
            base_seed: 0,
            p: 0.95,
            reference_rho: 0.01,
        }
    }
}

/// The bound curve over the threshold grid for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Replicate {
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
    pub rhos: Vec<f64>,
    pub totals: Vec<f64>,
    pub best_rho: f64,
}

#[derive(Serialize)]
struct CurvePoint {
    n: usize,
    replicate: usize,
    seed: u64,
    rho: f64,
    total: f64,
    argmin: u8,
}

#[derive(Serialize)]
struct BestRho {
    n: usize,
    replicate: usize,
    seed: u64,
    best_rho: f64,
}

/// Tunes the clipping threshold on the clip-tune generator at every sample
/// size. Replicate `i` uses the same seed at every size.
pub fn clip_threshold_curves(options: &Fig3Options) -> Result<Vec<Fig3Replicate>> {
    let jobs: Vec<(usize, usize)> = options.ns.iter().flat_map(|&n| (0..options.seeds).map(move |i| (n, i))).collect();
    in_parallel(jobs.len(), |job| {
        let (n, replicate) = jobs[job];
        let seed = derive_seed(options.base_seed, replicate as u64);
        let sim = generate(&ScmConfig::clip_tune().with_n(n).with_seed(seed))?;
        let prop = fit_propensity(&sim.data, PropensityKind::EmpiricalFrequency, None)?;
        let tuned = tune_clip_threshold(&sim.data, &prop, &options.rhos, options.p, options.reference_rho)?;
        Ok(Fig3Replicate {
            n,
            replicate,
            seed,
            totals: tuned.reports.iter().map(|r| r.total).collect(),
            rhos: tuned.candidates,
            best_rho: tuned.best_rho,
        })
    })
}

/// `n,replicate,seed,rho,total,argmin`, one line per grid point.
pub fn curves_csv(replicates: &[Fig3Replicate]) -> Result<String> {
    let points: Vec<CurvePoint> = replicates
        .iter()
        .flat_map(|r| {
            r.rhos.iter().zip(&r.totals).map(move |(&rho, &total)| CurvePoint {
                n: r.n,
                replicate: r.replicate,
                seed: r.seed,
                rho,
                total,
                argmin: (rho == r.best_rho) as u8,
            })
        })
        .collect();
    write_csv(&points)
}

/// `n,replicate,seed,best_rho`.
pub fn best_csv(replicates: &[Fig3Replicate]) -> Result<String> {
    let best: Vec<BestRho> = replicates
        .iter()
        .map(|r| BestRho { n: r.n, replicate: r.replicate, seed: r.seed, best_rho: r.best_rho })
        .collect();
    write_csv(&best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_argmin_per_curve() {
        let options = Fig3Options { ns: vec![1000], seeds: 2, ..Fig3Options::default() };
        let reps = clip_threshold_curves(&options).unwrap();
        let csv = curves_csv(&reps).unwrap();
        assert!(csv.starts_with("n,replicate,seed,rho,total,argmin\n"));
        assert_eq!(csv.lines().filter(|l| l.ends_with(",1")).count(), 2);
        assert_eq!(best_csv(&reps).unwrap().lines().count(), 3);
    }
}
