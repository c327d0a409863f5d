use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{total_bound, BoundReport};
use crate::error::{Error, Result};
use crate::estimators::{check_rho, PropensityModel};
use crate::model::ObservationalDataset;

/// Bounds for every candidate threshold and the one that minimizes the total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneResult {
    pub best_rho: f64,
    pub candidates: Vec<f64>,
    pub reports: Vec<BoundReport>,
}

impl TuneResult {
    /// `rho,total` table, one line per candidate in input order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,total\n");
        for (rho, r) in self.candidates.iter().zip(&self.reports) {
            out.push_str(&format!("{rho},{}\n", r.total));
        }
        out
    }

    pub fn best_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&serde_json::json!({ "best_rho": self.best_rho }))?)
    }
}

/// Evaluates the bound of clipped IPW at each candidate threshold.
///
/// `prop` supplies the scores that get clipped; the bias reference is the
/// frequency IPW weighting clipped at `reference_rho`, the overlap level the
/// caller is willing to assume. Ties go to the smaller threshold.
pub fn tune_clip_threshold(
    data: &ObservationalDataset,
    prop: &PropensityModel,
    candidates: &[f64],
    p: f64,
    reference_rho: f64,
) -> Result<TuneResult> {
    if candidates.is_empty() {
        return Err(Error::invalid("candidates", "at least one clipping threshold is required"));
    }
    for &rho in candidates {
        check_rho(rho)?;
    }
    let reports = candidates
        .par_iter()
        .map(|&rho| total_bound(data, &prop.with_clip(rho)?.ipw_weights()?, reference_rho, p))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for i in 1..candidates.len() {
        let (t, bt) = (reports[i].total, reports[best].total);
        if t < bt || (t == bt && candidates[i] < candidates[best]) {
            best = i;
        }
    }
    Ok(TuneResult { best_rho: candidates[best], candidates: candidates.to_vec(), reports })
}
