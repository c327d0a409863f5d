use crate::error::{Error, Result};
use crate::estimators::PropensityModel;
use crate::model::{mean, Arm, DiscreteJoint, EffectEstimate, ObservationalDataset};

/// Per-row IPW terms `t·y / e(w)` and `(1−t)·y / (1−e(w))` over all `n` rows.
pub(crate) fn ipw_contributions(data: &ObservationalDataset, prop: &PropensityModel) -> Result<[Vec<f64>; 2]> {
    let mut treated = Vec::with_capacity(data.len());
    let mut control = Vec::with_capacity(data.len());
    for row in data.rows() {
        let e = prop.score(row.w)?;
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::ExtremePropensity { w: row.w, score: e });
        }
        match row.arm {
            Arm::Treated => {
                treated.push(row.y / e);
                control.push(0.0);
            }
            Arm::Control => {
                treated.push(0.0);
                control.push(row.y / (1.0 - e));
            }
        }
    }
    Ok([control, treated])
}

/// Inverse propensity weighting,
/// `(1/n) [Σ t_i y_i / e(w_i) − Σ (1−t_i) y_i / (1−e(w_i))]`.
///
/// Any clipping configured on `prop` is applied.
pub fn ipw_estimate(data: &ObservationalDataset, prop: &PropensityModel) -> Result<EffectEstimate> {
    let counts = data.require_both_arms()?;
    let [control, treated] = ipw_contributions(data, prop)?;
    let label = if prop.clip().is_some() { "clipped-ipw" } else { "ipw" };
    EffectEstimate::new(label, mean(&treated) - mean(&control), counts, prop.clip())
}

/// IPW with every score replaced by `min(max(e, ρ), 1−ρ)`.
pub fn clipped_ipw_estimate(data: &ObservationalDataset, prop: &PropensityModel, rho: f64) -> Result<EffectEstimate> {
    ipw_estimate(data, &prop.with_clip(rho)?)
}

/// Population IPW with exact propensities:
/// `E_Q[T Y / e(W)] − E_Q[(1−T) Y / (1−e(W))]`.
pub fn population_ipw(q: &DiscreteJoint) -> Result<f64> {
    let mut value = 0.0;
    for c in q.cells() {
        let e = q.propensity(c.w).unwrap_or(0.0);
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::ExtremePropensity { w: c.w, score: e });
        }
        value += match c.arm {
            Arm::Treated => c.p * c.y / e,
            Arm::Control => -c.p * c.y / (1.0 - e),
        };
    }
    Ok(value)
}
