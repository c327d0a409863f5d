use crate::error::{Error, Result};
use crate::model::{mean, Arm, DiscreteJoint, EffectEstimate, ObservationalDataset};

/// `Σ_w Q̂(w) [m(y | w, t=1) − m(y | w, t=0)]` for a per-stratum location
/// estimate `m`. Strata are visited in covariate order.
pub(crate) fn stratified_effect<F>(data: &ObservationalDataset, location: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    data.require_both_arms()?;
    let n = data.len() as f64;
    let mut value = 0.0;
    for (w, outcomes) in data.strata() {
        for arm in Arm::BOTH {
            if outcomes.arm(arm).is_empty() {
                return Err(Error::EmptyArmInStratum { w, arm });
            }
        }
        let share = outcomes.total() as f64 / n;
        value += share * (location(outcomes.arm(Arm::Treated))? - location(outcomes.arm(Arm::Control))?);
    }
    Ok(value)
}

/// Stratification on the observed covariates (the back-door adjustment).
pub fn backdoor_estimate(data: &ObservationalDataset) -> Result<EffectEstimate> {
    let value = stratified_effect(data, |ys| Ok(mean(ys)))?;
    EffectEstimate::new("backdoor", value, data.arm_counts(), None)
}

/// Population back-door aggregate `Σ_w Q(w) (E[Y|w,1] − E[Y|w,0])`.
pub fn population_backdoor(q: &DiscreteJoint) -> Result<f64> {
    let means = q.conditional_means();
    let mut value = 0.0;
    for (w, qw) in q.covariate_mass() {
        let mut m = [0.0; 2];
        for arm in Arm::BOTH {
            m[arm.index()] = *means.get(&(w, arm)).ok_or(Error::EmptyArmInStratum { w, arm })?;
        }
        value += qw * (m[1] - m[0]);
    }
    Ok(value)
}
