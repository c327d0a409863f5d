use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{mcdiarmid_vr, wld_with_location, BoundReport};
use crate::error::{Error, Result};
use crate::estimators::{fit_propensity, ipw_contributions, stratified_effect, PropensityKind, PropensityModel};
use crate::model::{Arm, DiscreteJoint, EffectEstimate, ObservationalDataset, WeightFunction};
use crate::robust::robust_mean_1d;

/// Contamination level and the constants of the robust-mean error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContaminationSpec {
    pub eta: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "one")]
    pub c4: f64,
    pub sigma: f64,
    #[serde(default = "one")]
    pub big_o_const: f64,
}

fn default_epsilon() -> f64 {
    0.01
}

fn one() -> f64 {
    1.0
}

impl ContaminationSpec {
    /// `epsilon = 0.01`, `c4 = 1`, `big_o_const = 1`.
    pub fn new(eta: f64, sigma: f64) -> Result<Self> {
        let spec = ContaminationSpec { eta, epsilon: default_epsilon(), c4: 1.0, sigma, big_o_const: 1.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0 && self.epsilon >= 0.0 && self.eta + self.epsilon < 0.5) {
            return Err(Error::invalid(
                "eta",
                format!("need eta, epsilon >= 0 and eta + epsilon < 0.5, got {} and {}", self.eta, self.epsilon),
            ));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma", format!("{} must be finite and > 0", self.sigma)));
        }
        if !(self.c4 >= 1.0 && self.c4.is_finite()) {
            return Err(Error::invalid("c4", format!("{} must be finite and >= 1", self.c4)));
        }
        if !(self.big_o_const >= 0.0 && self.big_o_const.is_finite()) {
            return Err(Error::invalid("big_o_const", format!("{} must be finite and >= 0", self.big_o_const)));
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: ContaminationSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// `big_o_const · C^{1/4} · (eta + epsilon)^{3/4} · sigma`.
    fn per_stratum_error(&self) -> f64 {
        self.big_o_const * self.c4.powf(0.25) * (self.eta + self.epsilon).powf(0.75) * self.sigma
    }

    fn location(&self) -> impl Fn(&[f64]) -> Result<f64> + '_ {
        move |ys| robust_mean_1d(ys, self.eta, self.epsilon)
    }
}

/// The penalty `γ = Σ_w Q̂(w) · big_o_const · C^{1/4} (η+ε)^{3/4} σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaPenalty {
    /// Summed over observed strata.
    pub value: f64,
    /// The same quantity with `Σ_w Q̂(w) = 1` applied.
    pub collapsed: f64,
}

pub fn gamma_penalty(data: &ObservationalDataset, spec: &ContaminationSpec) -> Result<GammaPenalty> {
    spec.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = spec.per_stratum_error();
    let value: f64 = data.covariate_frequencies().values().map(|q| q * k).sum();
    if (value - k).abs() > 1e-12 * k.max(1.0) {
        return Err(Error::InvalidRepresentation(format!("summed gamma {value} differs from collapsed {k}")));
    }
    Ok(GammaPenalty { value, collapsed: k })
}

/// IPW with the robust mean applied to the per-row terms `t·y/e(w)` and
/// `(1−t)·y/(1−e(w))` in place of their averages, using frequency
/// propensities.
pub fn robust_ipw_estimate(data: &ObservationalDataset, spec: &ContaminationSpec) -> Result<EffectEstimate> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let prop = fit_propensity(data, PropensityKind::EmpiricalFrequency, None)?;
    robust_ipw_with_propensity(data, &prop, spec)
}

pub fn robust_ipw_with_propensity(
    data: &ObservationalDataset,
    prop: &PropensityModel,
    spec: &ContaminationSpec,
) -> Result<EffectEstimate> {
    spec.validate()?;
    let counts = data.require_both_arms()?;
    let [control, treated] = ipw_contributions(data, prop)?;
    let location = spec.location();
    EffectEstimate::new("robust-ipw", location(&treated)? - location(&control)?, counts, prop.clip())
}

/// `Σ_w Q̂(w) [μ̂(w, 1) − μ̂(w, 0)]` with robust per-stratum means `μ̂`.
pub fn robust_backdoor_estimate(data: &ObservationalDataset, spec: &ContaminationSpec) -> Result<EffectEstimate> {
    spec.validate()?;
    let value = stratified_effect(data, spec.location())?;
    EffectEstimate::new("robust-backdoor", value, data.arm_counts(), None)
}

/// The bound with robust stratum means in the bias terms and each variance
/// term widened by `gamma`.
pub fn robust_total_bound(
    data: &ObservationalDataset,
    beta: &WeightFunction,
    spec: &ContaminationSpec,
    rho: f64,
    p: f64,
) -> Result<BoundReport> {
    spec.validate()?;
    data.require_both_arms()?;
    let gamma = gamma_penalty(data, spec)?.value;
    let wld = [
        wld_with_location(data, beta, rho, Arm::Control, spec.location())?,
        wld_with_location(data, beta, rho, Arm::Treated, spec.location())?,
    ];
    let vr = [mcdiarmid_vr(data, beta, p, Arm::Control)? + gamma, mcdiarmid_vr(data, beta, p, Arm::Treated)? + gamma];
    Ok(BoundReport::from_parts(wld, vr, p, rho, data.len(), Some(gamma)))
}

/// Worst-case population bias of exact IPW when every robust conditional
/// mean is off by `gamma`:
/// `Σ_t Σ_w |R(w|t) (E[Y|t,w] + γ) − P(w|t) E[Y|t,w]|` with `R` the IPW
/// representation of `q` and `P` its randomized target.
pub fn ipw_worst_case_bias(q: &DiscreteJoint, gamma: f64) -> Result<f64> {
    let r = crate::model::induce_representation(
        q,
        &WeightFunction::ipw_from_joint(q),
        crate::model::Normalization::Renormalize,
    )?;
    let p = q.randomized_target()?;
    let means = q.conditional_means();
    let mut total = 0.0;
    for arm in Arm::BOTH {
        let r_cond = r.covariates_given_arm(arm);
        let p_cond = p.covariates_given_arm(arm);
        for (w, pw) in p_cond {
            let m = means[&(w, arm)];
            let rw = r_cond.get(&w).copied().unwrap_or(0.0);
            total += (rw * (m + gamma) - pw * m).abs();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::total_bound;
    use crate::estimators::{backdoor_estimate, ipw_estimate};
    use crate::sim::{generate, ScmConfig};
    use crate::testutil::{eight_cell, random_joint};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn spec(eta: f64) -> ContaminationSpec {
        ContaminationSpec::new(eta, 0.5).unwrap()
    }

    #[test]
    fn spec_invariants() {
        assert!(ContaminationSpec::new(0.495, 1.0).is_err());
        assert!(ContaminationSpec::new(0.1, 0.0).is_err());
        let s =
            ContaminationSpec::from_json_str(r#"{"eta":0.05,"epsilon":0.01,"c4":1.0,"sigma":0.5,"big_o_const":1.0}"#)
                .unwrap();
        assert_eq!(s, spec(0.05));
        assert!(ContaminationSpec::from_json_str(r#"{"eta":0.05,"sigma":0.5,"c4":0.5}"#).is_err());
    }

    #[test]
    fn gamma_arithmetic() {
        let data = generate(&ScmConfig::supp_e(0.0).with_seed(1).with_n(200)).unwrap().data;
        let mut s = ContaminationSpec::new(0.0525, 1.0).unwrap();
        s.epsilon = 0.01;
        // (0.0625)^{3/4} = 0.125.
        assert!((gamma_penalty(&data, &s).unwrap().value - 0.125).abs() < 1e-12);
        let doubled = ContaminationSpec { sigma: 2.0, ..s };
        assert!((gamma_penalty(&data, &doubled).unwrap().value - 0.25).abs() < 1e-12);
        let zero = ContaminationSpec { eta: 0.0, epsilon: 0.0, ..s };
        assert_eq!(gamma_penalty(&data, &zero).unwrap().value, 0.0);
    }

    #[test]
    fn eta_zero_reduces_to_plain_estimators() {
        let data = generate(&ScmConfig::supp_e(0.0).with_seed(2)).unwrap().data;
        let prop = fit_propensity(&data, PropensityKind::EmpiricalFrequency, None).unwrap();
        let s = spec(0.0);
        assert_eq!(robust_ipw_estimate(&data, &s).unwrap().value, ipw_estimate(&data, &prop).unwrap().value);
        let b = backdoor_estimate(&data).unwrap().value;
        assert_eq!(robust_backdoor_estimate(&data, &s).unwrap().value, b);
        assert!((robust_ipw_estimate(&data, &s).unwrap().value - b).abs() < 1e-12);
    }

    #[test]
    fn eta_epsilon_zero_bound_matches_plain_bound() {
        let data = generate(&ScmConfig::supp_e(0.0).with_seed(2).with_n(2000)).unwrap().data;
        let beta = fit_propensity(&data, PropensityKind::EmpiricalFrequency, None).unwrap().ipw_weights().unwrap();
        let s = ContaminationSpec { epsilon: 0.0, ..spec(0.0) };
        let robust = robust_total_bound(&data, &beta, &s, 0.01, 0.95).unwrap();
        let plain = total_bound(&data, &beta, 0.01, 0.95).unwrap();
        assert_eq!(robust.gamma, Some(0.0));
        assert_eq!(BoundReport { gamma: None, ..robust }, plain);
    }

    #[test]
    fn robust_estimate_resists_contamination() {
        let data = generate(&ScmConfig::supp_e(0.05).with_seed(4)).unwrap().data;
        let prop = fit_propensity(&data, PropensityKind::EmpiricalFrequency, None).unwrap();
        let robust = robust_ipw_estimate(&data, &spec(0.05)).unwrap().value;
        let plain = ipw_estimate(&data, &prop).unwrap().value;
        assert!((robust - 1.0).abs() < 0.2, "{robust}");
        assert!((robust - 1.0).abs() < (plain - 1.0).abs());
    }

    #[test]
    fn worst_case_bias_is_two_gamma() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for gamma in [0.0, 0.125, 0.7] {
            assert!((ipw_worst_case_bias(&eight_cell(), gamma).unwrap() - 2.0 * gamma).abs() < 1e-12);
            let q = random_joint(3, &mut rng);
            assert!((ipw_worst_case_bias(&q, gamma).unwrap() - 2.0 * gamma).abs() < 1e-12);
        }
    }
}
