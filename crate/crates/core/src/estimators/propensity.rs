use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::logistic::{self, LogisticFit};
use crate::model::{Arm, Covariates, ObservationalDataset, WeightFunction};

/// Largest dimension for which weights are tabulated over every covariate value.
const ENUMERATION_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropensityKind {
    /// Per-stratum treated fraction.
    EmpiricalFrequency,
    /// Logistic regression on the covariates with an intercept.
    Logistic,
}

#[derive(Debug, Clone, PartialEq)]
enum Params {
    Frequency(BTreeMap<Covariates, f64>),
    Logistic(LogisticFit),
}

/// Estimated `Pr(T=1 | W=w)`, optionally clipped to `[ρ, 1−ρ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropensityModel {
    dim: usize,
    params: Params,
    clip: Option<f64>,
    treated_share: f64,
}

pub(crate) fn check_rho(rho: f64) -> Result<f64> {
    if rho > 0.0 && rho < 0.5 {
        Ok(rho)
    } else {
        Err(Error::invalid("rho", format!("{rho} is not in (0, 0.5)")))
    }
}

pub fn fit_propensity(data: &ObservationalDataset, kind: PropensityKind, clip: Option<f64>) -> Result<PropensityModel> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let clip = clip.map(check_rho).transpose()?;
    let params = match kind {
        PropensityKind::EmpiricalFrequency => Params::Frequency(
            data.strata().into_iter().map(|(w, s)| (w, s.arm(Arm::Treated).len() as f64 / s.total() as f64)).collect(),
        ),
        PropensityKind::Logistic => Params::Logistic(logistic::fit(data)),
    };
    let counts = data.arm_counts();
    Ok(PropensityModel { dim: data.dim(), params, clip, treated_share: counts[1] as f64 / data.len() as f64 })
}

impl PropensityModel {
    pub fn kind(&self) -> PropensityKind {
        match self.params {
            Params::Frequency(_) => PropensityKind::EmpiricalFrequency,
            Params::Logistic(_) => PropensityKind::Logistic,
        }
    }

    pub fn clip(&self) -> Option<f64> {
        self.clip
    }

    pub fn logistic_fit(&self) -> Option<&LogisticFit> {
        match &self.params {
            Params::Logistic(fit) => Some(fit),
            Params::Frequency(_) => None,
        }
    }

    /// `false` only for a logistic fit that hit the iteration cap.
    pub fn converged(&self) -> bool {
        self.logistic_fit().is_none_or(|f| f.converged)
    }

    pub fn with_clip(&self, rho: f64) -> Result<Self> {
        Ok(PropensityModel { clip: Some(check_rho(rho)?), ..self.clone() })
    }

    pub fn without_clip(&self) -> Self {
        PropensityModel { clip: None, ..self.clone() }
    }

    /// The fitted score before clipping.
    pub fn raw_score(&self, w: Covariates) -> Result<f64> {
        match &self.params {
            Params::Frequency(table) => table.get(&w).copied().ok_or(Error::EmptyStratum(w)),
            Params::Logistic(fit) => Ok(fit.predict(w)),
        }
    }

    pub fn score(&self, w: Covariates) -> Result<f64> {
        let e = self.raw_score(w)?;
        Ok(match self.clip {
            Some(rho) => e.clamp(rho, 1.0 - rho),
            None => e,
        })
    }

    /// `Pr(T = arm | W = w)`; errors when it is 0 or 1.
    pub fn arm_score(&self, w: Covariates, arm: Arm) -> Result<f64> {
        let e = self.score(w)?;
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::ExtremePropensity { w, score: e });
        }
        Ok(match arm {
            Arm::Treated => e,
            Arm::Control => 1.0 - e,
        })
    }

    /// Share of treated rows in the sample the model was fitted on.
    pub fn treated_share(&self) -> f64 {
        self.treated_share
    }

    /// IPW weights `β(w, t) = Q̂(T=t) / Pr(T=t | w)`, the sample analogue of
    /// `Q(w) / Q(w | t)`.
    ///
    /// Logistic models are tabulated on every covariate value up to dimension
    /// 16; otherwise only fitted strata are tabulated and, when clipping is
    /// active, the remaining cells get the range the clip allows.
    pub fn ipw_weights(&self) -> Result<WeightFunction> {
        let share = [1.0 - self.treated_share, self.treated_share];
        let mut table = BTreeMap::new();
        let grid: Vec<Covariates> = match &self.params {
            Params::Frequency(t) => t.keys().copied().collect(),
            Params::Logistic(_) if self.dim <= ENUMERATION_LIMIT => Covariates::enumerate(self.dim).collect(),
            Params::Logistic(_) => Vec::new(),
        };
        let fitted_strata = matches!(self.params, Params::Frequency(_));
        for w in grid {
            for arm in Arm::BOTH {
                match self.arm_score(w, arm) {
                    Ok(s) => {
                        table.insert((w, arm), share[arm.index()] / s);
                    }
                    Err(e) if fitted_strata => return Err(e),
                    Err(_) => {}
                }
            }
        }
        let mut beta = WeightFunction::new(table)?;
        if let Some(rho) = self.clip {
            for arm in Arm::BOTH {
                let s = share[arm.index()];
                beta = beta.with_unseen_range(arm, s / (1.0 - rho), s / rho)?;
            }
        }
        Ok(beta)
    }
}
