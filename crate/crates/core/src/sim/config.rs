use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MAX_DIM;

/// Outcome equation of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YMode {
    /// `y ~ Bernoulli(sigmoid(ν·w + τu + λt))`
    BernoulliSigmoid,
    /// `y = ν·w + λt + δ·u·c + noise`, with `c ~ Bernoulli(η)` marking
    /// contaminated rows.
    LinearGaussian,
}

/// Parameters of the structural equations
///
/// ```text
/// w_j ~ Bernoulli(w_p)            u ~ Normal(mu_u, sigma_u)
/// t   ~ Bernoulli(sigmoid(ψ·w + κu))
/// ```
///
/// followed by the outcome equation selected by `y_mode`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScmConfig {
    pub n: usize,
    pub d: usize,
    pub w_p: f64,
    pub psi: Vec<f64>,
    pub nu: Vec<f64>,
    pub lambda_t: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub mu_u: f64,
    #[serde(default = "one")]
    pub sigma_u: f64,
    pub y_mode: YMode,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

/// Direction of the W→T coefficients in the `sec6` preset; `psi` is this
/// vector times a confounding multiplier.
pub const SEC6_PSI_DIRECTION: [f64; 5] = [1.0, -0.75, 0.5, -0.5, 0.25];
pub const SEC6_NU: [f64; 5] = [0.5, -0.4, 0.3, 0.2, -0.1];

/// `logit(0.01)`: the clip-tuning preset keeps every true propensity in
/// `[0.01, 0.99]`.
const LOGIT_001: f64 = -4.595_119_850_134_589;

pub const PRESETS: [&str; 4] = ["sec6", "supp-e", "supp-e-alt", "clip-tune"];

impl ScmConfig {
    /// Binary outcome, `|W| = 5`, `w_p = 0.5`, no unobserved confounding.
    pub fn sec6(psi_multiplier: f64) -> Self {
        ScmConfig {
            n: 2000,
            d: 5,
            w_p: 0.5,
            psi: SEC6_PSI_DIRECTION.iter().map(|c| c * psi_multiplier).collect(),
            nu: SEC6_NU.to_vec(),
            lambda_t: 1.0,
            kappa: 0.0,
            tau: 0.0,
            delta: 0.0,
            mu_u: 0.0,
            sigma_u: 1.0,
            y_mode: YMode::BernoulliSigmoid,
            noise_sigma: 0.0,
            eta: 0.0,
            seed: 0,
        }
    }

    /// Continuous outcome with Huber-contaminated rows: `n = 10000`,
    /// `w ~ Bernoulli(0.7)`, `u ~ N(5, 1)`, `t ~ Bernoulli(sigmoid(0.01 u))`,
    /// `y = 0.3 w + t + 10 u c + N(0, 0.5)`. The true effect is 1.
    pub fn supp_e(eta: f64) -> Self {
        ScmConfig {
            n: 10_000,
            d: 1,
            w_p: 0.7,
            psi: vec![0.0],
            nu: vec![0.3],
            lambda_t: 1.0,
            kappa: 0.01,
            tau: 0.0,
            delta: 10.0,
            mu_u: 5.0,
            sigma_u: 1.0,
            y_mode: YMode::LinearGaussian,
            noise_sigma: 0.5,
            eta,
            seed: 0,
        }
    }

    /// Variant with a weak U→Y shift: `δ = 0.2`, `u ~ N(0.1, 1)`, and
    /// treatment independent of `u`.
    pub fn supp_e_alt(eta: f64) -> Self {
        ScmConfig { kappa: 0.0, delta: 0.2, mu_u: 0.1, ..Self::supp_e(eta) }
    }

    /// Two covariates whose true propensities are 0.5, 0.01, 0.99 and 0.5,
    /// used to study the clipping threshold.
    pub fn clip_tune() -> Self {
        ScmConfig {
            n: 1000,
            d: 2,
            w_p: 0.5,
            psi: vec![LOGIT_001, -LOGIT_001],
            nu: vec![1.0, -1.0],
            lambda_t: 1.0,
            ..Self::sec6(0.0)
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "sec6" => Ok(Self::sec6(1.0)),
            "supp-e" => Ok(Self::supp_e(0.0)),
            "supp-e-alt" => Ok(Self::supp_e_alt(0.0)),
            "clip-tune" => Ok(Self::clip_tune()),
            other => Err(Error::invalid("preset", format!("unknown preset `{other}`; expected one of {PRESETS:?}"))),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::invalid("n", "sample count must be at least 1"));
        }
        if self.d < 1 || self.d > MAX_DIM {
            return Err(Error::invalid("d", format!("covariate dimension {} is not in [1, {MAX_DIM}]", self.d)));
        }
        if !(self.w_p > 0.0 && self.w_p < 1.0) {
            return Err(Error::invalid("w_p", format!("{} is not in (0, 1)", self.w_p)));
        }
        for (field, v) in [("psi", &self.psi), ("nu", &self.nu)] {
            if v.len() != self.d {
                return Err(Error::invalid(field, format!("has {} entries, expected d = {}", v.len(), self.d)));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid(field, "coefficients must be finite"));
            }
        }
        for (field, v) in [
            ("lambda_t", self.lambda_t),
            ("kappa", self.kappa),
            ("tau", self.tau),
            ("delta", self.delta),
            ("mu_u", self.mu_u),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(field, format!("{v} is not finite")));
            }
        }
        if !(self.sigma_u >= 0.0 && self.sigma_u.is_finite()) {
            return Err(Error::invalid("sigma_u", format!("{} must be finite and >= 0", self.sigma_u)));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid("noise_sigma", format!("{} must be finite and >= 0", self.noise_sigma)));
        }
        if !(0.0..0.5).contains(&self.eta) {
            return Err(Error::invalid("eta", format!("contamination fraction {} is not in [0, 0.5)", self.eta)));
        }
        if self.y_mode == YMode::BernoulliSigmoid && self.eta != 0.0 {
            return Err(Error::invalid("eta", "contamination applies to the linear-gaussian outcome only"));
        }
        Ok(())
    }

    /// Parses a config document. A `"preset"` key selects a named preset
    /// whose fields the remaining keys override.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        let obj = value.as_object_mut().ok_or_else(|| Error::invalid("config", "expected a JSON object"))?;
        let config: ScmConfig = match obj.remove("preset") {
            Some(serde_json::Value::String(name)) => {
                let mut base = serde_json::to_value(Self::preset(&name)?)?;
                let base_obj = base.as_object_mut().expect("config serializes to an object");
                for (k, v) in std::mem::take(obj) {
                    if !base_obj.contains_key(&k) {
                        return Err(Error::invalid("config", format!("unknown field `{k}`")));
                    }
                    base_obj.insert(k, v);
                }
                serde_json::from_value(base)?
            }
            Some(_) => return Err(Error::invalid("preset", "must be a string")),
            None => serde_json::from_str(text)?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        Self::from_json_str(&text)
    }
}
