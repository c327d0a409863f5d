use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::model::Arm;

/// A sample or population `α_t`: the `β`-weighted mean outcome of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaTerm {
    pub t_arm: u8,
    pub value: f64,
}

impl AlphaTerm {
    pub(crate) fn new(arm: Arm, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::invalid("alpha", format!("non-finite value for t={}", arm.bit())));
        }
        Ok(AlphaTerm { t_arm: arm.bit(), value })
    }
}

/// Components of the four-term bound. Infinite variance terms serialize as
/// `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub wld_t1: f64,
    pub wld_t0: f64,
    #[serde(deserialize_with = "null_as_infinity")]
    pub vr_t1: f64,
    #[serde(deserialize_with = "null_as_infinity")]
    pub vr_t0: f64,
    #[serde(deserialize_with = "null_as_infinity")]
    pub total: f64,
    pub p: f64,
    pub rho: f64,
    pub n: usize,
    /// Robust-estimation penalty folded into both variance terms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub skipped_mass_t1: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub skipped_mass_t0: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn null_as_infinity<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl BoundReport {
    pub(crate) fn from_parts(
        wld: [crate::bounds::WldEstimate; 2],
        vr: [f64; 2],
        p: f64,
        rho: f64,
        n: usize,
        gamma: Option<f64>,
    ) -> Self {
        let [wld0, wld1] = wld;
        let [vr0, vr1] = vr;
        BoundReport {
            wld_t1: wld1.value,
            wld_t0: wld0.value,
            vr_t1: vr1,
            vr_t0: vr0,
            total: wld1.value.abs() + wld0.value.abs() + vr1 + vr0,
            p,
            rho,
            n,
            gamma,
            skipped_mass_t1: wld1.skipped_mass,
            skipped_mass_t0: wld0.skipped_mass,
        }
    }

    /// Lower bound on the probability that both variance terms hold at once.
    pub fn joint_confidence(&self) -> f64 {
        (2.0 * self.p - 1.0).max(0.0)
    }

    pub fn is_bounded(&self) -> bool {
        self.total.is_finite()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Two-column human-readable table.
    pub fn summary(&self) -> String {
        let fmt = |x: f64| if x.is_finite() { format!("{x:.6}") } else { "unbounded".to_string() };
        let mut lines = vec![
            format!("{:<14}{:>14}", "component", "value"),
            format!("{:<14}{:>14}", "wld_t1", fmt(self.wld_t1)),
            format!("{:<14}{:>14}", "wld_t0", fmt(self.wld_t0)),
            format!("{:<14}{:>14}", "vr_t1", fmt(self.vr_t1)),
            format!("{:<14}{:>14}", "vr_t0", fmt(self.vr_t0)),
        ];
        if let Some(g) = self.gamma {
            lines.push(format!("{:<14}{:>14}", "gamma", fmt(g)));
        }
        lines.push(format!("{:<14}{:>14}", "total", fmt(self.total)));
        lines.push(format!(
            "p = {} per variance term (joint >= {:.4}), rho = {}, n = {}",
            self.p,
            self.joint_confidence(),
            self.rho,
            self.n
        ));
        if self.gamma.is_some() {
            lines.push("gamma carries no finite-sample probability; its O(.) constant is a calibration knob".into());
        }
        if self.skipped_mass_t1 > 0.0 || self.skipped_mass_t0 > 0.0 {
            lines.push(format!(
                "skipped unweighted strata: {:.4} of t=1 rows, {:.4} of t=0 rows",
                self.skipped_mass_t1, self.skipped_mass_t0
            ));
        }
        lines.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::WldEstimate;

    fn wld(value: f64) -> WldEstimate {
        WldEstimate { value, skipped_mass: 0.0 }
    }

    #[test]
    fn json_layout() {
        let r = BoundReport::from_parts([wld(-0.1), wld(0.2)], [0.3, 0.4], 0.95, 0.01, 100, None);
        let v: serde_json::Value = serde_json::from_str(&r.to_json_string().unwrap()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 8);
        for k in ["wld_t1", "wld_t0", "vr_t1", "vr_t0", "total", "p", "rho", "n"] {
            assert!(keys.contains(&k), "{k}");
        }
        assert!((r.total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infinity_round_trips_as_null() {
        let r = BoundReport::from_parts([wld(0.0), wld(0.0)], [f64::INFINITY, 0.4], 0.95, 0.01, 10, Some(0.1));
        let text = r.to_json_string().unwrap();
        assert!(text.contains("\"vr_t0\":null"), "{text}");
        let back: BoundReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(!back.is_bounded());
    }
}
