use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Arm, Covariates, DiscreteJoint};

/// A weighting `β(w, t) ≥ 0` that turns the source distribution into a
/// representation `R(w | t) = β(w, t) Q(w | t)`.
///
/// Cells absent from the table may carry a known range per arm; a degenerate
/// range (`lo == hi`) acts as a default weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    table: BTreeMap<(Covariates, Arm), f64>,
    unseen: [Option<(f64, f64)>; 2],
}

fn check_weight(value: f64, what: impl FnOnce() -> String) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidRepresentation(format!("weight {value} at {}", what())))
    }
}

impl WeightFunction {
    pub fn new(table: BTreeMap<(Covariates, Arm), f64>) -> Result<Self> {
        for (&(w, arm), &b) in &table {
            check_weight(b, || format!("w={w}, t={}", arm.bit()))?;
        }
        Ok(WeightFunction { table, unseen: [None, None] })
    }

    /// `β ≡ k` on every cell.
    pub fn constant(k: f64) -> Self {
        assert!(k >= 0.0 && k.is_finite(), "constant weight must be finite and nonnegative");
        WeightFunction { table: BTreeMap::new(), unseen: [Some((k, k)); 2] }
    }

    /// Declares the range weights may take on cells of `arm` missing from the table.
    pub fn with_unseen_range(mut self, arm: Arm, lo: f64, hi: f64) -> Result<Self> {
        check_weight(lo, || format!("unseen lower bound, t={}", arm.bit()))?;
        check_weight(hi, || format!("unseen upper bound, t={}", arm.bit()))?;
        if lo > hi {
            return Err(Error::invalid("beta", format!("empty range [{lo}, {hi}]")));
        }
        self.unseen[arm.index()] = Some((lo, hi));
        Ok(self)
    }

    /// The IPW weighting of an exact joint, `β(w, t) = Q(w) / Q(w | t)`.
    pub fn ipw_from_joint(q: &DiscreteJoint) -> Self {
        let w_mass = q.covariate_mass();
        let arm_mass = [q.arm_mass(Arm::Control), q.arm_mass(Arm::Treated)];
        let table = q
            .covariate_arm_mass()
            .into_iter()
            .map(|((w, arm), p)| ((w, arm), w_mass[&w] / (p / arm_mass[arm.index()])))
            .collect();
        WeightFunction { table, unseen: [None, None] }
    }

    pub fn get(&self, w: Covariates, arm: Arm) -> Option<f64> {
        match self.table.get(&(w, arm)) {
            Some(&b) => Some(b),
            None => match self.unseen[arm.index()] {
                Some((lo, hi)) if lo == hi => Some(lo),
                _ => None,
            },
        }
    }

    pub fn table(&self) -> &BTreeMap<(Covariates, Arm), f64> {
        &self.table
    }

    /// Smallest and largest weight `arm` can take over all `2^dim` covariate
    /// values, or `None` when some value has no entry and no declared range.
    pub fn arm_extremes(&self, arm: Arm, dim: usize) -> Option<(f64, f64)> {
        let mut covered = 0u128;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (&(w, a), &b) in &self.table {
            if a == arm && w.dim() == dim {
                covered += 1;
                lo = lo.min(b);
                hi = hi.max(b);
            }
        }
        if covered < 1u128 << dim {
            let (ulo, uhi) = self.unseen[arm.index()]?;
            lo = lo.min(ulo);
            hi = hi.max(uhi);
        }
        Some((lo, hi))
    }
}
