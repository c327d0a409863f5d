//! Shared domain types: binary covariate vectors, treatment arms, observational
//! samples, exact discrete joints and weighting functions.

mod dataset;
mod joint;
mod weights;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dataset::{ArmOutcomes, ObservationalDataset, Row, Strata};
pub use joint::{induce_representation, population_ape, Cell, DiscreteJoint, Normalization};
pub use weights::WeightFunction;

/// Largest covariate dimension a packed [`Covariates`] value can hold.
pub const MAX_DIM: usize = 63;

/// Absolute tolerance for probability masses summing to one.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A binary covariate vector packed into a bitmask (component `j` is bit `j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Covariates {
    bits: u64,
    dim: u8,
}

impl Covariates {
    pub fn new(bits: u64, dim: usize) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::TooLarge { d: dim, limit: MAX_DIM });
        }
        if dim < 64 && bits >> dim != 0 {
            return Err(Error::invalid("w", format!("bitmask {bits:#b} does not fit in {dim} components")));
        }
        Ok(Covariates { bits, dim: dim as u8 })
    }

    pub fn from_components(components: &[u8]) -> Result<Self> {
        if components.len() > MAX_DIM {
            return Err(Error::TooLarge { d: components.len(), limit: MAX_DIM });
        }
        let mut bits = 0u64;
        for (j, &c) in components.iter().enumerate() {
            match c {
                0 => {}
                1 => bits |= 1 << j,
                other => return Err(Error::invalid("w", format!("component {j} is {other}, expected 0 or 1"))),
            }
        }
        Ok(Covariates { bits, dim: components.len() as u8 })
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn dim(self) -> usize {
        self.dim as usize
    }

    pub fn get(self, j: usize) -> u8 {
        ((self.bits >> j) & 1) as u8
    }

    pub fn components(self) -> Vec<u8> {
        (0..self.dim()).map(|j| self.get(j)).collect()
    }

    /// Inner product with a real coefficient vector.
    pub fn dot(self, coef: &[f64]) -> f64 {
        coef.iter().enumerate().filter(|&(j, _)| self.get(j) == 1).map(|(_, c)| c).sum()
    }

    /// Every covariate vector of the given dimension, in bitmask order.
    pub fn enumerate(dim: usize) -> impl Iterator<Item = Covariates> {
        (0..1u64 << dim).map(move |bits| Covariates { bits, dim: dim as u8 })
    }
}

impl fmt::Display for Covariates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for j in 0..self.dim() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.get(j))?;
        }
        write!(f, "]")
    }
}

/// Binary treatment arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Arm {
    Control,
    Treated,
}

impl Arm {
    pub const BOTH: [Arm; 2] = [Arm::Control, Arm::Treated];

    pub fn from_bit(t: u8) -> Result<Self> {
        match t {
            0 => Ok(Arm::Control),
            1 => Ok(Arm::Treated),
            other => Err(Error::invalid("t", format!("{other} is not a binary treatment"))),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Arm::Control => 0,
            Arm::Treated => 1,
        }
    }

    pub fn index(self) -> usize {
        self.bit() as usize
    }

    pub fn other(self) -> Arm {
        match self {
            Arm::Control => Arm::Treated,
            Arm::Treated => Arm::Control,
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arm::Control => write!(f, "control (t=0)"),
            Arm::Treated => write!(f, "treated (t=1)"),
        }
    }
}

/// A point estimate of the average effect together with the arm sizes it used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimate {
    pub estimator: String,
    pub value: f64,
    pub n_treated: usize,
    pub n_control: usize,
    #[serde(default)]
    pub clip: Option<f64>,
}

impl EffectEstimate {
    pub(crate) fn new(estimator: &str, value: f64, counts: [usize; 2], clip: Option<f64>) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::invalid("value", format!("{estimator} produced a non-finite estimate")));
        }
        Ok(EffectEstimate {
            estimator: estimator.to_string(),
            value,
            n_treated: counts[Arm::Treated.index()],
            n_control: counts[Arm::Control.index()],
            clip,
        })
    }
}

/// Difference of arm means, `mean(y | t=1) - mean(y | t=0)`.
pub fn sample_ape(data: &ObservationalDataset) -> Result<EffectEstimate> {
    let counts = data.require_both_arms()?;
    let mut sums = [0.0; 2];
    for row in data.rows() {
        sums[row.arm.index()] += row.y;
    }
    let value = sums[1] / counts[1] as f64 - sums[0] / counts[0] as f64;
    EffectEstimate::new("ape", value, counts, None)
}

/// Arithmetic mean, accumulated as offsets from the first value so constant
/// inputs come back exactly. Every estimator routes through this so that
/// reductions to the plain mean stay bit-identical.
pub(crate) fn mean(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else {
        return f64::NAN;
    };
    first + values.iter().map(|x| x - first).sum::<f64>() / values.len() as f64
}
