use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ObservationalDataset, Row};
use crate::sim::rng_for;

/// Distribution of the latent confounder on a contaminated row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UShift {
    Fixed(f64),
    Normal { mean: f64, sd: f64 },
}

/// Contaminated rows get `y + delta · u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftRule {
    pub delta: f64,
    pub u: UShift,
}

/// Independently with probability `eta`, shifts each row's outcome by the
/// rule. Returns the new dataset and which rows were hit.
pub fn contaminate_with_flags(
    data: &ObservationalDataset,
    eta: f64,
    rule: ShiftRule,
    seed: u64,
) -> Result<(ObservationalDataset, Vec<bool>)> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid("eta", format!("{eta} is not a probability")));
    }
    let (fixed, normal) = match rule.u {
        UShift::Fixed(u) if u.is_finite() => (u, None),
        UShift::Fixed(u) => return Err(Error::invalid("u", format!("{u} is not finite"))),
        UShift::Normal { mean, sd } => {
            (0.0, Some(Normal::new(mean, sd).map_err(|e| Error::invalid("u", format!("bad normal shift: {e}")))?))
        }
    };
    let mut rng = rng_for(seed);
    let mut flags = Vec::with_capacity(data.len());
    let rows = data
        .rows()
        .iter()
        .map(|row| {
            let hit = rng.random::<f64>() < eta;
            flags.push(hit);
            if !hit {
                return *row;
            }
            let u = normal.map_or(fixed, |dist| dist.sample(&mut rng));
            Row { y: row.y + rule.delta * u, ..*row }
        })
        .collect();
    Ok((ObservationalDataset::new(data.dim(), rows)?, flags))
}

pub fn contaminate(data: &ObservationalDataset, eta: f64, rule: ShiftRule, seed: u64) -> Result<ObservationalDataset> {
    Ok(contaminate_with_flags(data, eta, rule, seed)?.0)
}
