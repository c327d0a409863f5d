use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Arm, Covariates, ObservationalDataset, Row, WeightFunction, MASS_TOLERANCE};

/// One support point of a [`DiscreteJoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub w: Covariates,
    pub arm: Arm,
    pub y: f64,
    pub p: f64,
}

/// Exact finite distribution over `(W, T, Y)`.
///
/// Only positive-mass cells are stored. Marginals and conditionals are exact
/// sums over the stored cells.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    dim: usize,
    cells: Vec<Cell>,
}

/// How [`induce_representation`] treats induced masses that do not sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Reject the weighting unless the masses already sum to one.
    #[default]
    Strict,
    /// Divide by the total induced mass.
    Renormalize,
}

#[derive(Serialize, Deserialize)]
struct CellRecord {
    w: Vec<u8>,
    t: u8,
    y: f64,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct JointRecord {
    cells: Vec<CellRecord>,
}

impl DiscreteJoint {
    pub fn new(dim: usize, cells: Vec<Cell>) -> Result<Self> {
        let mut total = 0.0;
        for cell in &cells {
            if cell.w.dim() != dim {
                return Err(Error::invalid("w", format!("cell has {} covariates, expected {dim}", cell.w.dim())));
            }
            if !(cell.p >= 0.0 && cell.p.is_finite()) {
                return Err(Error::InvalidRepresentation(format!(
                    "cell mass {} is not a finite nonnegative number",
                    cell.p
                )));
            }
            if !cell.y.is_finite() {
                return Err(Error::invalid("y", format!("cell outcome {} is not finite", cell.y)));
            }
            total += cell.p;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidRepresentation(format!("cell masses sum to {total}, not 1")));
        }
        let cells = cells.into_iter().filter(|c| c.p > 0.0).collect();
        Ok(DiscreteJoint { dim, cells })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn arm_mass(&self, arm: Arm) -> f64 {
        self.cells.iter().filter(|c| c.arm == arm).map(|c| c.p).sum()
    }

    /// `Q(w)`.
    pub fn covariate_mass(&self) -> BTreeMap<Covariates, f64> {
        let mut mass = BTreeMap::new();
        for c in &self.cells {
            *mass.entry(c.w).or_insert(0.0) += c.p;
        }
        mass
    }

    /// `Q(w, t)`.
    pub fn covariate_arm_mass(&self) -> BTreeMap<(Covariates, Arm), f64> {
        let mut mass = BTreeMap::new();
        for c in &self.cells {
            *mass.entry((c.w, c.arm)).or_insert(0.0) += c.p;
        }
        mass
    }

    /// `Q(w | T=t)`; empty when the arm has no mass.
    pub fn covariates_given_arm(&self, arm: Arm) -> BTreeMap<Covariates, f64> {
        let arm_mass = self.arm_mass(arm);
        if arm_mass <= 0.0 {
            return BTreeMap::new();
        }
        self.covariate_arm_mass()
            .into_iter()
            .filter(|((_, a), _)| *a == arm)
            .map(|((w, _), p)| (w, p / arm_mass))
            .collect()
    }

    /// `E[Y | T=t, W=w]` for every `(w, t)` with positive mass.
    pub fn conditional_means(&self) -> BTreeMap<(Covariates, Arm), f64> {
        let mut acc: BTreeMap<(Covariates, Arm), (f64, f64)> = BTreeMap::new();
        for c in &self.cells {
            let e = acc.entry((c.w, c.arm)).or_insert((0.0, 0.0));
            e.0 += c.p * c.y;
            e.1 += c.p;
        }
        acc.into_iter().map(|(k, (py, p))| (k, py / p)).collect()
    }

    /// `E[Y | T=t]`.
    pub fn arm_mean(&self, arm: Arm) -> Result<f64> {
        let (py, p) =
            self.cells.iter().filter(|c| c.arm == arm).fold((0.0, 0.0), |(py, p), c| (py + c.p * c.y, p + c.p));
        if p <= 0.0 {
            return Err(Error::DegenerateTreatment(arm));
        }
        Ok(py / p)
    }

    /// `Q(T=1 | W=w)`, or `None` when `w` has no mass.
    pub fn propensity(&self, w: Covariates) -> Option<f64> {
        let (treated, total) = self
            .cells
            .iter()
            .filter(|c| c.w == w)
            .fold((0.0, 0.0), |(t, n), c| (t + if c.arm == Arm::Treated { c.p } else { 0.0 }, n + c.p));
        (total > 0.0).then(|| treated / total)
    }

    /// The randomized-experiment target `P(w, t, y) = Q(w) Q(t) Q(y | t, w)`.
    ///
    /// Requires every covariate stratum to carry mass in both arms so that
    /// `Q(y | t, w)` is defined everywhere `P` puts mass.
    pub fn randomized_target(&self) -> Result<DiscreteJoint> {
        let w_mass = self.covariate_mass();
        let wt_mass = self.covariate_arm_mass();
        let arm_mass = [self.arm_mass(Arm::Control), self.arm_mass(Arm::Treated)];
        for &w in w_mass.keys() {
            for arm in Arm::BOTH {
                if arm_mass[arm.index()] > 0.0 && !wt_mass.contains_key(&(w, arm)) {
                    return Err(Error::SupportMismatch(format!("stratum w={w} has no mass in the {arm} arm")));
                }
            }
        }
        let cells = self
            .cells
            .iter()
            .map(|c| Cell { p: w_mass[&c.w] * arm_mass[c.arm.index()] * c.p / wt_mass[&(c.w, c.arm)], ..*c })
            .collect();
        DiscreteJoint::new(self.dim, cells)
    }

    /// Draws `n` i.i.d. rows by inverse-CDF sampling over the cells.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<ObservationalDataset> {
        let mut cumulative = Vec::with_capacity(self.cells.len());
        let mut acc = 0.0;
        for c in &self.cells {
            acc += c.p;
            cumulative.push(acc);
        }
        let rows = (0..n)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * acc;
                let idx = cumulative.partition_point(|&c| c <= u).min(self.cells.len() - 1);
                let c = self.cells[idx];
                Row { w: c.w, arm: c.arm, y: c.y }
            })
            .collect();
        ObservationalDataset::new(self.dim, rows)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let record: JointRecord = serde_json::from_str(text)?;
        let dim = record.cells.first().map_or(0, |c| c.w.len());
        let cells = record
            .cells
            .iter()
            .map(|c| Ok(Cell { w: Covariates::from_components(&c.w)?, arm: Arm::from_bit(c.t)?, y: c.y, p: c.p }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, cells)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let record = JointRecord {
            cells: self
                .cells
                .iter()
                .map(|c| CellRecord { w: c.w.components(), t: c.arm.bit(), y: c.y, p: c.p })
                .collect(),
        };
        Ok(serde_json::to_string(&record)?)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}

/// Reweights `q` by `beta`: the induced mass of each cell is
/// `β(w, t) · Q(w, t, y)`, which leaves `Q(y | t, w)` untouched.
pub fn induce_representation(
    q: &DiscreteJoint,
    beta: &WeightFunction,
    normalization: Normalization,
) -> Result<DiscreteJoint> {
    let mut cells = Vec::with_capacity(q.cells.len());
    let mut total = 0.0;
    for c in &q.cells {
        let b = beta.get(c.w, c.arm).ok_or(Error::MissingWeight { w: c.w, arm: c.arm })?;
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::InvalidRepresentation(format!("weight {b} at w={}, t={}", c.w, c.arm.bit())));
        }
        let p = b * c.p;
        total += p;
        cells.push(Cell { p, ..*c });
    }
    match normalization {
        Normalization::Strict if (total - 1.0).abs() > MASS_TOLERANCE => {
            return Err(Error::InvalidRepresentation(format!(
                "induced masses sum to {total}; renormalization not requested"
            )));
        }
        Normalization::Strict => {}
        Normalization::Renormalize => {
            if total <= 0.0 {
                return Err(Error::InvalidRepresentation("induced masses are all zero".to_string()));
            }
            cells.iter_mut().for_each(|c| c.p /= total);
        }
    }
    DiscreteJoint::new(q.dim, cells)
}

/// `E[Y | T=1] − E[Y | T=0]` under `dist`.
pub fn population_ape(dist: &DiscreteJoint) -> Result<f64> {
    Ok(dist.arm_mean(Arm::Treated)? - dist.arm_mean(Arm::Control)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::eight_cell;

    fn w(bit: u8) -> Covariates {
        Covariates::from_components(&[bit]).unwrap()
    }

    #[test]
    fn identity_weighting_is_a_fixed_point() {
        let q = eight_cell();
        let r = induce_representation(&q, &WeightFunction::constant(1.0), Normalization::Strict).unwrap();
        assert_eq!(r, q);
    }

    #[test]
    fn ipw_weighting_balances_covariates() {
        // Hand enumeration: Q(T=1)=0.5, Q(W=0|T=1)=0.1/0.5=0.2, Q(W=0|T=0)=0.4/0.5=0.8,
        // so β(0,1)=0.5/0.2=2.5, β(1,1)=0.5/0.8=0.625, β(0,0)=0.625, β(1,0)=2.5.
        let q = eight_cell();
        let beta = WeightFunction::ipw_from_joint(&q);
        assert!((beta.get(w(0), Arm::Treated).unwrap() - 2.5).abs() < 1e-12);
        assert!((beta.get(w(1), Arm::Treated).unwrap() - 0.625).abs() < 1e-12);
        let r = induce_representation(&q, &beta, Normalization::Strict).unwrap();
        for arm in Arm::BOTH {
            let cond = r.covariates_given_arm(arm);
            assert!((cond[&w(0)] - 0.5).abs() < 1e-12);
            assert!((cond[&w(1)] - 0.5).abs() < 1e-12);
        }
        // Causal mechanism unchanged.
        let (qm, rm) = (q.conditional_means(), r.conditional_means());
        for (k, v) in &qm {
            assert!((rm[k] - v).abs() < 1e-12);
        }
        // The T|W ratio form agrees for IPW weights: R(t|w)/Q(t|w) = β(w,t).
        for cell in r.cells() {
            let rt = r.propensity(cell.w).unwrap();
            let qt = q.propensity(cell.w).unwrap();
            let ratio = match cell.arm {
                Arm::Treated => rt / qt,
                Arm::Control => (1.0 - rt) / (1.0 - qt),
            };
            assert!((ratio - beta.get(cell.w, cell.arm).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_weight_is_invalid() {
        let q = eight_cell();
        let mut table = BTreeMap::new();
        for c in q.cells() {
            table.insert((c.w, c.arm), 1.0);
        }
        table.insert((w(0), Arm::Treated), -1.0);
        assert!(matches!(WeightFunction::new(table), Err(Error::InvalidRepresentation(_))));
    }

    #[test]
    fn missing_weight_and_strict_sum() {
        let q = eight_cell();
        let mut table = BTreeMap::new();
        table.insert((w(0), Arm::Treated), 1.0);
        let beta = WeightFunction::new(table).unwrap();
        assert!(matches!(induce_representation(&q, &beta, Normalization::Strict), Err(Error::MissingWeight { .. })));
        let doubled = WeightFunction::constant(2.0);
        assert!(matches!(
            induce_representation(&q, &doubled, Normalization::Strict),
            Err(Error::InvalidRepresentation(_))
        ));
        let r = induce_representation(&q, &doubled, Normalization::Renormalize).unwrap();
        for (a, b) in r.cells().iter().zip(q.cells()) {
            assert!((a.p - b.p).abs() < 1e-15);
        }
    }

    #[test]
    fn population_ape_by_enumeration() {
        // E[Y|T=1] = (0.1*0.4 + 0.4*0.8)/0.5 = 0.72; E[Y|T=0] = (0.4*0.1 + 0.1*0.5)/0.5 = 0.18.
        let q = eight_cell();
        assert!((population_ape(&q).unwrap() - 0.54).abs() < 1e-12);
    }

    #[test]
    fn population_ape_designed_means() {
        // E[Y|T=1]=0.7, E[Y|T=0]=0.3 by construction.
        let cells = vec![
            Cell { w: w(0), arm: Arm::Treated, y: 1.0, p: 0.35 },
            Cell { w: w(1), arm: Arm::Treated, y: 0.0, p: 0.15 },
            Cell { w: w(0), arm: Arm::Control, y: 1.0, p: 0.15 },
            Cell { w: w(1), arm: Arm::Control, y: 0.0, p: 0.35 },
        ];
        let q = DiscreteJoint::new(1, cells).unwrap();
        assert!((population_ape(&q).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn population_ape_independent_arms_is_zero() {
        let cells = vec![
            Cell { w: w(0), arm: Arm::Treated, y: 2.0, p: 0.25 },
            Cell { w: w(0), arm: Arm::Control, y: 2.0, p: 0.25 },
            Cell { w: w(1), arm: Arm::Treated, y: 2.0, p: 0.25 },
            Cell { w: w(1), arm: Arm::Control, y: 2.0, p: 0.25 },
        ];
        assert_eq!(population_ape(&DiscreteJoint::new(1, cells).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn population_ape_rejects_missing_arm() {
        let cells = vec![Cell { w: w(0), arm: Arm::Treated, y: 1.0, p: 1.0 }];
        assert!(matches!(
            population_ape(&DiscreteJoint::new(1, cells).unwrap()),
            Err(Error::DegenerateTreatment(Arm::Control))
        ));
    }

    #[test]
    fn json_layout() {
        let text = r#"{"cells":[{"w":[0,1],"t":0,"y":1.5,"p":0.25},{"w":[1,1],"t":1,"y":0.0,"p":0.75}]}"#;
        let q = DiscreteJoint::from_json_str(text).unwrap();
        assert_eq!(q.dim(), 2);
        assert_eq!(q.to_json_string().unwrap(), text);
        assert!(DiscreteJoint::from_json_str(r#"{"cells":[{"w":[0],"t":0,"y":1.0,"p":0.5}]}"#).is_err());
    }

    #[test]
    fn randomized_target_has_independent_treatment() {
        let p = eight_cell().randomized_target().unwrap();
        let pt = p.arm_mass(Arm::Treated);
        for wb in 0..2 {
            assert!((p.propensity(w(wb)).unwrap() - pt).abs() < 1e-12);
        }
    }
}
