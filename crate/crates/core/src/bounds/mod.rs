//! Estimable upper bounds on the L1 error of weighted-representation
//! estimators.
//!
//! The bound splits into a bias part per arm, the weighted L1 distance (WLD)
//! between the representation and the randomized target, and a variance part
//! per arm obtained from McDiarmid's bounded-differences inequality:
//!
//! ```text
//! |h(x_R) − ACE| ≤ |WLD_1| + |WLD_0| + VR_1 + VR_0
//! ```
//!
//! Each VR term holds with probability `p` on its own; both hold jointly with
//! probability at least `2p − 1`.

mod report;
mod tune;

use crate::error::{Error, Result};
use crate::estimators::{check_rho, fit_propensity, PropensityKind};
use crate::model::{mean, Arm, DiscreteJoint, ObservationalDataset, WeightFunction};

pub use report::{AlphaTerm, BoundReport};
pub use tune::{tune_clip_threshold, TuneResult};

/// `Σ_w (R(w | t) − P(w | t)) · E_Q[Y | t, w]` computed exactly.
pub fn population_wld(r: &DiscreteJoint, p: &DiscreteJoint, q: &DiscreteJoint, arm: Arm) -> Result<f64> {
    if r.dim() != q.dim() || p.dim() != q.dim() {
        return Err(Error::SupportMismatch(format!(
            "covariate dimensions differ: r={}, p={}, q={}",
            r.dim(),
            p.dim(),
            q.dim()
        )));
    }
    let r_cond = r.covariates_given_arm(arm);
    let p_cond = p.covariates_given_arm(arm);
    let means = q.conditional_means();
    let mut value = 0.0;
    let support: std::collections::BTreeSet<_> = r_cond.keys().chain(p_cond.keys()).copied().collect();
    for w in support {
        let m = means.get(&(w, arm)).ok_or_else(|| {
            Error::SupportMismatch(format!("q has no mass at w={w} in the {arm} arm where r or p does"))
        })?;
        value += (r_cond.get(&w).unwrap_or(&0.0) - p_cond.get(&w).unwrap_or(&0.0)) * m;
    }
    Ok(value)
}

/// Sample WLD for one arm together with the share of that arm's rows whose
/// stratum had no weight and was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WldEstimate {
    pub value: f64,
    pub skipped_mass: f64,
}

fn check_p(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(Error::invalid("p", format!("confidence {p} is not in (0, 1)")))
    }
}

/// `Σ_w Q̂(w | t) (β(w, t) − β*(w, t)) m(y | w, t)` for a per-stratum
/// location estimate `m`, where `β*` is the frequency IPW weighting with
/// scores clipped to `[ρ, 1−ρ]`.
pub(crate) fn wld_with_location<F>(
    data: &ObservationalDataset,
    beta: &WeightFunction,
    rho: f64,
    arm: Arm,
    location: F,
) -> Result<WldEstimate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    check_rho(rho)?;
    let n_arm = data.arm_counts()[arm.index()];
    if n_arm == 0 {
        return Err(Error::DegenerateTreatment(arm));
    }
    let reference = fit_propensity(data, PropensityKind::EmpiricalFrequency, Some(rho))?.ipw_weights()?;
    let mut value = 0.0;
    let mut skipped_mass = 0.0;
    for (w, outcomes) in data.strata() {
        let ys = outcomes.arm(arm);
        if ys.is_empty() {
            continue;
        }
        let share = ys.len() as f64 / n_arm as f64;
        let Some(b) = beta.get(w, arm) else {
            skipped_mass += share;
            continue;
        };
        let b_ref = reference.get(w, arm).ok_or(Error::MissingWeight { w, arm })?;
        value += share * (b - b_ref) * location(ys)?;
    }
    Ok(WldEstimate { value, skipped_mass })
}

/// `Ê(Yβ | T=t) − Ê(Yβ* | T=t)`, with `β*` the frequency IPW weighting
/// clipped at `rho`.
///
/// Both sample means run over the rows of arm `t`. Strata with no entry in
/// `beta` are skipped; use [`estimate_wld_detailed`] to see the skipped share.
pub fn estimate_wld(data: &ObservationalDataset, beta: &WeightFunction, rho: f64, arm: Arm) -> Result<f64> {
    Ok(estimate_wld_detailed(data, beta, rho, arm)?.value)
}

pub fn estimate_wld_detailed(
    data: &ObservationalDataset,
    beta: &WeightFunction,
    rho: f64,
    arm: Arm,
) -> Result<WldEstimate> {
    wld_with_location(data, beta, rho, arm, |ys| Ok(mean(ys)))
}

/// Bounded-difference constant shared by every row of `arm`: the largest
/// change in `(1/N_t) Σ β_i y_i` from replacing one row by any covariate
/// value of the same arm with an outcome in the observed range.
/// `f64::INFINITY` when `beta` is unbounded on that grid.
pub fn mcdiarmid_constant(data: &ObservationalDataset, beta: &WeightFunction, arm: Arm) -> Result<f64> {
    let n_arm = data.arm_counts()[arm.index()];
    if n_arm == 0 {
        return Err(Error::DegenerateTreatment(arm));
    }
    let (y_lo, y_hi) = data.y_range().ok_or(Error::EmptyInput)?;
    let Some((b_lo, b_hi)) = beta.arm_extremes(arm, data.dim()) else {
        return Ok(f64::INFINITY);
    };
    let corners = [b_lo * y_lo, b_lo * y_hi, b_hi * y_lo, b_hi * y_hi];
    let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((hi - lo) / n_arm as f64)
}

/// McDiarmid deviation `sqrt(Σ_i c_i² · ln(1/(1−p)) / 2)` for the weighted
/// arm mean; `f64::INFINITY` flags weights unbounded on the replacement grid.
/// `p = 0` is accepted as the degenerate limit and gives 0.
pub fn mcdiarmid_vr(data: &ObservationalDataset, beta: &WeightFunction, p: f64, arm: Arm) -> Result<f64> {
    if p != 0.0 {
        check_p(p)?;
    }
    let c = mcdiarmid_constant(data, beta, arm)?;
    if c.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let n_arm = data.arm_counts()[arm.index()] as f64;
    Ok((n_arm * c * c * (1.0 / (1.0 - p)).ln() / 2.0).sqrt())
}

/// `α_t(Q̂, β) = (1/N_t) Σ_{i: t_i = t} β(w_i, t) y_i`.
pub fn sample_alpha(data: &ObservationalDataset, beta: &WeightFunction, arm: Arm) -> Result<AlphaTerm> {
    let terms = data
        .rows()
        .iter()
        .filter(|r| r.arm == arm)
        .map(|r| Ok(beta.get(r.w, arm).ok_or(Error::MissingWeight { w: r.w, arm })? * r.y))
        .collect::<Result<Vec<f64>>>()?;
    if terms.is_empty() {
        return Err(Error::DegenerateTreatment(arm));
    }
    AlphaTerm::new(arm, mean(&terms))
}

/// `α_t(Q, β) = Σ_w β(w, t) Q(w | t) E_Q[Y | t, w]`.
pub fn population_alpha(q: &DiscreteJoint, beta: &WeightFunction, arm: Arm) -> Result<AlphaTerm> {
    let cond = q.covariates_given_arm(arm);
    if cond.is_empty() {
        return Err(Error::DegenerateTreatment(arm));
    }
    let means = q.conditional_means();
    let mut value = 0.0;
    for (w, qw) in cond {
        value += beta.get(w, arm).ok_or(Error::MissingWeight { w, arm })? * qw * means[&(w, arm)];
    }
    AlphaTerm::new(arm, value)
}

/// The four-term bound for the estimator defined by `beta`.
pub fn total_bound(data: &ObservationalDataset, beta: &WeightFunction, rho: f64, p: f64) -> Result<BoundReport> {
    check_p(p)?;
    data.require_both_arms()?;
    let wld =
        [estimate_wld_detailed(data, beta, rho, Arm::Control)?, estimate_wld_detailed(data, beta, rho, Arm::Treated)?];
    let vr = [mcdiarmid_vr(data, beta, p, Arm::Control)?, mcdiarmid_vr(data, beta, p, Arm::Treated)?];
    Ok(BoundReport::from_parts(wld, vr, p, rho, data.len(), None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::ipw_estimate;
    use crate::model::{induce_representation, population_ape, Covariates, Normalization, Row};
    use crate::sim::{generate, population_joint, ScmConfig};
    use crate::testutil::{eight_cell, random_joint};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn wld_vanishes_for_identical_conditionals() {
        let q = eight_cell();
        for arm in Arm::BOTH {
            assert_eq!(population_wld(&q, &q, &q, arm).unwrap(), 0.0);
        }
    }

    #[test]
    fn ipw_representation_has_zero_wld() {
        let q = eight_cell();
        let r = induce_representation(&q, &WeightFunction::ipw_from_joint(&q), Normalization::Strict).unwrap();
        let p = q.randomized_target().unwrap();
        for arm in Arm::BOTH {
            assert!(population_wld(&r, &p, &q, arm).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn unadjusted_wld_on_eight_cells() {
        // Q(w=0|1)=0.2, Q(w=1|1)=0.8, target 0.5/0.5, E[Y|1,w]=0.4, 0.8:
        //   WLD_1 = (0.2−0.5)·0.4 + (0.8−0.5)·0.8 = 0.12.
        // Q(w=0|0)=0.8, Q(w=1|0)=0.2, E[Y|0,w]=0.1, 0.5:
        //   WLD_0 = (0.8−0.5)·0.1 + (0.2−0.5)·0.5 = −0.12.
        // APE − ACE = 0.54 − 0.3 = WLD_1 − WLD_0.
        let q = eight_cell();
        let p = q.randomized_target().unwrap();
        let w1 = population_wld(&q, &p, &q, Arm::Treated).unwrap();
        let w0 = population_wld(&q, &p, &q, Arm::Control).unwrap();
        assert!((w1 - 0.12).abs() < 1e-12);
        assert!((w0 + 0.12).abs() < 1e-12);
    }

    #[test]
    fn wld_requires_shared_support() {
        let q = eight_cell();
        let cells =
            q.cells().iter().filter(|c| !(c.arm == Arm::Treated && c.w.bits() == 1)).copied().collect::<Vec<_>>();
        let total: f64 = cells.iter().map(|c| c.p).sum();
        let thin =
            DiscreteJoint::new(1, cells.into_iter().map(|c| crate::model::Cell { p: c.p / total, ..c }).collect())
                .unwrap();
        assert!(matches!(population_wld(&q, &q, &thin, Arm::Treated), Err(Error::SupportMismatch(_))));
    }

    #[test]
    fn representation_gap_equals_wld_difference() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..10 {
            let q = random_joint(2, &mut rng);
            let p = q.randomized_target().unwrap();
            let gap = population_ape(&q).unwrap() - population_ape(&p).unwrap();
            let wld =
                population_wld(&q, &p, &q, Arm::Treated).unwrap() - population_wld(&q, &p, &q, Arm::Control).unwrap();
            assert!((gap - wld).abs() < 1e-12);
        }
    }

    fn small_data() -> ObservationalDataset {
        let spec = [(0u8, 1u8, 3.0), (0, 0, 1.0), (0, 0, 4.0), (1, 1, 5.0), (1, 0, 2.0), (1, 1, 7.0), (1, 1, -1.0)];
        let rows = spec
            .iter()
            .map(|&(w, t, y)| Row { w: Covariates::from_components(&[w]).unwrap(), arm: Arm::from_bit(t).unwrap(), y })
            .collect();
        ObservationalDataset::new(1, rows).unwrap()
    }

    #[test]
    fn wld_is_zero_for_the_reference_weights() {
        let data = small_data();
        let reference =
            fit_propensity(&data, PropensityKind::EmpiricalFrequency, Some(0.05)).unwrap().ipw_weights().unwrap();
        for arm in Arm::BOTH {
            assert_eq!(estimate_wld(&data, &reference, 0.05, arm).unwrap(), 0.0);
        }
    }

    #[test]
    fn stratum_form_matches_row_means() {
        let data = small_data();
        let beta = WeightFunction::constant(1.3);
        let reference =
            fit_propensity(&data, PropensityKind::EmpiricalFrequency, Some(0.05)).unwrap().ipw_weights().unwrap();
        for arm in Arm::BOTH {
            let direct =
                sample_alpha(&data, &beta, arm).unwrap().value - sample_alpha(&data, &reference, arm).unwrap().value;
            assert!((estimate_wld(&data, &beta, 0.05, arm).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn unweighted_wld_tracks_population() {
        // Monte Carlo oracle: the row-mean estimator at n = 10⁴ against exact
        // enumeration. Its spread across seeds sets the tolerance.
        let config = ScmConfig::sec6(2.0).with_n(10_000);
        let q = population_joint(&config, None).unwrap();
        let p = q.randomized_target().unwrap();
        let truth = population_wld(&q, &p, &q, Arm::Treated).unwrap();
        let draws: Vec<f64> = (0..8)
            .map(|s| {
                let data = generate(&config.clone().with_seed(100 + s)).unwrap().data;
                estimate_wld(&data, &WeightFunction::constant(1.0), 0.01, Arm::Treated).unwrap()
            })
            .collect();
        let m = mean(&draws);
        let sd = (draws.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (draws.len() - 1) as f64).sqrt();
        assert!(truth.abs() > 0.01, "generator should be confounded");
        assert!((m - truth).abs() < 3.0 * sd / (draws.len() as f64).sqrt() + 1e-3, "{m} vs {truth} (sd {sd})");
    }

    #[test]
    fn constant_weight_closed_form() {
        let data = small_data();
        let k = 1.7;
        let p = 0.9;
        for arm in Arm::BOTH {
            let n = data.arm_counts()[arm.index()] as f64;
            let expected = k * (7.0 - (-1.0)) * ((1.0f64 / (1.0 - p)).ln() / (2.0 * n)).sqrt();
            let got = mcdiarmid_vr(&data, &WeightFunction::constant(k), p, arm).unwrap();
            assert!((got - expected).abs() < 1e-12);
        }
        assert!(mcdiarmid_vr(&data, &WeightFunction::constant(k), 1e-300, Arm::Treated).unwrap() < 1e-140);
        assert_eq!(mcdiarmid_vr(&data, &WeightFunction::constant(k), 0.0, Arm::Treated).unwrap(), 0.0);
        assert!(mcdiarmid_vr(&data, &WeightFunction::constant(k), 1.0, Arm::Treated).is_err());
    }

    #[test]
    fn unbounded_weights_are_flagged() {
        let data = small_data();
        let mut table = std::collections::BTreeMap::new();
        table.insert((Covariates::from_components(&[0]).unwrap(), Arm::Treated), 1.0);
        let beta = WeightFunction::new(table).unwrap();
        assert_eq!(mcdiarmid_vr(&data, &beta, 0.95, Arm::Treated).unwrap(), f64::INFINITY);
    }

    #[test]
    fn report_decomposes() {
        let data = small_data();
        let prop = fit_propensity(&data, PropensityKind::EmpiricalFrequency, None).unwrap();
        let report = total_bound(&data, &prop.ipw_weights().unwrap(), 0.05, 0.95).unwrap();
        let sum = report.wld_t1.abs() + report.wld_t0.abs() + report.vr_t1 + report.vr_t0;
        assert!((report.total - sum).abs() < 1e-12);
        // Unclipped frequency weights coincide with the reference: no bias term.
        assert_eq!(report.wld_t1, 0.0);
        assert_eq!(report.wld_t0, 0.0);
        let estimate = ipw_estimate(&data, &prop).unwrap().value;
        let alpha = sample_alpha(&data, &prop.ipw_weights().unwrap(), Arm::Treated).unwrap().value
            - sample_alpha(&data, &prop.ipw_weights().unwrap(), Arm::Control).unwrap().value;
        assert!((estimate - alpha).abs() < 1e-12);
    }

    #[test]
    fn population_alpha_of_ipw_is_the_randomized_arm_mean() {
        let q = eight_cell();
        let beta = WeightFunction::ipw_from_joint(&q);
        let p = q.randomized_target().unwrap();
        for arm in Arm::BOTH {
            let a = population_alpha(&q, &beta, arm).unwrap().value;
            assert!((a - p.arm_mean(arm).unwrap()).abs() < 1e-12);
        }
    }
}
