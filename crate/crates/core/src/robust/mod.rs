//! Estimation under Huber contamination of the outcome.
//!
//! A fraction `eta` of rows has its outcome drawn from a distribution shifted
//! by an unobserved confounder. Conditional means are estimated with a
//! one-dimensional robust mean, and the bound gains a penalty `gamma` for the
//! residual error of that estimator.

mod contamination;
mod estimate;
mod mean;

pub use contamination::{contaminate, contaminate_with_flags, ShiftRule, UShift};
pub use estimate::{
    gamma_penalty, ipw_worst_case_bias, robust_backdoor_estimate, robust_ipw_estimate, robust_ipw_with_propensity,
    robust_total_bound, ContaminationSpec, GammaPenalty,
};
pub use mean::robust_mean_1d;
