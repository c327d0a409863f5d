//! Effect estimators analysed by the bounds: IPW, clipped IPW and
//! stratification, plus the propensity models they rely on.

mod backdoor;
mod ipw;
pub mod logistic;
mod propensity;

pub(crate) use backdoor::stratified_effect;
pub use backdoor::{backdoor_estimate, population_backdoor};
pub(crate) use ipw::ipw_contributions;
pub use ipw::{clipped_ipw_estimate, ipw_estimate, population_ipw};
pub(crate) use propensity::check_rho;
pub use propensity::{fit_propensity, PropensityKind, PropensityModel};
