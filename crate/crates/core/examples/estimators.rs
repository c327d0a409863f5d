//! Compare the naive contrast, IPW, clipped IPW and stratification on a
//! confounded sample.
//!
//! `cargo run --example estimators`

use causal_bounds::estimators::{
    backdoor_estimate, clipped_ipw_estimate, fit_propensity, ipw_estimate, PropensityKind,
};
use causal_bounds::model::sample_ape;
use causal_bounds::sim::{generate, ScmConfig};

fn main() -> causal_bounds::Result<()> {
    let sim = generate(&ScmConfig::sec6(2.0).with_n(8000).with_seed(3))?;
    let data = &sim.data;
    let prop = fit_propensity(data, PropensityKind::Logistic, None)?;
    println!("true effect         {:.4}", sim.ace);
    println!("naive contrast      {:.4}", sample_ape(data)?.value);
    println!("ipw                 {:.4}", ipw_estimate(data, &prop)?.value);
    for rho in [0.02, 0.05, 0.1, 0.2] {
        println!("clipped ipw rho={rho:<4} {:.4}", clipped_ipw_estimate(data, &prop, rho)?.value);
    }
    let backdoor = backdoor_estimate(data)?;
    println!("backdoor            {:.4}", backdoor.value);
    println!("{}", serde_json::to_string(&backdoor).expect("estimate serializes"));
    Ok(())
}
