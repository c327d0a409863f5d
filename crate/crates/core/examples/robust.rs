//! Robust IPW, the contamination penalty and the robust bound on a
//! contaminated sample.
//!
//! `cargo run --example robust`

use causal_bounds::bounds::total_bound;
use causal_bounds::estimators::{fit_propensity, ipw_estimate, PropensityKind};
use causal_bounds::robust::{
    gamma_penalty, robust_backdoor_estimate, robust_ipw_estimate, robust_total_bound, ContaminationSpec,
};
use causal_bounds::sim::{generate, ScmConfig};

fn main() -> causal_bounds::Result<()> {
    let sim = generate(&ScmConfig::supp_e(0.05).with_seed(4))?;
    let data = &sim.data;
    let spec =
        ContaminationSpec::from_json_str(r#"{"eta":0.05,"epsilon":0.01,"c4":1.0,"sigma":0.5,"big_o_const":1.0}"#)?;
    let prop = fit_propensity(data, PropensityKind::EmpiricalFrequency, None)?;

    println!("true effect      {:.4}", sim.ace);
    println!("standard ipw     {:.4}", ipw_estimate(data, &prop)?.value);
    println!("robust ipw       {:.4}", robust_ipw_estimate(data, &spec)?.value);
    println!("robust backdoor  {:.4}", robust_backdoor_estimate(data, &spec)?.value);

    let gamma = gamma_penalty(data, &spec)?;
    println!("gamma {:.4}", gamma.value);
    let beta = prop.ipw_weights()?;
    let plain = total_bound(data, &beta, 0.01, 0.95)?;
    let robust = robust_total_bound(data, &beta, &spec, 0.01, 0.95)?;
    println!("plain bound {:.4}, robust bound {:.4}", plain.total, robust.total);
    println!("{}", robust.summary());
    Ok(())
}
