//! Work with an exact finite joint: the IPW representation, the randomized
//! target, and the agreement of the population estimators.
//!
//! `cargo run --example population_oracle`

use causal_bounds::bounds::population_wld;
use causal_bounds::estimators::{population_backdoor, population_ipw};
use causal_bounds::model::{
    induce_representation, population_ape, Arm, Cell, Covariates, DiscreteJoint, Normalization, WeightFunction,
};

fn main() -> causal_bounds::Result<()> {
    // One covariate, confounded treatment, binary outcome.
    let mut cells = Vec::new();
    for w in 0..2u8 {
        let e = if w == 0 { 0.2 } else { 0.8 };
        for arm in Arm::BOTH {
            let pt = if arm == Arm::Treated { e } else { 1.0 - e };
            let p_y1 = 0.1 + 0.3 * arm.bit() as f64 + 0.4 * w as f64;
            for (y, py) in [(0.0, 1.0 - p_y1), (1.0, p_y1)] {
                cells.push(Cell { w: Covariates::from_components(&[w])?, arm, y, p: 0.5 * pt * py });
            }
        }
    }
    let q = DiscreteJoint::new(1, cells)?;
    println!("observed contrast   {:.4}", population_ape(&q)?);
    println!("population ipw      {:.4}", population_ipw(&q)?);
    println!("population backdoor {:.4}", population_backdoor(&q)?);

    let beta = WeightFunction::ipw_from_joint(&q);
    let r = induce_representation(&q, &beta, Normalization::Strict)?;
    let p = q.randomized_target()?;
    println!("ape of ipw representation {:.4}", population_ape(&r)?);
    for arm in Arm::BOTH {
        let unadjusted = population_wld(&q, &p, &q, arm)?;
        let adjusted = population_wld(&r, &p, &q, arm)?;
        println!("{arm}: bias term unadjusted {unadjusted:+.4}, ipw {adjusted:+.1e}");
    }
    println!("{}", r.to_json_string()?);
    Ok(())
}
