//! Fixtures shared by unit tests.

use rand::Rng;

use crate::model::{Arm, Cell, Covariates, DiscreteJoint};

/// Q(W=0)=Q(W=1)=0.5, Q(T=1|W=0)=0.2, Q(T=1|W=1)=0.8, Y ∈ {0,1} with
/// Q(Y=1|t,w) = 0.1 + 0.3 t + 0.4 w.
pub(crate) fn eight_cell() -> DiscreteJoint {
    let mut cells = Vec::new();
    for wb in 0..2u8 {
        let e = if wb == 0 { 0.2 } else { 0.8 };
        for t in 0..2u8 {
            let pt = if t == 1 { e } else { 1.0 - e };
            let py1 = 0.1 + 0.3 * t as f64 + 0.4 * wb as f64;
            for y in 0..2u8 {
                let py = if y == 1 { py1 } else { 1.0 - py1 };
                cells.push(Cell {
                    w: Covariates::from_components(&[wb]).unwrap(),
                    arm: Arm::from_bit(t).unwrap(),
                    y: y as f64,
                    p: 0.5 * pt * py,
                });
            }
        }
    }
    DiscreteJoint::new(1, cells).unwrap()
}

/// A random joint over `dim` binary covariates with both arms present in every
/// stratum and three outcome levels per `(w, t)`.
pub(crate) fn random_joint<R: Rng>(dim: usize, rng: &mut R) -> DiscreteJoint {
    let ws: Vec<f64> = (0..1u64 << dim).map(|_| rng.random_range(0.1..1.0)).collect();
    let wsum: f64 = ws.iter().sum();
    let mut cells = Vec::new();
    for (bits, qw) in ws.iter().enumerate() {
        let w = Covariates::new(bits as u64, dim).unwrap();
        let e = rng.random_range(0.05..0.95);
        for arm in Arm::BOTH {
            let pt = if arm == Arm::Treated { e } else { 1.0 - e };
            let ys: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..1.0)).collect();
            let ysum: f64 = ys.iter().sum();
            for (k, py) in ys.iter().enumerate() {
                cells.push(Cell { w, arm, y: rng.random_range(-2.0..3.0) + k as f64, p: qw / wsum * pt * py / ysum });
            }
        }
    }
    // Rescale so floating-point drift never trips the mass check.
    let total: f64 = cells.iter().map(|c| c.p).sum();
    cells.iter_mut().for_each(|c| c.p /= total);
    DiscreteJoint::new(dim, cells).unwrap()
}
