//! Replicated simulation studies behind the `reproduce` command.
//!
//! Every replicate draws from its own RNG stream seeded by
//! [`derive_seed`](crate::sim::derive_seed)`(base, index)`, and replicates
//! are collected in index order, so results do not depend on thread
//! scheduling.

mod fig2;
mod fig3;
mod supp_e;

pub use fig2::{
    bound_tracking, rows_csv, summarize, summary_csv, Fig2Options, Fig2Row, Fig2Summary, FIG2_NS, FIG2_PSI_MULTIPLIERS,
};
pub use fig3::{best_csv, clip_threshold_curves, curves_csv, Fig3Options, Fig3Replicate, FIG3_NS, FIG3_RHO_GRID};
pub use supp_e::{robust_table, SuppEReplicate, SuppERow, SuppETable, SUPP_E_ETAS};

use rayon::prelude::*;

use crate::error::Result;

/// Experiments the `reproduce` command knows.
pub const EXPERIMENTS: [&str; 4] = ["supp-e", "supp-e-alt", "fig2", "fig3"];

/// Runs `job(index)` for `0..count` in parallel, keeping index order.
pub(crate) fn in_parallel<T, F>(count: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..count).into_par_iter().map(job).collect()
}

pub(crate) fn min_max(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values.into_iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

pub(crate) fn write_csv<R: serde::Serialize>(rows: &[R]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
