use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Arm, Covariates, MAX_DIM};

/// One observed unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub w: Covariates,
    pub arm: Arm,
    pub y: f64,
}

/// Outcomes of one covariate stratum, split by arm.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ArmOutcomes {
    pub ys: [Vec<f64>; 2],
}

impl ArmOutcomes {
    pub fn arm(&self, arm: Arm) -> &[f64] {
        &self.ys[arm.index()]
    }

    pub fn total(&self) -> usize {
        self.ys[0].len() + self.ys[1].len()
    }
}

/// Rows grouped by covariate value, in covariate order.
pub type Strata = BTreeMap<Covariates, ArmOutcomes>;

/// A sample of `(w, t, y)` rows with binary covariates of a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationalDataset {
    dim: usize,
    rows: Vec<Row>,
}

impl ObservationalDataset {
    pub fn new(dim: usize, rows: Vec<Row>) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::TooLarge { d: dim, limit: MAX_DIM });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.w.dim() != dim {
                return Err(Error::invalid("w", format!("row {i} has {} covariates, expected {dim}", row.w.dim())));
            }
            if !row.y.is_finite() {
                return Err(Error::invalid("y", format!("row {i} has non-finite outcome {}", row.y)));
            }
        }
        Ok(ObservationalDataset { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Same covariates and treatments with every outcome replaced.
    pub fn with_outcomes(&self, ys: impl IntoIterator<Item = f64>) -> Result<Self> {
        let rows = self.rows.iter().zip(ys).map(|(r, y)| Row { y, ..*r }).collect::<Vec<_>>();
        if rows.len() != self.rows.len() {
            return Err(Error::invalid("y", "outcome count does not match row count"));
        }
        Self::new(self.dim, rows)
    }

    /// Row counts indexed by [`Arm::index`].
    pub fn arm_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for row in &self.rows {
            counts[row.arm.index()] += 1;
        }
        counts
    }

    pub fn require_both_arms(&self) -> Result<[usize; 2]> {
        let counts = self.arm_counts();
        for arm in Arm::BOTH {
            if counts[arm.index()] == 0 {
                return Err(Error::DegenerateTreatment(arm));
            }
        }
        Ok(counts)
    }

    /// Smallest and largest observed outcome.
    pub fn y_range(&self) -> Option<(f64, f64)> {
        self.rows.iter().fold(None, |acc, r| match acc {
            None => Some((r.y, r.y)),
            Some((lo, hi)) => Some((lo.min(r.y), hi.max(r.y))),
        })
    }

    pub fn strata(&self) -> Strata {
        let mut strata = Strata::new();
        for row in &self.rows {
            strata.entry(row.w).or_default().ys[row.arm.index()].push(row.y);
        }
        strata
    }

    /// Empirical covariate distribution `Q̂(w)`.
    pub fn covariate_frequencies(&self) -> BTreeMap<Covariates, f64> {
        let n = self.rows.len() as f64;
        let mut freq = BTreeMap::new();
        for row in &self.rows {
            *freq.entry(row.w).or_insert(0.0) += 1.0;
        }
        freq.values_mut().for_each(|c| *c /= n);
        freq
    }

    /// Reads the `w_0,...,w_{d-1},t,y` CSV layout.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = csv.headers()?.clone();
        let ncol = header.len();
        if ncol < 2 || &header[ncol - 2] != "t" || &header[ncol - 1] != "y" {
            return Err(Error::Parse { line: 1, message: "header must be w_0,...,w_{d-1},t,y".to_string() });
        }
        let dim = ncol - 2;
        for (j, name) in header.iter().take(dim).enumerate() {
            if name != format!("w_{j}") {
                return Err(Error::Parse { line: 1, message: format!("column {j} is `{name}`, expected `w_{j}`") });
            }
        }

        let mut rows = Vec::new();
        let mut components = vec![0u8; dim];
        for record in csv.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let parse_err = |message: String| Error::Parse { line, message };
            if record.len() != ncol {
                return Err(parse_err(format!("expected {ncol} fields, found {}", record.len())));
            }
            for (j, c) in components.iter_mut().enumerate() {
                *c = match record[j].trim() {
                    "0" => 0,
                    "1" => 1,
                    other => return Err(parse_err(format!("w_{j} = `{other}` is not 0 or 1"))),
                };
            }
            let arm = match record[dim].trim() {
                "0" => Arm::Control,
                "1" => Arm::Treated,
                other => return Err(parse_err(format!("t = `{other}` is not 0 or 1"))),
            };
            let y: f64 = record[dim + 1]
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("y = `{}` is not a number", &record[dim + 1])))?;
            if !y.is_finite() {
                return Err(parse_err(format!("y = `{}` is not finite", &record[dim + 1])));
            }
            rows.push(Row { w: Covariates::from_components(&components)?, arm, y });
        }
        Self::new(dim, rows)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.as_ref().display()))))?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn to_csv_writer<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = std::io::BufWriter::new(writer);
        let header = (0..self.dim)
            .map(|j| format!("w_{j}"))
            .chain(["t".to_string(), "y".to_string()])
            .collect::<Vec<_>>()
            .join(",");
        writeln!(out, "{header}")?;
        for row in &self.rows {
            for j in 0..self.dim {
                write!(out, "{},", row.w.get(j))?;
            }
            writeln!(out, "{},{}", row.arm.bit(), row.y)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_csv_writer(std::fs::File::create(path)?)
    }
}
