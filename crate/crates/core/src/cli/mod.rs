//! The `cb` command line: simulate, estimate, bound, tune-clip, reproduce.
//!
//! Every flag can also be set through an environment variable prefixed
//! `CB_`; flags win. `--out` names a directory: commands that write files put
//! them there beside a `manifest.json` listing every artifact. Without
//! `--out`, `estimate`, `bound` and `tune-clip` print to stdout.
//!
//! Exit codes: 0 success, 1 other failure, 2 data or usage error,
//! 3 degenerate strata, 4 extreme propensity. Failures are reported on
//! stderr as `{"error":{"kind":...,"code":...,"message":...}}`.

mod manifest;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{total_bound, tune_clip_threshold};
use crate::error::{Error, Result};
use crate::estimators::{backdoor_estimate, fit_propensity, ipw_estimate, PropensityKind};
use crate::experiments::{self, write_csv, Fig2Options, Fig3Options, SUPP_E_ETAS};
use crate::model::{sample_ape, ObservationalDataset, WeightFunction};
use crate::robust::{robust_backdoor_estimate, robust_ipw_with_propensity, robust_total_bound, ContaminationSpec};
use crate::sim::{generate, ScmConfig};

pub use manifest::{RunManifest, MANIFEST_FILE};

#[derive(Debug, Parser)]
#[command(name = "cb", version, about = "Causal effect estimates with estimable L1 error bounds")]
pub struct Cli {
    /// Base seed for simulation and replicated experiments.
    #[arg(long, global = true, env = "CB_SEED")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "CB_OUT")]
    out: Option<PathBuf>,
    /// Format of printed and written results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json, env = "CB_FORMAT")]
    format: Format,
    /// Timestamp recorded in the manifest; omitted by default so reruns are
    /// byte-identical.
    #[arg(long, global = true, env = "CB_TIMESTAMP")]
    timestamp: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a dataset and its ground-truth effect from a generator config.
    Simulate(SimulateArgs),
    /// Estimate the average effect on a dataset.
    Estimate(EstimateArgs),
    /// Compute the four-term error bound for a weighting of a dataset.
    Bound(BoundArgs),
    /// Pick the clipping threshold that minimizes the bound.
    TuneClip(TuneArgs),
    /// Re-run a replicated study and write its tables.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Generator config (JSON). May name a preset with `"preset"`.
    #[arg(long, env = "CB_CONFIG", required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset: sec6, supp-e, supp-e-alt, clip-tune.
    #[arg(long, env = "CB_PRESET")]
    preset: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimatorChoice {
    Ape,
    Ipw,
    ClippedIpw,
    Backdoor,
    RobustIpw,
    RobustBackdoor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PropensityChoice {
    Frequency,
    Logistic,
}

impl From<PropensityChoice> for PropensityKind {
    fn from(c: PropensityChoice) -> Self {
        match c {
            PropensityChoice::Frequency => PropensityKind::EmpiricalFrequency,
            PropensityChoice::Logistic => PropensityKind::Logistic,
        }
    }
}

#[derive(Debug, Args)]
struct ContaminationArgs {
    /// Contaminated fraction of rows.
    #[arg(long, env = "CB_ETA")]
    eta: Option<f64>,
    /// Slack of the robust mean window.
    #[arg(long, env = "CB_EPSILON", default_value_t = 0.01)]
    epsilon: f64,
    /// Outcome standard deviation bound.
    #[arg(long, env = "CB_SIGMA", default_value_t = 1.0)]
    sigma: f64,
    /// Fourth-moment constant.
    #[arg(long, env = "CB_C4", default_value_t = 1.0)]
    c4: f64,
    /// Constant of the robust-mean error rate.
    #[arg(long, env = "CB_BIG_O_CONST", default_value_t = 1.0)]
    big_o_const: f64,
    /// Contamination spec file (JSON); overrides the flags above.
    #[arg(long, env = "CB_CONTAMINATION")]
    contamination: Option<PathBuf>,
}

impl ContaminationArgs {
    fn spec(&self) -> Result<Option<ContaminationSpec>> {
        if let Some(path) = &self.contamination {
            return Ok(Some(ContaminationSpec::read_json(path)?));
        }
        let Some(eta) = self.eta else { return Ok(None) };
        let spec = ContaminationSpec {
            eta,
            epsilon: self.epsilon,
            c4: self.c4,
            sigma: self.sigma,
            big_o_const: self.big_o_const,
        };
        spec.validate()?;
        Ok(Some(spec))
    }
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Dataset CSV with header `w_0,...,w_{d-1},t,y`.
    #[arg(long, env = "CB_DATA")]
    data: PathBuf,
    #[arg(long, value_enum, env = "CB_ESTIMATOR")]
    estimator: EstimatorChoice,
    /// Propensity model for the IPW estimators.
    #[arg(long, value_enum, default_value_t = PropensityChoice::Frequency, env = "CB_PROPENSITY")]
    propensity: PropensityChoice,
    /// Clipping threshold; required by clipped-ipw.
    #[arg(long, env = "CB_RHO", required_if_eq("estimator", "clipped-ipw"))]
    rho: Option<f64>,
    #[command(flatten)]
    contamination: ContaminationArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BetaSource {
    /// IPW weights from the fitted propensity.
    Ipw,
    /// IPW weights from the propensity clipped at `--clip`.
    ClippedIpw,
    /// No adjustment, `β ≡ 1`.
    Uniform,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, env = "CB_DATA")]
    data: PathBuf,
    #[arg(long, value_enum, default_value_t = BetaSource::Ipw, env = "CB_BETA")]
    beta: BetaSource,
    #[arg(long, value_enum, default_value_t = PropensityChoice::Frequency, env = "CB_PROPENSITY")]
    propensity: PropensityChoice,
    /// Clipping threshold of the weighting; required by clipped-ipw.
    #[arg(long, env = "CB_CLIP", required_if_eq("beta", "clipped-ipw"))]
    clip: Option<f64>,
    /// Overlap level: the bias reference clips scores to `[rho, 1−rho]`.
    #[arg(long, env = "CB_RHO", default_value_t = 0.01)]
    rho: f64,
    /// Confidence of each variance term.
    #[arg(long, env = "CB_P", default_value_t = 0.95)]
    p: f64,
    /// Setting `--eta` (or `--contamination`) switches to the robust bound.
    #[command(flatten)]
    contamination: ContaminationArgs,
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[arg(long, env = "CB_DATA")]
    data: PathBuf,
    /// Candidate thresholds, comma separated.
    #[arg(long, env = "CB_RHOS", value_delimiter = ',', default_values_t = experiments::FIG3_RHO_GRID.to_vec())]
    rhos: Vec<f64>,
    #[arg(long, env = "CB_P", default_value_t = 0.95)]
    p: f64,
    /// Overlap level assumed for the bias reference.
    #[arg(long, env = "CB_REFERENCE_RHO", default_value_t = 0.01)]
    reference_rho: f64,
    #[arg(long, value_enum, default_value_t = PropensityChoice::Frequency, env = "CB_PROPENSITY")]
    propensity: PropensityChoice,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    /// supp-e, supp-e-alt, fig2 or fig3.
    table: String,
    /// Replicates per grid point (defaults: 10 for supp-e and fig3, 20 for fig2).
    #[arg(long, env = "CB_SEEDS")]
    seeds: Option<usize>,
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_)
        | Error::Invalid { .. }
        | Error::EmptyInput => 2,
        Error::DegenerateTreatment(_)
        | Error::EmptyStratum(_)
        | Error::EmptyArmInStratum { .. }
        | Error::SupportMismatch(_) => 3,
        Error::ExtremePropensity { .. } => 4,
        Error::MissingWeight { .. }
        | Error::InvalidRepresentation(_)
        | Error::TooLarge { .. }
        | Error::UnsupportedMode(_) => 1,
    }
}

fn error_kind(code: i32) -> &'static str {
    match code {
        2 => "data",
        3 => "degenerate-strata",
        4 => "extreme-propensity",
        _ => "failure",
    }
}

/// `{"error":{"kind":...,"code":...,"message":...}}`.
pub fn error_json(err: &Error) -> String {
    let code = exit_code(err);
    serde_json::json!({ "error": { "kind": error_kind(code), "code": code, "message": err.to_string() } }).to_string()
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{}", error_json(&err));
            exit_code(&err)
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(args) => simulate(cli, args),
        Command::Estimate(args) => estimate(cli, args),
        Command::Bound(args) => bound(cli, args),
        Command::TuneClip(args) => tune(cli, args),
        Command::Reproduce(args) => reproduce(cli, args),
    }
}

fn require_out(cli: &Cli) -> Result<&Path> {
    cli.out.as_deref().ok_or_else(|| Error::invalid("out", "this command writes files; pass --out DIR"))
}

/// Writes `files` into `--out` with a manifest, or prints the first one.
fn emit(cli: &Cli, command: &str, inputs: Vec<String>, seeds: Vec<u64>, files: Vec<(String, String)>) -> Result<()> {
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for (name, body) in &files {
                fs::write(dir.join(name), body)?;
            }
            let manifest = RunManifest::new(
                command,
                inputs,
                seeds,
                files.iter().map(|f| f.0.clone()).collect(),
                cli.timestamp.clone(),
            );
            manifest.write(dir)
        }
        None => {
            for (_, body) in &files {
                print!("{body}");
                if !body.ends_with('\n') {
                    println!();
                }
            }
            Ok(())
        }
    }
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> Result<()> {
    require_out(cli)?;
    let (mut config, input) = match (&args.config, &args.preset) {
        (Some(path), _) => (ScmConfig::read_json(path)?, path_string(path)),
        (None, Some(name)) => (ScmConfig::preset(name)?, format!("preset:{name}")),
        (None, None) => return Err(Error::invalid("config", "pass --config or --preset")),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let sim = generate(&config)?;
    let mut csv = Vec::new();
    sim.data.to_csv_writer(&mut csv)?;
    let files = vec![
        ("data.csv".to_string(), String::from_utf8(csv).expect("csv output is utf-8")),
        ("ground_truth.json".to_string(), sim.ground_truth_json()?),
        ("config.json".to_string(), serde_json::to_string_pretty(&config)?),
    ];
    emit(cli, "simulate", vec![input], vec![config.seed], files)
}

fn read_data(path: &Path) -> Result<ObservationalDataset> {
    ObservationalDataset::read_csv(path)
}

fn estimate(cli: &Cli, args: &EstimateArgs) -> Result<()> {
    let data = read_data(&args.data)?;
    let kind = PropensityKind::from(args.propensity);
    let spec = args.contamination.spec()?;
    let robust_spec = || spec.ok_or_else(|| Error::invalid("eta", "robust estimators need --eta or --contamination"));
    let result = match args.estimator {
        EstimatorChoice::Ape => sample_ape(&data)?,
        EstimatorChoice::Backdoor => backdoor_estimate(&data)?,
        EstimatorChoice::Ipw => ipw_estimate(&data, &fit_propensity(&data, kind, None)?)?,
        EstimatorChoice::ClippedIpw => {
            let rho = args.rho.ok_or_else(|| Error::invalid("rho", "clipped-ipw needs --rho"))?;
            ipw_estimate(&data, &fit_propensity(&data, kind, Some(rho))?)?
        }
        EstimatorChoice::RobustIpw => {
            robust_ipw_with_propensity(&data, &fit_propensity(&data, kind, args.rho)?, &robust_spec()?)?
        }
        EstimatorChoice::RobustBackdoor => robust_backdoor_estimate(&data, &robust_spec()?)?,
    };
    let (name, body) = match cli.format {
        Format::Json => ("estimate.json", serde_json::to_string(&result)?),
        Format::Csv => ("estimate.csv", write_csv(std::slice::from_ref(&result))?),
    };
    emit(cli, "estimate", vec![path_string(&args.data)], vec![], vec![(name.into(), body)])
}

fn bound(cli: &Cli, args: &BoundArgs) -> Result<()> {
    let data = read_data(&args.data)?;
    let kind = PropensityKind::from(args.propensity);
    let beta = match args.beta {
        BetaSource::Ipw => fit_propensity(&data, kind, None)?.ipw_weights()?,
        BetaSource::ClippedIpw => {
            let clip = args.clip.ok_or_else(|| Error::invalid("clip", "clipped-ipw needs --clip"))?;
            fit_propensity(&data, kind, Some(clip))?.ipw_weights()?
        }
        BetaSource::Uniform => WeightFunction::constant(1.0),
    };
    let report = match args.contamination.spec()? {
        Some(spec) => robust_total_bound(&data, &beta, &spec, args.rho, args.p)?,
        None => total_bound(&data, &beta, args.rho, args.p)?,
    };
    eprintln!("{}", report.summary());
    let (name, body) = match cli.format {
        Format::Json => ("bound.json", report.to_json_string()?),
        Format::Csv => ("bound.csv", write_csv(std::slice::from_ref(&report))?),
    };
    emit(cli, "bound", vec![path_string(&args.data)], vec![], vec![(name.into(), body)])
}

fn tune(cli: &Cli, args: &TuneArgs) -> Result<()> {
    let data = read_data(&args.data)?;
    let prop = fit_propensity(&data, args.propensity.into(), None)?;
    let result = tune_clip_threshold(&data, &prop, &args.rhos, args.p, args.reference_rho)?;
    let files = match (cli.format, &cli.out) {
        (_, Some(_)) => vec![
            ("tune.csv".to_string(), result.to_csv()),
            ("best_rho.json".to_string(), result.best_json()?),
            ("reports.json".to_string(), serde_json::to_string(&result.reports)?),
        ],
        (Format::Csv, None) => vec![("tune.csv".to_string(), result.to_csv())],
        (Format::Json, None) => vec![(
            "tune.json".to_string(),
            serde_json::to_string(&serde_json::json!({ "best_rho": result.best_rho, "reports": result.reports }))?,
        )],
    };
    emit(cli, "tune-clip", vec![path_string(&args.data)], vec![], files)
}

fn reproduce(cli: &Cli, args: &ReproduceArgs) -> Result<()> {
    require_out(cli)?;
    let base = cli.seed.unwrap_or(0);
    let files = match args.table.as_str() {
        "supp-e" | "supp-e-alt" => {
            let preset: fn(f64) -> ScmConfig =
                if args.table == "supp-e" { ScmConfig::supp_e } else { ScmConfig::supp_e_alt };
            let table = experiments::robust_table(preset, &SUPP_E_ETAS, args.seeds.unwrap_or(10), base)?;
            let stem = args.table.replace('-', "_");
            vec![
                (format!("{stem}.csv"), table.to_csv()?),
                (format!("{stem}_replicates.csv"), write_csv(&table.replicates)?),
            ]
        }
        "fig2" => {
            let options = Fig2Options { seeds: args.seeds.unwrap_or(20), base_seed: base, ..Fig2Options::default() };
            let rows = experiments::bound_tracking(&options)?;
            vec![
                ("fig2.csv".to_string(), experiments::rows_csv(&rows)?),
                ("fig2_summary.csv".to_string(), experiments::summary_csv(&rows)?),
            ]
        }
        "fig3" => {
            let options = Fig3Options { seeds: args.seeds.unwrap_or(10), base_seed: base, ..Fig3Options::default() };
            let reps = experiments::clip_threshold_curves(&options)?;
            vec![
                ("fig3.csv".to_string(), experiments::curves_csv(&reps)?),
                ("fig3_best.csv".to_string(), experiments::best_csv(&reps)?),
            ]
        }
        other => {
            return Err(Error::invalid(
                "table",
                format!("unknown experiment `{other}`; expected one of {:?}", experiments::EXPERIMENTS),
            ))
        }
    };
    emit(cli, "reproduce", vec![args.table.clone()], vec![base], files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_class() {
        assert_eq!(exit_code(&Error::EmptyInput), 2);
        assert_eq!(exit_code(&Error::DegenerateTreatment(crate::model::Arm::Treated)), 3);
        let w = crate::model::Covariates::new(0, 1).unwrap();
        assert_eq!(exit_code(&Error::ExtremePropensity { w, score: 1.0 }), 4);
        let v: serde_json::Value = serde_json::from_str(&error_json(&Error::EmptyInput)).unwrap();
        assert_eq!(v["error"]["code"], 2);
    }

    #[test]
    fn clipped_ipw_requires_rho() {
        let err = Cli::try_parse_from(["cb", "estimate", "--data", "x.csv", "--estimator", "clipped-ipw"]).unwrap_err();
        assert_eq!(err.kind(), clap::error::ErrorKind::MissingRequiredArgument);
    }
}
