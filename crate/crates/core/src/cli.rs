//! The `cassinian` command line: `gen`, `dist`, `delta`, `verify`, `repro`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::delta::{exact_delta, sampled_delta, DeltaReport};
use crate::error::{Error, Result};
use crate::io;
use crate::metric::{build_distance_matrix, BaseMetric, DistanceMatrix, PointCloud};
use crate::par::with_workers;
use crate::punctured::{load_base, PuncturedSpace, PuncturedSpec, Variant};
use crate::repro::{
    arctan_family, four_point_counterexample, hyperbolicity_sweep, ArctanConfig, ScenarioResult, SweepConfig,
};
use crate::sampling::TupleSample;
use crate::verify::{
    check_lemma_k, check_lemma_nine, check_metric_axioms, check_mu_bounds, check_mu_set_quasi_triangle,
    check_product_lemma, check_ptolemaic, check_quasi_ptolemy_sampled, check_sandwich, QuasiSource, Sandwich,
    ViolationReport, DEFAULT_TOLERANCE,
};

pub const OUT_DIR_ENV: &str = "CASSINIAN_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "cassinian",
    version,
    about = "Hyperbolic-type metrics on punctured finite metric spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Relative tolerance for inequality checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,

    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Output file (a directory for `repro all`). Defaults to stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,

    /// Directory for outputs when `--out` is absent.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random cloud, uniform in [0, scale)^dim.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Materialize a base or punctured distance matrix.
    Dist {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Gromov delta by the four-point condition.
    Delta {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Check metric axioms, Ptolemy, sandwiches or the lemma suite.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        #[command(flatten)]
        input: InputArgs,
        /// Use the first k points of the base as punctures.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Run a named scenario.
    Repro {
        #[arg(value_enum)]
        scenario: ScenarioArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Puncture counts for the sweep, e.g. `1,2,4,8`.
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
        /// Corner parameters for the arctan scenario, e.g. `1,10,100`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        t_grid: Option<Vec<f64>>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        cloud_points: Option<usize>,
    },
}

/// Where the metric comes from: a spec file, a matrix file, or a cloud
/// with an optional puncture list and variant.
#[derive(Debug, Args)]
pub struct InputArgs {
    /// Punctured-space spec (JSON).
    #[arg(long, conflicts_with_all = ["matrix", "cloud"])]
    pub spec: Option<PathBuf>,
    /// Distance matrix (JSON or headerless CSV).
    #[arg(long, conflicts_with = "cloud")]
    pub matrix: Option<PathBuf>,
    /// Point cloud (CSV or JSON).
    #[arg(long)]
    pub cloud: Option<PathBuf>,
    #[arg(long, default_value = "euclidean")]
    pub metric: BaseMetric,
    /// Puncture indices, e.g. `0,3`.
    #[arg(long, value_delimiter = ',')]
    pub punctures: Option<Vec<usize>>,
    #[arg(long)]
    pub variant: Option<Variant>,
    #[arg(long)]
    pub anchor: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Axioms,
    Ptolemy,
    Sandwich,
    Lemmas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    FourPoint,
    Arctan,
    Sweep,
    All,
}

impl ScenarioArg {
    fn file_stem(self) -> &'static str {
        match self {
            ScenarioArg::FourPoint => "four-point",
            ScenarioArg::Arctan => "arctan",
            ScenarioArg::Sweep => "sweep",
            ScenarioArg::All => "all",
        }
    }
}

/// Report of one `verify` run.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutput {
    pub target: String,
    pub passed: bool,
    pub tolerance: f64,
    pub seed: u64,
    pub reports: Vec<ViolationReport>,
}

struct Loaded {
    cloud: Option<PointCloud>,
    base: DistanceMatrix,
    space: Option<PuncturedSpace>,
    variant: Option<Variant>,
    anchor: Option<usize>,
}

impl Loaded {
    /// The matrix a command acts on: the punctured variant when one is
    /// selected, the base otherwise.
    fn working_matrix(&self) -> Result<DistanceMatrix> {
        match (&self.space, self.variant) {
            (Some(s), Some(v)) => s.matrix(v, self.anchor),
            (None, Some(_)) => Err(Error::input("--variant needs punctures")),
            (_, None) => Ok(self.base.clone()),
        }
    }
}

fn load_input(input: &InputArgs, k: Option<usize>) -> Result<Loaded> {
    if let Some(path) = &input.spec {
        let spec = PuncturedSpec::from_json_file(path)?;
        let space = spec.resolve(path.parent())?;
        if k.is_some() {
            return Err(Error::input("--k cannot be combined with --spec"));
        }
        let cloud = match &spec.base {
            crate::punctured::BaseSource::Cloud(c) => Some(c.clone()),
            _ => None,
        };
        return Ok(Loaded {
            cloud,
            base: space.base().clone(),
            variant: Some(input.variant.unwrap_or(spec.variant)),
            anchor: input.anchor.or(spec.anchor),
            space: Some(space),
        });
    }
    let (cloud, base) = match (&input.matrix, &input.cloud) {
        (Some(m), None) => (None, io::read_matrix(m)?),
        (None, Some(c)) => {
            let (cloud, matrix) = load_base(c)?;
            match (cloud, matrix) {
                (Some(cloud), _) => {
                    let m = build_distance_matrix(&cloud, input.metric)?;
                    (Some(cloud), m)
                }
                (None, Some(m)) => (None, m),
                (None, None) => return Err(Error::input("empty input")),
            }
        }
        _ => return Err(Error::input("give exactly one of --spec, --matrix, --cloud")),
    };
    let punctures = match (k, &input.punctures) {
        (Some(_), Some(_)) => return Err(Error::input("--k and --punctures are exclusive")),
        (Some(0), None) => return Err(Error::input("--k must be positive")),
        (Some(k), None) => Some((0..k).collect::<Vec<_>>()),
        (None, p) => p.clone(),
    };
    let space = punctures.map(|p| PuncturedSpace::new(base.clone(), p)).transpose()?;
    Ok(Loaded {
        cloud,
        base,
        space,
        variant: input.variant,
        anchor: input.anchor,
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn write_text(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)?;
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn destination(cli: &Cli, default_name: &str) -> Option<PathBuf> {
    cli.out
        .clone()
        .or_else(|| cli.out_dir.as_ref().map(|d| d.join(default_name)))
}

fn cmd_gen(cli: &Cli, n: usize, dim: usize, scale: f64) -> Result<bool> {
    if n == 0 {
        return Err(Error::input("--n must be at least 1"));
    }
    let cloud = PointCloud::random_uniform(n, dim, cli.seed)?.scaled(scale)?;
    match destination(cli, "cloud.csv") {
        Some(path) => io::write_cloud(&cloud, &path)?,
        None => io::write_cloud_csv(&cloud, std::io::stdout().lock())?,
    }
    Ok(true)
}

fn cmd_dist(cli: &Cli, input: &InputArgs) -> Result<bool> {
    let m = load_input(input, None)?.working_matrix()?;
    match destination(cli, "matrix.json") {
        Some(path) => io::write_matrix(&m, &path)?,
        None => write_text(&format!("{}\n", serde_json::to_string(&m)?), None)?,
    }
    Ok(true)
}

fn cmd_delta(cli: &Cli, input: &InputArgs, mode: ModeArg, samples: usize) -> Result<bool> {
    let loaded = load_input(input, None)?;
    let report: DeltaReport = match (&loaded.space, loaded.variant) {
        (Some(space), Some(v)) => {
            let oracle = space.oracle(v, loaded.anchor)?;
            match mode {
                ModeArg::Exact => exact_delta(&oracle)?,
                ModeArg::Sampled => sampled_delta(&oracle, samples, cli.seed)?,
            }
        }
        _ => {
            let m = loaded.working_matrix()?;
            match mode {
                ModeArg::Exact => exact_delta(&m)?,
                ModeArg::Sampled => sampled_delta(&m, samples, cli.seed)?,
            }
        }
    };
    write_text(&to_json(&report)?, destination(cli, "delta.json").as_deref())?;
    Ok(true)
}

fn sandwich_reports(loaded: &Loaded, tol: f64) -> Result<Vec<ViolationReport>> {
    let space = loaded
        .space
        .as_ref()
        .ok_or_else(|| Error::input("sandwich checks need punctures (--k, --punctures or --spec)"))?;
    let mut reports = Vec::new();
    for anchor in 0..space.k() {
        reports.push(check_sandwich(Sandwich::OnePoint { space, anchor }, tol)?);
    }
    reports.push(check_sandwich(Sandwich::Average { space }, tol)?);
    if let Some(cloud) = loaded.cloud.as_ref().filter(|c| c.dim() == 2) {
        reports.push(check_sandwich(Sandwich::Taxicab { cloud }, tol)?);
    }
    Ok(reports)
}

fn lemma_reports(loaded: &Loaded, samples: usize, seed: u64, tol: f64) -> Result<Vec<ViolationReport>> {
    let ps: Vec<usize> = match &loaded.space {
        Some(s) => s.punctures().to_vec(),
        None => vec![0],
    };
    let d = &loaded.base;
    let sample = TupleSample::new(samples, seed);
    let (p, q) = (ps[0], ps[ps.len() - 1]);
    let mut reports = vec![
        check_mu_bounds(d, p, q, sample, tol)?,
        check_lemma_nine(d, p, sample, tol)?,
    ];
    for k in [4.0, 6.0, 10.0] {
        reports.push(check_lemma_k(d, p, k, sample, tol)?);
    }
    reports.push(check_product_lemma(d, &ps, sample, tol)?);
    reports.push(check_quasi_ptolemy_sampled(d, QuasiSource::Base, 1.0, sample, tol)?);
    reports.push(check_quasi_ptolemy_sampled(d, QuasiSource::Mu(p), 1.5, sample, tol)?);
    reports.push(check_mu_set_quasi_triangle(d, &ps, sample, tol)?);
    Ok(reports)
}

fn cmd_verify(cli: &Cli, target: VerifyTarget, input: &InputArgs, k: Option<usize>, samples: usize) -> Result<bool> {
    let loaded = load_input(input, k)?;
    let (name, reports) = match target {
        VerifyTarget::Axioms => ("axioms", vec![check_metric_axioms(&loaded.working_matrix()?, cli.tol)?]),
        VerifyTarget::Ptolemy => ("ptolemy", vec![check_ptolemaic(&loaded.working_matrix()?, cli.tol)?]),
        VerifyTarget::Sandwich => ("sandwich", sandwich_reports(&loaded, cli.tol)?),
        VerifyTarget::Lemmas => ("lemmas", lemma_reports(&loaded, samples, cli.seed, cli.tol)?),
    };
    let out = VerifyOutput {
        target: name.to_string(),
        passed: reports.iter().all(ViolationReport::passed),
        tolerance: cli.tol,
        seed: cli.seed,
        reports,
    };
    for r in &out.reports {
        eprintln!(
            "{:<24} checked {:>10}  skipped {:>8}  violations {:>6}",
            r.check,
            r.checked,
            r.skipped,
            r.violations.len()
        );
    }
    write_text(
        &to_json(&out)?,
        destination(cli, &format!("verify-{name}.json")).as_deref(),
    )?;
    Ok(out.passed)
}

fn run_scenario(which: ScenarioArg, sweep: &SweepConfig, arctan: &ArctanConfig) -> Result<ScenarioResult> {
    match which {
        ScenarioArg::FourPoint => four_point_counterexample(),
        ScenarioArg::Arctan => arctan_family(arctan),
        ScenarioArg::Sweep => hyperbolicity_sweep(sweep),
        ScenarioArg::All => unreachable!("expanded by caller"),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_repro(
    cli: &Cli,
    scenario: ScenarioArg,
    n: Option<usize>,
    trials: Option<usize>,
    ks: Option<&Vec<usize>>,
    t_grid: Option<&Vec<f64>>,
    samples: Option<usize>,
    cloud_points: Option<usize>,
) -> Result<bool> {
    let mut sweep = SweepConfig {
        seed: cli.seed,
        ..SweepConfig::default()
    };
    if let Some(n) = n {
        sweep.n = n;
    }
    if let Some(t) = trials {
        sweep.trials = t;
    }
    if let Some(ks) = ks {
        sweep.ks = ks.clone();
    }
    let mut arctan = ArctanConfig {
        seed: cli.seed,
        ..ArctanConfig::default()
    };
    if let Some(t) = t_grid {
        arctan.t_grid = t.clone();
    }
    if let Some(s) = samples {
        arctan.samples = s;
    }
    if let Some(c) = cloud_points {
        arctan.cloud_points = c;
    }
    if scenario != ScenarioArg::All {
        let r = run_scenario(scenario, &sweep, &arctan)?;
        eprint!("{r}");
        let name = format!("repro-{}.json", scenario.file_stem());
        write_text(&to_json(&r)?, destination(cli, &name).as_deref())?;
        return Ok(r.pass);
    }
    let all = [ScenarioArg::FourPoint, ScenarioArg::Arctan, ScenarioArg::Sweep];
    let results = all
        .iter()
        .map(|&s| run_scenario(s, &sweep, &arctan))
        .collect::<Result<Vec<_>>>()?;
    for r in &results {
        eprint!("{r}");
    }
    match cli.out.as_ref().or(cli.out_dir.as_ref()) {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for (s, r) in all.iter().zip(&results) {
                write_text(&to_json(r)?, Some(&dir.join(format!("repro-{}.json", s.file_stem()))))?;
            }
        }
        None => write_text(&to_json(&results)?, None)?,
    }
    Ok(results.iter().all(|r| r.pass))
}

fn dispatch(cli: &Cli) -> Result<bool> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(Error::input(format!("--tol must be positive, got {}", cli.tol)));
    }
    if cli.workers == Some(0) {
        return Err(Error::input("--workers must be positive"));
    }
    match &cli.command {
        Command::Gen { n, dim, scale } => cmd_gen(cli, *n, *dim, *scale),
        Command::Dist { input } => cmd_dist(cli, input),
        Command::Delta { input, mode, samples } => cmd_delta(cli, input, *mode, *samples),
        Command::Verify {
            target,
            input,
            k,
            samples,
        } => cmd_verify(cli, *target, input, *k, *samples),
        Command::Repro {
            scenario,
            n,
            trials,
            ks,
            t_grid,
            samples,
            cloud_points,
        } => cmd_repro(
            cli,
            *scenario,
            *n,
            *trials,
            ks.as_ref(),
            t_grid.as_ref(),
            *samples,
            *cloud_points,
        ),
    }
}

/// Runs a parsed command line and maps the outcome to an exit code.
pub fn run(cli: Cli) -> ExitCode {
    let outcome = with_workers(cli.workers.filter(|&w| w > 0), || dispatch(&cli));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

pub fn main() -> ExitCode {
    run(Cli::parse())
}
