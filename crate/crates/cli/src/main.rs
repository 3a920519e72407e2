#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use psrfr_core::models::{covariance_for, CovarianceScenario};
use psrfr_core::montecarlo::presets;
use psrfr_core::nalgebra::DMatrix;
use psrfr_core::prelude::*;

const MODEL_HELP: &str = "Model id: n1, n2, n3, n4, n5, nn1, nn2, nn3, nn4, ne1, ne2, ne3, gb4";
const METHOD_HELP: &str = "Comma-separated methods from: psrfr, ols, phd, sir, save";
const DIST_HELP: &str = "Predictor law: normal, t, cauchy, pe, mixture";
const COV_HELP: &str =
    "Scale-matrix preset: norm_p10, ellp_p10, norm_p30, norm_p40, ellp_p30, ellp_p40";
const PRESET_HELP: &str =
    "Preset: table1, table2, table3, table4, table5, table6, table7, table9, nonelliptical, highdim";

#[derive(Parser)]
#[command(
    name = "psrfr",
    version,
    about = "Sufficient dimension reduction by principal square response forward regression"
)]
struct Cli {
    /// Worker threads for Monte Carlo runs (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one Monte Carlo experiment cell and write replicate/aggregate CSVs
    Simulate(SimulateArgs),
    /// Fit one estimator to a CSV dataset
    Fit(FitArgs),
    /// Diagonalize, fit the full PSRFR spectrum and rank variable importance
    Analyze(AnalyzeArgs),
    /// Draw predictors from a distribution and write them as CSV
    Sample(SampleArgs),
    /// Write normal Q-Q pairs per predictor for external plotting
    Qq(QqArgs),
    /// Run a named simulation preset
    Tables(TablesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DistId {
    Normal,
    T,
    Cauchy,
    Pe,
    Mixture,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long, value_enum, default_value = "normal", help = DIST_HELP)]
    dist: DistId,
    /// Degrees of freedom for t
    #[arg(long, default_value_t = 3.0)]
    nu: f64,
    /// Kurtosis parameter for pe
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Normal component weight for mixture
    #[arg(long, default_value_t = 0.8)]
    weight: f64,
    /// Uniform half-width for mixture
    #[arg(long, default_value_t = 3.0)]
    halfwidth: f64,
    /// Predictor dimension; picks the 10/30/40 preset when --cov is absent
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, help = COV_HELP, conflicts_with = "cov_diag")]
    cov: Option<CovarianceScenario>,
    /// Explicit comma-separated scale-matrix diagonal
    #[arg(long, value_delimiter = ',')]
    cov_diag: Option<Vec<f64>>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, help = MODEL_HELP)]
    model: ModelId,
    #[command(flatten)]
    dist: DistArgs,
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Structural dimension; must equal the model's
    #[arg(long)]
    k: Option<usize>,
    /// Noise scale (default: the model's)
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "psrfr", help = METHOD_HELP)]
    methods: Vec<Method>,
    #[arg(long, default_value_t = DEFAULT_SLICES)]
    slices: usize,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "replicates.csv")]
    out: PathBuf,
    #[arg(long, default_value = "aggregate.csv")]
    aggregate_out: PathBuf,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "quality")]
    response: String,
    /// Field delimiter, a single character
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// Keep only the first N data rows
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(
        long,
        default_value = "psrfr",
        help = "Method: psrfr, ols, phd, sir, save"
    )]
    method: Method,
    #[arg(long, default_value_t = DEFAULT_SLICES)]
    slices: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Rotated,
    Original,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0.99)]
    threshold: f64,
    /// Standardize predictors before diagonalizing
    #[arg(long)]
    standardize: bool,
    /// Coordinates in which loadings are ranked
    #[arg(long, value_enum, default_value = "rotated")]
    frame: FrameArg,
    /// Also write the full report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    dist: DistArgs,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "sample.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct QqArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "qq")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(help = PRESET_HELP)]
    preset: String,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "replicates.csv")]
    out: PathBuf,
    #[arg(long, default_value = "aggregate.csv")]
    aggregate_out: PathBuf,
}

enum Failure {
    Usage(String),
    Runtime(SdrError),
}

impl From<SdrError> for Failure {
    fn from(e: SdrError) -> Self {
        Failure::Runtime(e)
    }
}

type CliResult = std::result::Result<(), Failure>;

fn usage(e: SdrError) -> Failure {
    Failure::Usage(e.to_string())
}

fn default_scenario(dist: DistId, p: usize) -> Option<CovarianceScenario> {
    use CovarianceScenario::*;
    let elliptical = matches!(dist, DistId::T | DistId::Cauchy | DistId::Pe);
    Some(match (elliptical, p) {
        (false, 10) => NormP10,
        (false, 30) => NormP30,
        (false, 40) => NormP40,
        (true, 10) => EllpP10,
        (true, 30) => EllpP30,
        (true, 40) => EllpP40,
        _ => return None,
    })
}

impl DistArgs {
    fn spec(&self) -> std::result::Result<DistributionSpec, Failure> {
        let sigma = if let Some(diag) = &self.cov_diag {
            DMatrix::from_diagonal(&psrfr_core::nalgebra::DVector::from_vec(diag.clone()))
        } else {
            let scenario = match self.cov {
                Some(s) => s,
                None => default_scenario(self.dist, self.p.unwrap_or(10)).ok_or_else(|| {
                    Failure::Usage(format!(
                        "no covariance preset for p = {}; pass --cov-diag",
                        self.p.unwrap_or(10)
                    ))
                })?,
            };
            covariance_for(scenario)
        };
        if let Some(p) = self.p {
            if p != sigma.nrows() {
                return Err(Failure::Usage(format!(
                    "--p {p} does not match the {}-dimensional covariance",
                    sigma.nrows()
                )));
            }
        }
        let kind = match self.dist {
            DistId::Normal => DistributionKind::Normal,
            DistId::T => DistributionKind::StudentT { nu: self.nu },
            DistId::Cauchy => DistributionKind::StudentT { nu: 1.0 },
            DistId::Pe => DistributionKind::PowerExponential { beta: self.beta },
            DistId::Mixture => DistributionKind::NormalUniformMixture {
                weight: self.weight,
                halfwidth: self.halfwidth,
            },
        };
        let spec = DistributionSpec::centered(kind, sigma);
        spec.validate().map_err(usage)?;
        Ok(spec)
    }
}

impl DataArgs {
    fn load(&self) -> std::result::Result<Dataset, Failure> {
        if !self.delimiter.is_ascii() {
            return Err(Failure::Usage(
                "--delimiter must be an ASCII character".into(),
            ));
        }
        let opts = CsvOptions {
            delimiter: self.delimiter as u8,
            row_limit: self.limit,
        };
        let ds = load_csv(&self.data, &self.response, &opts)?;
        if ds.dropped_rows > 0 {
            eprintln!("dropped {} rows with missing values", ds.dropped_rows);
        }
        Ok(ds)
    }
}

fn simulate(a: SimulateArgs) -> CliResult {
    let dist = a.dist.spec()?;
    let mut config =
        ExperimentConfig::new(a.model, dist, a.n, a.methods, a.reps, a.seed).map_err(usage)?;
    if let Some(k) = a.k {
        config.k = k;
    }
    if let Some(sigma) = a.sigma {
        config = config.with_sigma(sigma);
    }
    config.slices = a.slices;
    config.validate().map_err(usage)?;
    let rows = grid(&[config], &a.out, &a.aggregate_out)?;
    print!("{}", markdown_table(&rows));
    Ok(())
}

fn tables(a: TablesArgs) -> CliResult {
    if a.reps == 0 {
        return Err(Failure::Usage("--reps must be positive".into()));
    }
    let configs = presets::preset(&a.preset, a.reps, a.seed).map_err(usage)?;
    let rows = grid(&configs, &a.out, &a.aggregate_out)?;
    print!("{}", markdown_table(&rows));
    Ok(())
}

fn fmt_vec(v: impl IntoIterator<Item = f64>) -> String {
    v.into_iter()
        .map(|x| format!("{x:.6e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn fit_cmd(a: FitArgs) -> CliResult {
    let ds = a.data.load()?;
    let est = fit(
        a.method,
        &ds.predictors,
        &ds.response,
        a.k as usize,
        a.slices,
    )?;
    println!("method: {}", est.method);
    println!(
        "n = {}, p = {}, k = {}",
        ds.predictors.nrows(),
        ds.predictors.ncols(),
        est.k
    );
    println!("\nbasis:");
    print!("| variable |");
    for j in 0..est.basis.ncols() {
        print!(" b{} |", j + 1);
    }
    println!("\n|---|{}", "---|".repeat(est.basis.ncols()));
    for (i, name) in ds.column_names.iter().enumerate() {
        print!("| {name} |");
        for j in 0..est.basis.ncols() {
            print!(" {:.6} |", est.basis[(i, j)]);
        }
        println!();
    }
    println!(
        "\neigenvalues: {}",
        fmt_vec(est.eigenvalues.iter().copied())
    );
    println!("proportions: {}", fmt_vec(est.eigenvalue_proportions()));
    Ok(())
}

fn analyze_cmd(a: AnalyzeArgs) -> CliResult {
    if !(a.threshold > 0.0) {
        return Err(Failure::Usage("--threshold must be positive".into()));
    }
    let ds = a.data.load()?;
    let opts = AnalysisOptions {
        proportion_threshold: a.threshold,
        standardize: a.standardize,
        frame: match a.frame {
            FrameArg::Rotated => ImportanceFrame::Rotated,
            FrameArg::Original => ImportanceFrame::Original,
        },
    };
    let report = analyze(&ds, &opts)?;
    println!("n = {}, response = {}", report.n, report.response_name);
    println!(
        "eigenvalue proportions: {}",
        fmt_vec(report.eigenvalue_proportions.iter().copied())
    );
    println!(
        "chosen k = {} (threshold {})\n",
        report.chosen_k, report.proportion_threshold
    );
    print!("{}", report.importance_markdown());
    if let Some(path) = &a.json {
        std::fs::write(path, report.to_json()).map_err(|e| io_failure(path, e))?;
    }
    Ok(())
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(SdrError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn sample_cmd(a: SampleArgs) -> CliResult {
    if a.n == 0 {
        return Err(Failure::Usage("--n must be positive".into()));
    }
    let spec = a.dist.spec()?;
    let draws = spec.sample(a.n, SeededStream::new(a.seed, 0))?;
    let x = draws.values();
    let file = File::create(&a.out).map_err(|e| io_failure(&a.out, e))?;
    let mut w = BufWriter::new(file);
    let header: Vec<String> = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
    let mut text = header.join(",");
    text.push('\n');
    for row in x.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| io_failure(&a.out, e))?;
    Ok(())
}

fn qq_cmd(a: QqArgs) -> CliResult {
    let ds = a.data.load()?;
    for path in write_qq_csvs(&ds, &a.out_dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let threads = cli.threads.unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot start {threads} worker threads: {e}")))?;
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Fit(a) => fit_cmd(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Sample(a) => sample_cmd(a),
        Command::Qq(a) => qq_cmd(a),
        Command::Tables(a) => tables(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(2)
        }
    }
}
