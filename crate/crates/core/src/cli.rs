//! Command-line front end. Every command writes CSV/JSON artifacts into
//! `--out` and echoes its resolved configuration.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 I/O failure. Failures print one JSON line on standard error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{
    format_f64, read_matrix_file, write_json_file, write_matrix_file, write_text_file,
    write_triplets_file,
};
use crate::model::{center_scale_with, compute_suff_stats, DataSet, PenaltyPair};
use crate::optimizer::{fit_path_with, fit_with_stats, kkt_residual, PenaltyGrid, SolverOptions};
use crate::selection::{self, cross_validate_with, Criterion};
use crate::simulate::{gen_dataset, CoefficientGenerator, Placement, SimSpec};
use crate::structure::{
    chain_laplacian, genetic_precision, hamming_laplacian_with, identity_structure, GeneticMap,
    LaplacianDiagonal, StructureMatrix, DEFAULT_RHO,
};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser, Debug, Clone, Serialize)]
#[command(
    name = "spring",
    version,
    about = "Structured sparse multivariate regression via conditional GGMs"
)]
pub struct RunConfig {
    #[command(subcommand)]
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Fit a single (lambda1, lambda2) pair.
    Fit(FitArgs),
    /// Fit a regularization path over a penalty grid.
    Path(PathArgs),
    /// K-fold cross-validation of the prediction error over a grid.
    Cv(CvArgs),
    /// Generate a synthetic data set.
    Simulate(SimulateArgs),
    /// Write a structure matrix.
    Structure(StructureArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DataArgs {
    /// Predictor matrix (CSV with header, one row per sample).
    #[arg(long)]
    pub x: PathBuf,
    /// Response matrix (CSV with header, one row per sample).
    #[arg(long)]
    pub y: PathBuf,
    /// identity | chain:K | genetic:MAPFILE | hamming:K,ELL | file:PATH
    #[arg(long, default_value = "identity")]
    pub structure: String,
    /// Correlation base for genetic maps.
    #[arg(long, default_value_t = DEFAULT_RHO)]
    pub rho: f64,
    /// Also scale predictors to unit variance.
    #[arg(long)]
    pub scale_x: bool,
    /// Use the data as given (must already be centered).
    #[arg(long)]
    pub no_standardize: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-7)]
    pub outer_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub kkt_tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_outer: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub inner_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_inner: usize,
    /// Plain alternation without the joint rescaling step.
    #[arg(long)]
    pub no_rescale: bool,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            outer_tol: self.outer_tol,
            kkt_tol: self.kkt_tol,
            max_outer: self.max_outer,
            inner_tol: self.inner_tol,
            max_inner: self.max_inner,
            rescale: !self.no_rescale,
            verbose: false,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GridArgs {
    /// Number of lambda1 values and smallest/largest ratio, `N:RATIO`.
    #[arg(long, default_value = "50:0.01")]
    pub grid_l1: String,
    /// Comma-separated lambda2 values.
    #[arg(long, default_value = "0,0.01,0.1,1,10")]
    pub grid_l2: String,
    /// Caps concurrent lambda2 sweeps / folds. Does not affect results.
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub lambda1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda2: f64,
    /// Also write omega_xy as `j,k,value` triplets.
    #[arg(long)]
    pub sparse: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PathArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Write omega_xy and B for every cell.
    #[arg(long)]
    pub save_coefficients: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// p=100, q=1, n=120, sigma2=5, two smooth bumps.
    BumpUnivariate,
    /// As bump-univariate with the bump entries permuted.
    BumpSwapped,
    /// p=40, q=5, n=50, 25 random +-1 direct effects, Toeplitz R.
    Toeplitz,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "toeplitz")]
    pub preset: Preset,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long)]
    pub support_size: Option<usize>,
    /// Place random direct effects in runs of this length.
    #[arg(long)]
    pub block_len: Option<usize>,
    /// Permutation seed for bump-swapped (defaults to the data seed).
    #[arg(long)]
    pub swap_seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct StructureArgs {
    #[arg(long)]
    pub identity: bool,
    #[arg(long)]
    pub chain: bool,
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    /// Genetic map CSV (`marker,chromosome,position_cM`).
    #[arg(long)]
    pub genetic: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_RHO)]
    pub rho: f64,
    /// Motif length and distance threshold, `K,ELL`.
    #[arg(long)]
    pub hamming: Option<String>,
    /// Use the ordinary graph degree on the Hamming Laplacian diagonal.
    #[arg(long)]
    pub standard_laplacian: bool,
    /// Dimension for --identity and --chain.
    #[arg(long)]
    pub p: Option<usize>,
    /// Same syntax as the data commands' --structure.
    #[arg(long)]
    pub structure: Option<String>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Resolved structure source.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureSource {
    Identity,
    Chain(u32),
    Genetic(PathBuf),
    Hamming(u32, u32),
    File(PathBuf),
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn parse_hamming(s: &str) -> Result<(u32, u32)> {
    let (k, ell) = s
        .split_once(',')
        .ok_or_else(|| config_error(format!("hamming parameters must be K,ELL, got {s:?}")))?;
    let k = k
        .trim()
        .parse()
        .map_err(|_| config_error(format!("bad motif length {k:?}")))?;
    let ell = ell
        .trim()
        .parse()
        .map_err(|_| config_error(format!("bad distance {ell:?}")))?;
    Ok((k, ell))
}

pub fn parse_structure(spec: &str) -> Result<StructureSource> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    match (kind, arg) {
        ("identity", None) => Ok(StructureSource::Identity),
        ("chain", None) => Ok(StructureSource::Chain(1)),
        ("chain", Some(k)) => k
            .parse()
            .map(StructureSource::Chain)
            .map_err(|_| config_error(format!("bad chain order {k:?}"))),
        ("genetic", Some(path)) => Ok(StructureSource::Genetic(PathBuf::from(path))),
        ("hamming", Some(params)) => {
            parse_hamming(params).map(|(k, l)| StructureSource::Hamming(k, l))
        }
        ("file", Some(path)) => Ok(StructureSource::File(PathBuf::from(path))),
        _ => Err(config_error(format!("unrecognized structure {spec:?}"))),
    }
}

pub fn build_structure(
    src: &StructureSource,
    p: usize,
    rho: f64,
    diag: LaplacianDiagonal,
) -> Result<StructureMatrix> {
    let l = match src {
        StructureSource::Identity => identity_structure(p)?,
        StructureSource::Chain(k) => chain_laplacian(p, *k)?,
        StructureSource::Genetic(path) => genetic_precision(&GeneticMap::from_path(path, rho)?)?,
        StructureSource::Hamming(k, ell) => hamming_laplacian_with(*k, *ell, diag)?,
        StructureSource::File(path) => StructureMatrix::custom(read_matrix_file(path)?)?,
    };
    if l.dim() != p {
        return Err(Error::dim("structure matrix", p, l.dim()));
    }
    Ok(l)
}

/// `N:RATIO` into count and ratio.
pub fn parse_grid_l1(s: &str) -> Result<(usize, f64)> {
    let (n, r) = s
        .split_once(':')
        .ok_or_else(|| config_error(format!("--grid-l1 must be N:RATIO, got {s:?}")))?;
    let n = n
        .trim()
        .parse()
        .map_err(|_| config_error(format!("bad grid size {n:?}")))?;
    let r = r
        .trim()
        .parse()
        .map_err(|_| config_error(format!("bad grid ratio {r:?}")))?;
    Ok((n, r))
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| config_error(format!("bad number {v:?} in list")))
        })
        .collect()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })
}

struct Loaded {
    raw: DataSet,
    data: DataSet,
    l: StructureMatrix,
}

fn load(args: &DataArgs) -> Result<Loaded> {
    let x = read_matrix_file(&args.x)?;
    let y = read_matrix_file(&args.y)?;
    let raw = DataSet::new(x, y)?;
    let data = if args.no_standardize {
        DataSet::centered(raw.x.clone(), raw.y.clone())?
    } else {
        center_scale_with(&raw, args.scale_x)?
    };
    let src = parse_structure(&args.structure)?;
    let l = build_structure(&src, raw.p(), args.rho, LaplacianDiagonal::IncludeSelf)?;
    Ok(Loaded { raw, data, l })
}

fn grid_for(data: &DataSet, args: &GridArgs) -> Result<PenaltyGrid> {
    let stats = compute_suff_stats(data)?;
    let (count, ratio) = parse_grid_l1(&args.grid_l1)?;
    PenaltyGrid::from_stats(&stats, count, ratio, parse_list(&args.grid_l2)?)
}

#[derive(Serialize)]
struct FitReport {
    lambda1: f64,
    lambda2: f64,
    n: usize,
    p: usize,
    q: usize,
    objective: f64,
    loglik: f64,
    df: f64,
    aic: f64,
    bic: f64,
    iterations: usize,
    converged: bool,
    kkt_residual: f64,
    support_size: usize,
}

fn run_fit(a: &FitArgs) -> Result<()> {
    let ld = load(&a.data)?;
    let stats = compute_suff_stats(&ld.data)?;
    let pen = PenaltyPair::new(a.lambda1, a.lambda2)?;
    let f = fit_with_stats(&stats, &ld.l, pen, &a.data.solver.options(), None)?;
    let out = &a.data.out;
    ensure_dir(out)?;
    write_matrix_file(&out.join("omega_xy.csv"), "y", &f.omega_xy)?;
    write_matrix_file(&out.join("omega_yy.csv"), "y", &f.omega_yy)?;
    write_matrix_file(&out.join("B.csv"), "y", &f.b)?;
    write_matrix_file(&out.join("R.csv"), "y", &f.r)?;
    if a.sparse {
        write_triplets_file(&out.join("omega_xy_triplets.csv"), &f.omega_xy)?;
    }
    let df = selection::degrees_of_freedom(&f, &stats, &ld.l, pen.lambda2)?;
    let n = stats.n;
    let loglik = -(n as f64) * crate::model::neg_log_likelihood(&f, &stats)?;
    let report = FitReport {
        lambda1: pen.lambda1,
        lambda2: pen.lambda2,
        n,
        p: stats.p(),
        q: stats.q(),
        objective: f.objective_value,
        loglik,
        df,
        aic: selection::penalized_criterion(loglik, df, Criterion::Aic, n),
        bic: selection::penalized_criterion(loglik, df, Criterion::Bic, n),
        iterations: f.n_outer_iters,
        converged: f.converged,
        kkt_residual: kkt_residual(&f, &stats, &ld.l, pen),
        support_size: f.support_size(),
    };
    write_json_file(&out.join("fit.json"), &report)
}

fn run_path(a: &PathArgs) -> Result<()> {
    let ld = load(&a.data)?;
    let grid = grid_for(&ld.data, &a.grid)?;
    let path = fit_path_with(
        &ld.data,
        &ld.l,
        &grid,
        &a.data.solver.options(),
        a.grid.threads,
    )?;
    let out = &a.data.out;
    ensure_dir(out)?;
    let mut text = String::from("lambda1,lambda2,df,aic,bic,loglik,support_size\n");
    for c in &path.cells {
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_f64(c.lambda1),
            format_f64(c.lambda2),
            format_f64(c.df),
            format_f64(c.aic),
            format_f64(c.bic),
            format_f64(c.loglik),
            c.support.len()
        ));
    }
    write_text_file(&out.join("path.csv"), &text)?;
    if a.save_coefficients {
        let dir = out.join("cells");
        ensure_dir(&dir)?;
        let n1 = path.grid.lambda1_values.len();
        for (idx, c) in path.cells.iter().enumerate() {
            let (i1, i2) = (idx % n1, idx / n1);
            write_matrix_file(
                &dir.join(format!("omega_xy_{i2}_{i1}.csv")),
                "y",
                &c.omega_xy,
            )?;
            write_matrix_file(&dir.join(format!("B_{i2}_{i1}.csv")), "y", &c.b)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BestPair {
    lambda1: f64,
    lambda2: f64,
    mean_pe: f64,
    se_pe: f64,
}

fn run_cv(a: &CvArgs) -> Result<()> {
    let ld = load(&a.data)?;
    // The grid is anchored on centered data; folds re-center from their own
    // training rows.
    let grid = grid_for(&ld.data, &a.grid)?;
    let cv_data = if a.data.no_standardize {
        ld.data.clone()
    } else {
        ld.raw.clone()
    };
    let report = cross_validate_with(
        &cv_data,
        &ld.l,
        &grid,
        a.folds,
        a.seed,
        &a.data.solver.options(),
        a.grid.threads,
    )?;
    let out = &a.data.out;
    ensure_dir(out)?;
    let mut text = String::from("lambda1,lambda2,mean_pe,se_pe\n");
    for c in &report.cells {
        text.push_str(&format!(
            "{},{},{},{}\n",
            format_f64(c.lambda1),
            format_f64(c.lambda2),
            format_f64(c.mean_pe),
            format_f64(c.se_pe)
        ));
    }
    write_text_file(&out.join("cv.csv"), &text)?;
    let best = &report.cells[report.best_index];
    write_json_file(
        &out.join("best_pair.json"),
        &BestPair {
            lambda1: best.lambda1,
            lambda2: best.lambda2,
            mean_pe: best.mean_pe,
            se_pe: best.se_pe,
        },
    )?;
    let folds: String = std::iter::once("sample,fold\n".to_string())
        .chain(
            report
                .fold_assignment
                .iter()
                .enumerate()
                .map(|(i, f)| format!("{i},{f}\n")),
        )
        .collect();
    write_text_file(&out.join("folds.csv"), &folds)
}

pub fn sim_spec(a: &SimulateArgs) -> SimSpec {
    let mut spec = match a.preset {
        Preset::BumpUnivariate => SimSpec::bump_univariate(a.seed),
        Preset::BumpSwapped => {
            let mut s = SimSpec::bump_univariate(a.seed);
            s.coefficients = CoefficientGenerator::SwappedBump {
                swap_seed: a.swap_seed.unwrap_or(a.seed),
            };
            s
        }
        Preset::Toeplitz => SimSpec::toeplitz_multivariate(0.5, a.seed),
    };
    if let Some(v) = a.p {
        spec.p = v;
    }
    if let Some(v) = a.q {
        spec.q = v;
    }
    if let Some(v) = a.n_train {
        spec.n_train = v;
    }
    if let Some(v) = a.n_test {
        spec.n_test = v;
    }
    if let Some(v) = a.tau {
        spec.tau = v;
    }
    if let Some(v) = a.sigma2 {
        spec.sigma2 = v;
    }
    if let CoefficientGenerator::RandomSigns {
        support_size,
        placement,
    } = &mut spec.coefficients
    {
        if let Some(v) = a.support_size {
            *support_size = v;
        }
        if let Some(b) = a.block_len {
            *placement = Placement::ContiguousBlocks { block_len: b };
        }
    }
    spec
}

fn run_simulate(a: &SimulateArgs) -> Result<()> {
    let spec = sim_spec(a);
    let (train, test, truth) = gen_dataset(&spec)?;
    let out = &a.out;
    ensure_dir(out)?;
    write_matrix_file(&out.join("X_train.csv"), "x", &train.x)?;
    write_matrix_file(&out.join("Y_train.csv"), "y", &train.y)?;
    write_matrix_file(&out.join("X_test.csv"), "x", &test.x)?;
    write_matrix_file(&out.join("Y_test.csv"), "y", &test.y)?;
    write_matrix_file(&out.join("omega_xy_true.csv"), "y", &truth.omega_xy_true)?;
    write_matrix_file(&out.join("R_true.csv"), "y", &truth.r_true)?;
    write_matrix_file(&out.join("B_true.csv"), "y", &truth.b_true)?;
    write_json_file(&out.join("sim_spec.json"), &spec)
}

fn run_structure(a: &StructureArgs) -> Result<()> {
    let mut sources = Vec::new();
    if a.identity {
        sources.push(StructureSource::Identity);
    }
    if a.chain {
        sources.push(StructureSource::Chain(a.order));
    }
    if let Some(m) = &a.genetic {
        sources.push(StructureSource::Genetic(m.clone()));
    }
    if let Some(h) = &a.hamming {
        let (k, ell) = parse_hamming(h)?;
        sources.push(StructureSource::Hamming(k, ell));
    }
    if let Some(s) = &a.structure {
        sources.push(parse_structure(s)?);
    }
    if sources.len() != 1 {
        return Err(config_error("specify exactly one structure source"));
    }
    let diag = if a.standard_laplacian {
        LaplacianDiagonal::DegreeOnly
    } else {
        LaplacianDiagonal::IncludeSelf
    };
    let l = match &sources[0] {
        src @ (StructureSource::Identity | StructureSource::Chain(_)) => {
            let p = a
                .p
                .ok_or_else(|| config_error("--p is required for identity and chain structures"))?;
            build_structure(src, p, a.rho, diag)?
        }
        StructureSource::Genetic(path) => genetic_precision(&GeneticMap::from_path(path, a.rho)?)?,
        StructureSource::Hamming(k, ell) => hamming_laplacian_with(*k, *ell, diag)?,
        StructureSource::File(path) => StructureMatrix::custom(read_matrix_file(path)?)?,
    };
    ensure_dir(&a.out)?;
    write_matrix_file(&a.out.join("L.csv"), "l", &l.values)
}

fn out_dir(cfg: &RunConfig) -> &Path {
    match &cfg.command {
        Command::Fit(a) => &a.data.out,
        Command::Path(a) => &a.data.out,
        Command::Cv(a) => &a.data.out,
        Command::Simulate(a) => &a.out,
        Command::Structure(a) => &a.out,
    }
}

/// Executes one command and writes its artifacts, including `config.json`.
pub fn run(cfg: &RunConfig) -> Result<()> {
    let echo = serde_json::to_string_pretty(cfg).map_err(|e| config_error(e.to_string()))?;
    println!("{echo}");
    match &cfg.command {
        Command::Fit(a) => run_fit(a)?,
        Command::Path(a) => run_path(a)?,
        Command::Cv(a) => run_cv(a)?,
        Command::Simulate(a) => run_simulate(a)?,
        Command::Structure(a) => run_structure(a)?,
    }
    write_text_file(&out_dir(cfg).join("config.json"), &(echo + "\n"))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::Cell { source, .. } => exit_code(source),
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        EXIT_IO => "io",
        EXIT_NUMERICAL => "numerical",
        _ => "config",
    }
}

pub fn error_json(kind: &str, message: &str, code: i32) -> String {
    serde_json::json!({ "error": kind, "message": message, "exit_code": code }).to_string()
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", error_json("config", first, EXIT_CONFIG));
            return EXIT_CONFIG;
        }
    };
    match run(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("{}", error_json(error_kind(&e), &e.to_string(), code));
            code
        }
    }
}
