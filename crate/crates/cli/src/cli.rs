//! Argument parsing and the non-server subcommands.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use meltmap::api::{self, AxisRange, DegreeChoice, FitRequest, PredictRequest, SweepRequest, TrainRequest};
use meltmap::dataset::{load_csv, FeatureSpec, Field, DEFAULT_SEED, DEFAULT_TEST_FRACTION};
use meltmap::ensembles::{preset, EnsembleConfig, ModelFamily};
use meltmap::polyfit::{feature_importance, SymbolicEquation};
use meltmap::zoo;

use crate::server::DEFAULT_MAX_BODY_BYTES;

/// Exit status for bad input, bad usage, and any modelling error.
pub const EXIT_INPUT: i32 = 2;
/// Exit status for failures unrelated to the input (socket, stdout).
pub const EXIT_RUNTIME: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "meltmap", version, about = "Melt-pool and spatter process maps for laser powder bed fusion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a polynomial equation to a dataset CSV.
    Fit(FitArgs),
    /// Evaluate a zoo model or a saved equation.
    Predict(PredictArgs),
    /// Train a tree ensemble or KNN model on a dataset CSV.
    Train(TrainArgs),
    /// Pearson correlation matrix of a dataset's columns.
    Correlate(CorrelateArgs),
    /// Rank an equation's terms by share of absolute coefficient.
    Importance(ImportanceArgs),
    /// Evaluate models over a power by velocity grid, as JSON.
    Sweep(SweepArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset CSV.
    pub data: PathBuf,
    /// Comma-separated input features, e.g. `Power,Velocity,log_Velocity`.
    #[arg(long, default_value = "Power,Velocity")]
    pub inputs: String,
    /// Target field, e.g. `depth` or `spatter`.
    #[arg(long)]
    pub target: String,
    #[arg(long, default_value_t = DEFAULT_TEST_FRACTION)]
    pub test_fraction: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Polynomial degree, or `auto` to pick by test R².
    #[arg(long, default_value = "auto")]
    pub degree: DegreeChoice,
    /// Split seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the equation JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the full result as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ModelSource {
    /// Zoo model id.
    #[arg(long, conflicts_with = "equation", required_unless_present = "equation")]
    pub zoo: Option<String>,
    /// Equation JSON file.
    #[arg(long)]
    pub equation: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Laser power (W).
    #[arg(short = 'P', long)]
    pub power: Option<f64>,
    /// Scan velocity (mm/s).
    #[arg(short = 'V', long)]
    pub velocity: Option<f64>,
    /// Melt-pool length (µm).
    #[arg(short = 'L', long)]
    pub length: Option<f64>,
    /// Melt-pool width (µm).
    #[arg(short = 'W', long)]
    pub width: Option<f64>,
    /// Melt-pool depth (µm).
    #[arg(short = 'D', long)]
    pub depth: Option<f64>,
    /// Extra input as `name=value`; may repeat.
    #[arg(long = "input", value_parser = parse_key_value)]
    pub inputs: Vec<(String, f64)>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Model family: random_forest, extra_trees, bagging, gradient_boost, knn.
    #[arg(long)]
    pub family: ModelFamily,
    /// Start from the published hyperparameters for this input set and target.
    #[arg(long)]
    pub preset: bool,
    #[arg(long)]
    pub n_estimators: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub n_neighbors: Option<usize>,
    /// Learning rate, gradient boosting only (default 0.1).
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub min_leaf: Option<usize>,
    /// Model seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Split seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub split_seed: u64,
    /// Write the fitted model JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    pub data: PathBuf,
    /// Comma-separated fields; default is every non-constant column.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[command(flatten)]
    pub source: ModelSource,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Power range `min:max` (W).
    #[arg(long, default_value = "50:500")]
    pub power: AxisRange,
    /// Velocity range `min:max` (mm/s).
    #[arg(long, default_value = "100:2000")]
    pub velocity: AxisRange,
    /// Grid points per axis.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    /// Zoo model ids, comma-separated or repeated.
    #[arg(long = "model", value_delimiter = ',')]
    pub models: Vec<String>,
    /// Extra equation JSON, reported under the key `equation`.
    #[arg(long)]
    pub equation: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "MELTMAP_HOST", default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, env = "MELTMAP_PORT", default_value_t = 8080)]
    pub port: u16,
    /// Serve static UI assets from this directory.
    #[arg(long)]
    pub ui: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_BODY_BYTES)]
    pub max_body_bytes: usize,
}

fn parse_key_value(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl From<meltmap::Error> for CliError {
    fn from(e: meltmap::Error) -> Self {
        CliError { exit_code: EXIT_INPUT, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { exit_code: EXIT_RUNTIME, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { exit_code: EXIT_INPUT, message: message.into() }
}

type CliResult = Result<(), CliError>;

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialisable")
}

/// Runs every subcommand except `serve`.
pub fn run(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Fit(a) => fit(a, out),
        Command::Predict(a) => predict(a, out),
        Command::Train(a) => train(a, out),
        Command::Correlate(a) => correlate(a, out),
        Command::Importance(a) => importance(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Serve(_) => Err(usage("`serve` is not handled by run")),
    }
}

fn fit(a: FitArgs, out: &mut dyn Write) -> CliResult {
    let ds = load_csv(&a.data.data)?;
    let req = FitRequest {
        inputs: a.data.inputs,
        target: a.data.target,
        degree: a.degree,
        test_fraction: a.data.test_fraction,
        seed: a.seed,
    };
    let res = api::fit(&ds, &req)?;
    if let Some(path) = &a.out {
        res.equation.save(path)?;
    }
    if a.json {
        writeln!(out, "{}", to_json(&res))?;
        return Ok(());
    }
    let r = &res.report;
    writeln!(out, "equation   {}", res.equation_text)?;
    writeln!(out, "degree     {}", res.degree)?;
    writeln!(out, "r2_train   {:.6}", r.r2_train)?;
    writeln!(out, "r2_test    {:.6}", r.r2_test)?;
    writeln!(out, "mae_train  {:.6e}", r.mae_train)?;
    writeln!(out, "mae_test   {:.6e}", r.mae_test)?;
    if res.degree_reports.len() > 1 {
        writeln!(out, "\ndegree  r2_train  r2_test")?;
        for d in &res.degree_reports {
            writeln!(out, "{:<6}  {:.6}  {:.6}", d.degree, d.report.r2_train, d.report.r2_test)?;
        }
    }
    Ok(())
}

fn load_source(src: &ModelSource) -> Result<(Option<String>, Option<SymbolicEquation>), CliError> {
    match (&src.zoo, &src.equation) {
        (Some(id), None) => {
            zoo::get(id)?;
            Ok((Some(id.clone()), None))
        }
        (None, Some(path)) => Ok((None, Some(SymbolicEquation::load(path)?))),
        _ => Err(usage("give exactly one of --zoo or --equation")),
    }
}

fn predict(a: PredictArgs, out: &mut dyn Write) -> CliResult {
    let (model_id, equation) = load_source(&a.source)?;
    let mut inputs = BTreeMap::new();
    let named = [
        (Field::Power, a.power),
        (Field::Velocity, a.velocity),
        (Field::Length, a.length),
        (Field::Width, a.width),
        (Field::Depth, a.depth),
    ];
    for (f, v) in named {
        if let Some(v) = v {
            inputs.insert(f.key().to_string(), v);
        }
    }
    for (k, v) in a.inputs {
        if inputs.insert(k.clone(), v).is_some() {
            return Err(usage(format!("input `{k}` given twice")));
        }
    }
    let resp = api::predict(&PredictRequest { model_id, equation, inputs })?;
    if a.json {
        writeln!(out, "{}", to_json(&resp))?;
    } else {
        for w in &resp.warnings {
            eprintln!("warning: {w}");
        }
        writeln!(out, "{}", resp.prediction)?;
    }
    Ok(())
}

fn train(a: TrainArgs, out: &mut dyn Write) -> CliResult {
    let family = a.family;
    let mut config = if a.preset {
        let spec = FeatureSpec::parse_list(&a.data.inputs)?;
        preset(family, &spec, a.data.target.parse()?)?
    } else if family == ModelFamily::Knn {
        EnsembleConfig::knn(a.n_neighbors.ok_or_else(|| usage("knn needs --n-neighbors (or --preset)"))?)
    } else {
        let n = a.n_estimators.ok_or_else(|| usage(format!("{family} needs --n-estimators (or --preset)")))?;
        let d = a.max_depth.ok_or_else(|| usage(format!("{family} needs --max-depth (or --preset)")))?;
        EnsembleConfig::trees(family, n, d)
    };
    config.n_estimators = a.n_estimators.or(config.n_estimators);
    config.max_depth = a.max_depth.or(config.max_depth);
    config.n_neighbors = a.n_neighbors.or(config.n_neighbors);
    config.learning_rate = a.lr.or(config.learning_rate);
    config.min_leaf = a.min_leaf.unwrap_or(config.min_leaf);
    config.seed = a.seed;

    let ds = load_csv(&a.data.data)?;
    let req = TrainRequest {
        inputs: a.data.inputs,
        target: a.data.target,
        config,
        test_fraction: a.data.test_fraction,
        split_seed: a.split_seed,
    };
    let res = api::train(&ds, &req)?;
    if let Some(path) = &a.out {
        std::fs::write(path, res.model.to_json())
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if a.json {
        let body = serde_json::json!({ "config": res.model.config, "report": res.report });
        writeln!(out, "{}", to_json(&body))?;
        return Ok(());
    }
    let r = &res.report;
    writeln!(out, "model      {}", serde_json::to_string(&res.model.config).expect("serialisable"))?;
    writeln!(out, "features   {}", res.feature_names.join(","))?;
    writeln!(out, "r2_train   {:.6}", r.r2_train)?;
    writeln!(out, "r2_test    {:.6}", r.r2_test)?;
    writeln!(out, "mae_train  {:.6e}", r.mae_train)?;
    writeln!(out, "mae_test   {:.6e}", r.mae_test)?;
    Ok(())
}

fn correlate(a: CorrelateArgs, out: &mut dyn Write) -> CliResult {
    let ds = load_csv(&a.data)?;
    let rep = api::correlate(&ds, &a.columns)?;
    if a.json {
        writeln!(out, "{}", to_json(&rep))?;
        return Ok(());
    }
    let names = &rep.correlation.names;
    let w = names.iter().map(|n| n.len()).max().unwrap_or(0).max(9);
    write!(out, "{:w$}", "")?;
    for n in names {
        write!(out, "  {n:>w$}")?;
    }
    writeln!(out)?;
    for (i, n) in names.iter().enumerate() {
        write!(out, "{n:<w$}")?;
        for j in 0..names.len() {
            write!(out, "  {:>w$.6}", rep.correlation.matrix.get(i, j))?;
        }
        writeln!(out)?;
    }
    if !rep.skipped.is_empty() {
        eprintln!("skipped constant columns: {}", rep.skipped.join(", "));
    }
    Ok(())
}

fn importance(a: ImportanceArgs, out: &mut dyn Write) -> CliResult {
    let eq = match load_source(&a.source)? {
        (Some(id), _) => zoo::get(&id)?.equation.clone(),
        (None, Some(eq)) => eq,
        (None, None) => unreachable!("load_source returns a model"),
    };
    let rep = feature_importance(&eq)?;
    if a.json {
        writeln!(out, "{}", to_json(&rep))?;
    } else {
        write!(out, "{}", rep.to_table())?;
    }
    Ok(())
}

fn sweep(a: SweepArgs, out: &mut dyn Write) -> CliResult {
    let equation = a.equation.as_ref().map(SymbolicEquation::load).transpose()?;
    let req = SweepRequest {
        power: a.power,
        velocity: a.velocity,
        resolution: a.resolution,
        models: a.models,
        equation,
    };
    let grid = api::sweep(&req)?;
    writeln!(out, "{}", api::sweep_json(&grid))?;
    Ok(())
}
