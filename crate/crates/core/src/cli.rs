//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage and I/O errors, 2 for numerical
//! failures.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::activation::ActivationKind;
use crate::bench::{emit_report, grid_experiment, node_sweep, BenchReport, CellSettings, MetricKind, ReportFormat};
use crate::datasets::{
    fit_scaler, gen_sinc, load_csv, split_head, split_random, split_stratified, CsvOptions, Dataset, LabelColumn,
    Scaler, Task,
};
use crate::error::{Error, Result};
use crate::init::{InitScheme, SeededRng};
use crate::matrix::Matrix;
use crate::slfn::{accuracy, rmse, ModelFile};
use crate::trainers::{evaluate, Algorithm, TrainSpec, DEFAULT_NOISE_SCALE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bfelm", version, about = "ELM and backward-forward ELM for single-hidden-layer networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one model and write it to a model file
    Train(TrainArgs),
    /// Apply a saved model to a data file
    Predict(PredictArgs),
    /// Sweep the hidden-node count for fixed init and activation
    Sweep(SweepArgs),
    /// Cross every init scheme with every activation at a fixed node count
    Grid(GridArgs),
    /// Generate a sinc regression data set as CSV
    GenSinc(GenSincArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LabelColumnArg {
    First,
    Last,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TaskArg {
    Reg,
    Cls,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Training data file (or the only data file when splitting)
    #[arg(long)]
    pub data: PathBuf,
    /// Separate test data file
    #[arg(long, conflicts_with_all = ["split", "split_head"])]
    pub test: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "last")]
    pub label_column: LabelColumnArg,
    /// The data files start with a header row
    #[arg(long)]
    pub header: bool,
    /// Field delimiter (a single character; use ' ' for space-separated files)
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,
    /// Skip min-max feature scaling
    #[arg(long)]
    pub no_scale: bool,
    /// Train fraction for a random split (stratified for classification)
    #[arg(long, value_parser = parse_fraction, conflicts_with = "split_head")]
    pub split: Option<f64>,
    /// Use the first <COUNT> rows for training and the rest for testing
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub split_head: Option<u64>,
    #[arg(long, value_enum, default_value = "cls")]
    pub task: TaskArg,
    /// Master seed; a time-based seed is chosen and printed when omitted
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Hidden-layer width
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub nodes: u64,
    #[arg(long = "init", default_value = "ortho", value_parser = parse_scheme)]
    pub init: InitScheme,
    #[arg(long, default_value = "sigmoid", value_parser = parse_activation)]
    pub activation: ActivationKind,
    /// Half-width of the backward-pass noise
    #[arg(long, default_value_t = DEFAULT_NOISE_SCALE, value_parser = parse_nonneg)]
    pub noise_scale: f64,
    /// Pseudoinverse singular-value cutoff (default: numerical-rank rule)
    #[arg(long, value_parser = parse_nonneg)]
    pub pinv_tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long, default_value = "bfelm", value_parser = parse_algorithm)]
    pub algo: Algorithm,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Where to write the model file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    /// Model file written by `train`
    #[arg(long)]
    pub model: PathBuf,
    /// Data file: feature columns only, or features plus one label column
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value = "last")]
    pub label_column: LabelColumnArg,
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,
    /// Where to write the predictions CSV
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "elm,bfelm", value_delimiter = ',', value_parser = parse_algorithm)]
    pub algos: Vec<Algorithm>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = DEFAULT_NOISE_SCALE, value_parser = parse_nonneg)]
    pub noise_scale: f64,
    #[arg(long, value_parser = parse_nonneg)]
    pub pinv_tol: Option<f64>,
    /// Worker threads (default: all available cores)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Report path; `.md` writes a markdown table, anything else CSV
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Node counts: `start:stop:step` (inclusive) or a comma list
    #[arg(long, value_parser = parse_node_list)]
    pub nodes: NodeList,
    #[arg(long = "init", default_value = "ortho", value_parser = parse_scheme)]
    pub init: InitScheme,
    #[arg(long, default_value = "sigmoid", value_parser = parse_activation)]
    pub activation: ActivationKind,
    #[command(flatten)]
    pub bench: BenchArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub nodes: u64,
    #[arg(long, default_value = "ortho,rand01,rand11,xavier,relu", value_delimiter = ',', value_parser = parse_scheme)]
    pub inits: Vec<InitScheme>,
    #[arg(
        long,
        default_value = "linear,relu,sigmoid,tanh,softsign,sin,cos,leakyrelu,bentide,arctan",
        value_delimiter = ',',
        value_parser = parse_activation
    )]
    pub activations: Vec<ActivationKind>,
    #[command(flatten)]
    pub bench: BenchArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenSincArgs {
    #[arg(long, default_value_t = 5000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Half-width of the uniform noise added to y
    #[arg(long, default_value_t = 0.0, value_parser = parse_nonneg)]
    pub noise: f64,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub low: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub high: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parsed node-count list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeList(pub Vec<usize>);

fn parse_scheme(s: &str) -> std::result::Result<InitScheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_activation(s: &str) -> std::result::Result<ActivationKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_fraction(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("fraction must be in (0, 1), got {v}"))
    }
}

fn parse_nonneg(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("value must be finite and >= 0, got {v}"))
    }
}

fn parse_delimiter(s: &str) -> std::result::Result<u8, String> {
    match s.as_bytes() {
        [b] => Ok(*b),
        _ if s == "\\t" || s == "tab" => Ok(b'\t'),
        _ => Err(format!("delimiter must be a single byte, got {s:?}")),
    }
}

/// `start:stop:step` (inclusive of `stop` when reached) or `a,b,c`.
pub fn parse_node_list(s: &str) -> std::result::Result<NodeList, String> {
    let nodes: Vec<usize> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("bad node count {p:?} in {s:?}"));
        let (start, stop, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(format!("node range must be start:stop[:step], got {s:?}")),
        };
        if step == 0 || start > stop {
            return Err(format!("empty node range {s:?}"));
        }
        (start..=stop).step_by(step).collect()
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad node count {p:?}")))
            .collect::<std::result::Result<_, _>>()?
    };
    if nodes.is_empty() || nodes.contains(&0) {
        return Err("node counts must be >= 1".into());
    }
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("node counts must be strictly ascending, got {nodes:?}"));
    }
    Ok(NodeList(nodes))
}

impl From<LabelColumnArg> for LabelColumn {
    fn from(l: LabelColumnArg) -> Self {
        match l {
            LabelColumnArg::First => LabelColumn::First,
            LabelColumnArg::Last => LabelColumn::Last,
        }
    }
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Reg => Task::Regression,
            TaskArg::Cls => Task::Classification,
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0)
    })
}

/// Train/test data after splitting and scaling.
struct Prepared {
    train: Dataset,
    test: Option<Dataset>,
    scaler: Option<Scaler>,
}

fn prepare(args: &DataArgs, seed: u64) -> Result<Prepared> {
    let options = CsvOptions {
        label_column: args.label_column.into(),
        has_header: args.header,
        task: args.task.into(),
        delimiter: args.delimiter,
    };
    let data = load_csv(&args.data, options)?;
    let (train, test) = if let Some(test_path) = &args.test {
        let mut test = load_csv(test_path, options)?;
        if test.task() == Task::Classification {
            test = test.with_class_order(data.class_labels())?;
        }
        (data, Some(test))
    } else if let Some(frac) = args.split {
        // the split draws from its own stream so training seeds stay comparable
        let mut rng = SeededRng::new(seed ^ SPLIT_STREAM);
        let pair = match data.task() {
            Task::Classification => split_stratified(&data, frac, &mut rng)?,
            Task::Regression => split_random(&data, frac, &mut rng)?,
        };
        (pair.train, Some(pair.test))
    } else if let Some(count) = args.split_head {
        let pair = split_head(&data, count as usize)?;
        (pair.train, Some(pair.test))
    } else {
        (data, None)
    };
    if let Some(test) = &test {
        if test.n_features() != train.n_features() {
            return Err(Error::config(format!(
                "train data has {} features but test data has {}",
                train.n_features(),
                test.n_features()
            )));
        }
    }
    if args.no_scale {
        return Ok(Prepared {
            train,
            test,
            scaler: None,
        });
    }
    let scaler = fit_scaler(train.features())?;
    let train = train.with_features(scaler.apply(train.features())?)?;
    let test = match test {
        Some(t) => Some(t.with_features(scaler.apply(t.features())?)?),
        None => None,
    };
    Ok(Prepared {
        train,
        test,
        scaler: Some(scaler),
    })
}

const SPLIT_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

fn metric_name(task: Task) -> &'static str {
    match task {
        Task::Classification => "accuracy",
        Task::Regression => "rmse",
    }
}

fn data_config(args: &DataArgs, seed: u64) -> String {
    let split = match (&args.test, args.split, args.split_head) {
        (Some(t), _, _) => format!("test={}", t.display()),
        (_, Some(f), _) => format!("split={f}"),
        (_, _, Some(c)) => format!("split_head={c}"),
        _ => "test=none".into(),
    };
    format!(
        "data={} {split} label_column={:?} header={} scale={} task={:?} seed={seed}",
        args.data.display(),
        args.label_column,
        args.header,
        !args.no_scale,
        args.task
    )
    .to_lowercase()
}

fn pinv_tol_text(t: Option<f64>) -> String {
    t.map_or_else(|| "default".into(), |v| v.to_string())
}

pub fn run_train(args: &TrainArgs) -> Result<()> {
    let seed = resolve_seed(args.data.seed);
    println!(
        "config: command=train algo={} nodes={} init={} activation={} noise_scale={} pinv_tol={} {}",
        args.algo.label().to_lowercase(),
        args.model.nodes,
        args.model.init,
        args.model.activation,
        args.model.noise_scale,
        pinv_tol_text(args.model.pinv_tol),
        data_config(&args.data, seed)
    );
    let prepared = prepare(&args.data, seed)?;
    let mut spec = TrainSpec::new(args.model.nodes as usize, args.model.init, args.model.activation, seed);
    spec.noise_scale = args.model.noise_scale;
    spec.pinv_tol = args.model.pinv_tol;
    let outcome = args.algo.train(&prepared.train, &spec)?;
    let task = prepared.train.task();
    let test_metric = match &prepared.test {
        Some(t) => Some(evaluate(&outcome.model, t)?),
        None => None,
    };
    ModelFile::new(outcome.model.clone(), prepared.scaler).save(&args.out)?;

    let name = metric_name(task);
    println!(
        "result: algo={} nodes={} metric={name} train={:.6} test={} train_time_s={:.6} model={}",
        args.algo.label().to_lowercase(),
        args.model.nodes,
        outcome.training_metric,
        test_metric.map_or_else(|| "none".into(), |v| format!("{v:.6}")),
        outcome.train_time_s,
        args.out.display()
    );
    let unit = if task == Task::Classification { "%" } else { "" };
    println!(
        "{} with {} hidden nodes trained on {} samples in {:.4} s; training {name} {:.2}{unit}{}",
        args.algo,
        args.model.nodes,
        prepared.train.n_samples(),
        outcome.train_time_s,
        outcome.training_metric,
        test_metric.map_or_else(String::new, |v| format!(", test {name} {v:.2}{unit}"))
    );
    Ok(())
}

pub fn run_predict(args: &PredictArgs) -> Result<()> {
    let file = ModelFile::load(&args.model)?;
    let model = &file.model;
    println!(
        "config: command=predict model={} data={} label_column={:?} header={}",
        args.model.display(),
        args.data.display(),
        args.label_column,
        args.header
    );
    let (features, truth) = read_predict_input(args, model.feature_dim())?;
    let x = match &file.scaler {
        Some(s) => s.apply(&features)?,
        None => features,
    };
    let pred = model.predict_raw(&x)?;

    let out = fs::File::create(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut wtr = csv::Writer::from_writer(std::io::BufWriter::new(out));
    let write_err = |e: csv::Error| Error::Format {
        path: args.out.clone(),
        msg: e.to_string(),
    };
    let mut header: Vec<String> = Vec::new();
    if pred.labels.is_some() {
        header.push("label".into());
    }
    header.extend((0..pred.raw.cols()).map(|k| format!("output_{k}")));
    wtr.write_record(&header).map_err(write_err)?;
    for r in 0..pred.raw.rows() {
        let mut rec: Vec<String> = Vec::new();
        if let Some(labels) = &pred.labels {
            rec.push(labels[r].clone());
        }
        rec.extend(pred.raw.row(r).iter().map(|v| v.to_string()));
        wtr.write_record(&rec).map_err(write_err)?;
    }
    wtr.flush().map_err(|e| Error::io(&args.out, e))?;

    let mut summary = format!("result: samples={} out={}", pred.raw.rows(), args.out.display());
    if let Some(truth) = truth {
        match (&pred.labels, model.class_labels()) {
            (Some(labels), Some(_)) => {
                let acc = accuracy(labels, &truth)?;
                summary.push_str(&format!(" metric=accuracy value={acc:.6}"));
            }
            _ => {
                let values: Vec<f64> = truth
                    .iter()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| Error::config(format!("non-numeric target {t:?} for a regression model")))
                    })
                    .collect::<Result<_>>()?;
                let target = Matrix::new(values.len(), 1, values)?;
                if pred.raw.cols() == 1 {
                    let e = rmse(&pred.raw, &target)?;
                    summary.push_str(&format!(" metric=rmse value={e:.6}"));
                }
            }
        }
    }
    println!("{summary}");
    Ok(())
}

/// Reads a predict input file. A file with exactly `feature_dim` columns is
/// all features; one extra column is taken as the label column.
fn read_predict_input(args: &PredictArgs, feature_dim: usize) -> Result<(Matrix, Option<Vec<String>>)> {
    let path = &args.data;
    let text = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(args.header)
        .delimiter(args.delimiter)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_slice());
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0;
    let mut has_label = None;
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path.clone(),
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let labelled = match record.len() {
            n if n == feature_dim => false,
            n if n == feature_dim + 1 => true,
            n => {
                return Err(Error::Parse {
                    path: path.clone(),
                    line,
                    msg: format!("{n} fields; model expects {feature_dim} features (plus an optional label)"),
                })
            }
        };
        if *has_label.get_or_insert(labelled) != labelled {
            return Err(Error::Parse {
                path: path.clone(),
                line,
                msg: "inconsistent field count".into(),
            });
        }
        let label_idx = match (labelled, args.label_column) {
            (false, _) => usize::MAX,
            (true, LabelColumnArg::First) => 0,
            (true, LabelColumnArg::Last) => feature_dim,
        };
        for (i, field) in record.iter().enumerate() {
            if i == label_idx {
                labels.push(field.to_string());
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.clone(),
                line,
                msg: format!("non-numeric feature {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    path: path.clone(),
                    line,
                    msg: format!("non-finite feature {field:?}"),
                });
            }
            features.push(v);
        }
        rows += 1;
    }
    let x = Matrix::new(rows, feature_dim, features)?;
    Ok((x, has_label.unwrap_or(false).then_some(labels)))
}

fn cell_settings(b: &BenchArgs) -> CellSettings {
    CellSettings {
        noise_scale: b.noise_scale,
        pinv_tol: b.pinv_tol,
        jobs: Some(
            b.jobs
                .map(|j| j as usize)
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        ),
    }
}

fn require_test(p: &Prepared) -> Result<&Dataset> {
    p.test
        .as_ref()
        .ok_or_else(|| Error::config("sweep and grid need test data: pass --test, --split or --split-head"))
}

fn algos_text(algos: &[Algorithm]) -> String {
    algos.iter().map(|a| a.label().to_lowercase()).collect::<Vec<_>>().join(",")
}

fn write_report(report: &BenchReport, out: &Path) -> Result<()> {
    report.validate()?;
    emit_report(report, ReportFormat::from_path(out), out)?;
    for s in report.summarize() {
        println!(
            "summary: algo={} nodes={} init={} activation={} median_{}={:.4} median_train_time_s={:.6} median_test_time_s={:.6} reps={}",
            s.algorithm.label().to_lowercase(),
            s.nodes,
            s.scheme,
            s.activation,
            metric_name(match s.metric_kind {
                MetricKind::Accuracy => Task::Classification,
                MetricKind::Rmse => Task::Regression,
            }),
            s.metric,
            s.train_time_s,
            s.test_time_s,
            s.reps
        );
    }
    println!("result: rows={} out={}", report.len(), out.display());
    Ok(())
}

pub fn run_sweep(args: &SweepArgs) -> Result<()> {
    let seed = resolve_seed(args.data.seed);
    let settings = cell_settings(&args.bench);
    println!(
        "config: command=sweep algos={} nodes={:?} init={} activation={} reps={} noise_scale={} pinv_tol={} jobs={} master_seed={seed} {}",
        algos_text(&args.bench.algos),
        args.nodes.0,
        args.init,
        args.activation,
        args.bench.reps,
        settings.noise_scale,
        pinv_tol_text(settings.pinv_tol),
        settings.jobs.unwrap_or(1),
        data_config(&args.data, seed)
    );
    let prepared = prepare(&args.data, seed)?;
    let test = require_test(&prepared)?;
    let report = node_sweep(
        &prepared.train,
        test,
        &args.nodes.0,
        &args.bench.algos,
        args.init,
        args.activation,
        args.bench.reps as usize,
        seed,
        &settings,
    )?;
    write_report(&report, &args.bench.out)
}

pub fn run_grid(args: &GridArgs) -> Result<()> {
    let seed = resolve_seed(args.data.seed);
    let settings = cell_settings(&args.bench);
    let inits: Vec<String> = args.inits.iter().map(|s| s.to_string()).collect();
    let acts: Vec<&str> = args.activations.iter().map(|a| a.name()).collect();
    println!(
        "config: command=grid algos={} nodes={} inits={} activations={} reps={} noise_scale={} pinv_tol={} jobs={} master_seed={seed} {}",
        algos_text(&args.bench.algos),
        args.nodes,
        inits.join(","),
        acts.join(","),
        args.bench.reps,
        settings.noise_scale,
        pinv_tol_text(settings.pinv_tol),
        settings.jobs.unwrap_or(1),
        data_config(&args.data, seed)
    );
    let prepared = prepare(&args.data, seed)?;
    let test = require_test(&prepared)?;
    let report = grid_experiment(
        &prepared.train,
        test,
        args.nodes as usize,
        &args.inits,
        &args.activations,
        &args.bench.algos,
        args.bench.reps as usize,
        seed,
        &settings,
    )?;
    write_report(&report, &args.bench.out)
}

pub fn run_gensinc(args: &GenSincArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    println!(
        "config: command=gen-sinc n={} noise={} low={} high={} seed={seed} out={}",
        args.n,
        args.noise,
        args.low,
        args.high,
        args.out.display()
    );
    let data = gen_sinc(args.n as usize, args.noise, args.low, args.high, &mut SeededRng::new(seed))?;
    let file = fs::File::create(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut wtr = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let write_err = |e: csv::Error| Error::Format {
        path: args.out.clone(),
        msg: e.to_string(),
    };
    wtr.write_record(["x", "y"]).map_err(write_err)?;
    for r in 0..data.n_samples() {
        wtr.write_record([data.features().get(r, 0).to_string(), data.targets().get(r, 0).to_string()])
            .map_err(write_err)?;
    }
    wtr.flush().map_err(|e| Error::io(&args.out, e))?;
    println!("result: rows={} out={}", data.n_samples(), args.out.display());
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Train(a) => run_train(a),
        Command::Predict(a) => run_predict(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Grid(a) => run_grid(a),
        Command::GenSinc(a) => run_gensinc(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}
