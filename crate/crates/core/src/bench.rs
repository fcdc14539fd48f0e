//! Experiment harness: node sweeps, init × activation grids, and report
//! emission.
//!
//! Every cell of an experiment trains with its own seed, a stable hash of
//! the master seed and the cell coordinates. Results therefore do not
//! depend on execution order or on the number of worker threads, and the
//! report is assembled in cell order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::activation::ActivationKind;
use crate::datasets::{Dataset, Task};
use crate::error::{Error, Result};
use crate::init::InitScheme;
use crate::slfn::{accuracy, rmse};
use crate::trainers::{Algorithm, TrainSpec, DEFAULT_NOISE_SCALE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Rmse,
    Accuracy,
}

impl MetricKind {
    pub fn for_task(task: Task) -> Self {
        match task {
            Task::Regression => MetricKind::Rmse,
            Task::Classification => MetricKind::Accuracy,
        }
    }
}

/// One trained-and-evaluated cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub nodes: usize,
    pub scheme: String,
    pub activation: String,
    pub metric_kind: MetricKind,
    pub metric: f64,
    pub train_time_s: f64,
    pub test_time_s: f64,
    pub seed: u64,
    pub rep_index: usize,
}

pub const CSV_HEADER: &str =
    "dataset,algorithm,nodes,scheme,activation,metric_kind,metric,train_time_s,test_time_s,seed,rep_index";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

/// Settings shared by every cell of an experiment.
#[derive(Debug, Clone)]
pub struct CellSettings {
    pub noise_scale: f64,
    pub pinv_tol: Option<f64>,
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
}

impl Default for CellSettings {
    fn default() -> Self {
        CellSettings {
            noise_scale: DEFAULT_NOISE_SCALE,
            pinv_tol: None,
            jobs: None,
        }
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit seed for a cell: FNV-1a over the coordinates, finished
/// with a SplitMix64 avalanche.
pub fn cell_seed(master_seed: u64, coordinates: &[&str]) -> u64 {
    let mut h = FNV_OFFSET;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    };
    feed(&master_seed.to_le_bytes());
    for c in coordinates {
        feed(&(c.len() as u64).to_le_bytes());
        feed(c.as_bytes());
    }
    splitmix(h)
}

/// Seed of a node-sweep cell.
pub fn sweep_seed(master_seed: u64, algorithm: Algorithm, nodes: usize, rep: usize) -> u64 {
    cell_seed(
        master_seed,
        &[algorithm.label(), &nodes.to_string(), &rep.to_string()],
    )
}

/// Seed of a grid cell.
pub fn grid_seed(
    master_seed: u64,
    algorithm: Algorithm,
    nodes: usize,
    scheme: InitScheme,
    activation: ActivationKind,
    rep: usize,
) -> u64 {
    cell_seed(
        master_seed,
        &[
            algorithm.label(),
            &nodes.to_string(),
            &scheme.to_string(),
            activation.name(),
            &rep.to_string(),
        ],
    )
}

#[derive(Debug, Clone)]
struct Cell {
    algorithm: Algorithm,
    spec: TrainSpec,
    rep: usize,
}

fn check_pair(train: &Dataset, test: &Dataset) -> Result<()> {
    if train.n_features() != test.n_features() || train.n_outputs() != test.n_outputs() || train.task() != test.task() {
        return Err(Error::config(format!(
            "train set {} ({} features, {} outputs) and test set {} ({} features, {} outputs) are incompatible",
            train.name,
            train.n_features(),
            train.n_outputs(),
            test.name,
            test.n_features(),
            test.n_outputs()
        )));
    }
    Ok(())
}

fn run_cell(train: &Dataset, test: &Dataset, cell: &Cell) -> Result<BenchRow> {
    let outcome = cell.algorithm.train(train, &cell.spec).map_err(|e| tag(e, cell))?;
    let start = Instant::now();
    let pred = outcome.model.predict_raw(test.features()).map_err(|e| tag(e, cell))?;
    let test_time_s = start.elapsed().as_secs_f64();
    let kind = MetricKind::for_task(test.task());
    let metric = match kind {
        MetricKind::Accuracy => accuracy(&pred.class_indices(), &test.class_indices()),
        MetricKind::Rmse => rmse(&pred.raw, test.targets()),
    }
    .map_err(|e| tag(e, cell))?;
    Ok(BenchRow {
        dataset: train.name.clone(),
        algorithm: cell.algorithm,
        nodes: cell.spec.hidden_nodes,
        scheme: cell.spec.scheme.to_string(),
        activation: cell.spec.activation.name().to_string(),
        metric_kind: kind,
        metric,
        train_time_s: outcome.train_time_s,
        test_time_s,
        seed: cell.spec.seed,
        rep_index: cell.rep,
    })
}

fn tag(e: Error, cell: &Cell) -> Error {
    let where_ = format!(
        "{} nodes={} init={} activation={} rep={} seed={}",
        cell.algorithm, cell.spec.hidden_nodes, cell.spec.scheme, cell.spec.activation, cell.rep, cell.spec.seed
    );
    match e {
        Error::Numerical(msg) => Error::Numerical(format!("[{where_}] {msg}")),
        Error::Config(msg) => Error::Config(format!("[{where_}] {msg}")),
        other => other,
    }
}

fn run_cells(train: &Dataset, test: &Dataset, cells: Vec<Cell>, jobs: Option<usize>) -> Result<BenchReport> {
    check_pair(train, test)?;
    let run = || -> Result<Vec<BenchRow>> { cells.par_iter().map(|c| run_cell(train, test, c)).collect() };
    let rows = match jobs {
        Some(0) => return Err(Error::config("jobs must be >= 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    Ok(BenchReport { rows })
}

fn spec_for(nodes: usize, scheme: InitScheme, activation: ActivationKind, seed: u64, settings: &CellSettings) -> TrainSpec {
    let mut spec = TrainSpec::new(nodes, scheme, activation, seed);
    spec.noise_scale = settings.noise_scale;
    spec.pinv_tol = settings.pinv_tol;
    spec
}

/// Trains every `(algorithm, node count, rep)` combination with a fixed
/// scheme and activation, evaluating on `test`.
#[allow(clippy::too_many_arguments)]
pub fn node_sweep(
    train: &Dataset,
    test: &Dataset,
    node_list: &[usize],
    algorithms: &[Algorithm],
    scheme: InitScheme,
    activation: ActivationKind,
    reps: usize,
    master_seed: u64,
    settings: &CellSettings,
) -> Result<BenchReport> {
    if node_list.is_empty() || algorithms.is_empty() {
        return Err(Error::config("node sweep needs at least one node count and one algorithm"));
    }
    if node_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("node counts must be strictly ascending"));
    }
    if node_list[0] == 0 {
        return Err(Error::config("node counts must be >= 1"));
    }
    if reps == 0 {
        return Err(Error::config("reps must be >= 1"));
    }
    let mut cells = Vec::new();
    for &algorithm in algorithms {
        for &nodes in node_list {
            for rep in 0..reps {
                let seed = sweep_seed(master_seed, algorithm, nodes, rep);
                cells.push(Cell {
                    algorithm,
                    spec: spec_for(nodes, scheme, activation, seed, settings),
                    rep,
                });
            }
        }
    }
    run_cells(train, test, cells, settings.jobs)
}

/// Trains the full `scheme × activation × algorithm × rep` cross product at
/// a fixed node count.
#[allow(clippy::too_many_arguments)]
pub fn grid_experiment(
    train: &Dataset,
    test: &Dataset,
    nodes: usize,
    schemes: &[InitScheme],
    activations: &[ActivationKind],
    algorithms: &[Algorithm],
    reps: usize,
    master_seed: u64,
    settings: &CellSettings,
) -> Result<BenchReport> {
    if schemes.is_empty() || activations.is_empty() || algorithms.is_empty() {
        return Err(Error::config("grid needs at least one scheme, activation and algorithm"));
    }
    if nodes == 0 || reps == 0 {
        return Err(Error::config("grid needs nodes >= 1 and reps >= 1"));
    }
    let mut cells = Vec::new();
    for &activation in activations {
        for &scheme in schemes {
            for &algorithm in algorithms {
                for rep in 0..reps {
                    let seed = grid_seed(master_seed, algorithm, nodes, scheme, activation, rep);
                    cells.push(Cell {
                        algorithm,
                        spec: spec_for(nodes, scheme, activation, seed, settings),
                        rep,
                    });
                }
            }
        }
    }
    run_cells(train, test, cells, settings.jobs)
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Medians over repetitions of one `(dataset, algorithm, nodes, scheme,
/// activation)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub nodes: usize,
    pub scheme: String,
    pub activation: String,
    pub metric_kind: MetricKind,
    pub metric: f64,
    pub train_time_s: f64,
    pub test_time_s: f64,
    pub reps: usize,
}

type CellKey = (String, usize, String, String, Algorithm);

impl BenchReport {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Checks the per-row invariants: finite metric, accuracy in `[0, 100]`,
    /// non-negative times.
    pub fn validate(&self) -> Result<()> {
        for (i, r) in self.rows.iter().enumerate() {
            let ok = r.metric.is_finite()
                && (r.metric_kind != MetricKind::Accuracy || (0.0..=100.0).contains(&r.metric))
                && (r.metric_kind != MetricKind::Rmse || r.metric >= 0.0)
                && r.train_time_s >= 0.0
                && r.test_time_s >= 0.0;
            if !ok {
                return Err(Error::Numerical(format!("report row {i} violates metric/time bounds: {r:?}")));
            }
        }
        Ok(())
    }

    /// Median metric and times per cell, in first-appearance order.
    pub fn summarize(&self) -> Vec<CellSummary> {
        let mut order: Vec<CellKey> = Vec::new();
        let mut groups: BTreeMap<CellKey, Vec<&BenchRow>> = BTreeMap::new();
        for r in &self.rows {
            let key = (r.dataset.clone(), r.nodes, r.activation.clone(), r.scheme.clone(), r.algorithm);
            let entry = groups.entry(key.clone()).or_default();
            if entry.is_empty() {
                order.push(key);
            }
            entry.push(r);
        }
        order
            .into_iter()
            .map(|key| {
                let rows = &groups[&key];
                let first = rows[0];
                CellSummary {
                    dataset: first.dataset.clone(),
                    algorithm: first.algorithm,
                    nodes: first.nodes,
                    scheme: first.scheme.clone(),
                    activation: first.activation.clone(),
                    metric_kind: first.metric_kind,
                    metric: median(&mut rows.iter().map(|r| r.metric).collect::<Vec<_>>()),
                    train_time_s: median(&mut rows.iter().map(|r| r.train_time_s).collect::<Vec<_>>()),
                    test_time_s: median(&mut rows.iter().map(|r| r.test_time_s).collect::<Vec<_>>()),
                    reps: rows.len(),
                }
            })
            .collect()
    }

    /// Median metric of one cell, if present.
    pub fn median_metric(&self, algorithm: Algorithm, nodes: usize, scheme: &str, activation: &str) -> Option<f64> {
        let mut v: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.algorithm == algorithm && r.nodes == nodes && r.scheme == scheme && r.activation == activation)
            .map(|r| r.metric)
            .collect();
        (!v.is_empty()).then(|| median(&mut v))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(true).from_writer(w);
        for r in &self.rows {
            wtr.serialize(r).map_err(csv_err)?;
        }
        if self.rows.is_empty() {
            wtr.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
        }
        wtr.flush().map_err(|e| Error::io("<report>", e))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<BenchReport> {
        let mut rdr = csv::Reader::from_reader(r);
        let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(String::from).collect();
        if header.join(",") != CSV_HEADER {
            return Err(Error::Format {
                path: "<report>".into(),
                msg: format!("unexpected header {:?}", header.join(",")),
            });
        }
        let rows = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<BenchRow>, _>>()
            .map_err(csv_err)?;
        Ok(BenchReport { rows })
    }

    /// Pivot in the layout of the published tables: one row per
    /// activation × scheme, with metric and test-time columns for each
    /// algorithm. Metrics are medians over reps with two decimals, times
    /// six decimals. A node column is added when the report spans several
    /// node counts.
    pub fn to_markdown(&self) -> String {
        let summaries = self.summarize();
        let mut algorithms: Vec<Algorithm> = summaries.iter().map(|s| s.algorithm).collect();
        algorithms.sort();
        algorithms.dedup();
        let mut nodes: Vec<usize> = summaries.iter().map(|s| s.nodes).collect();
        nodes.sort_unstable();
        nodes.dedup();
        let with_nodes = nodes.len() > 1;
        let metric_name = match summaries.first().map(|s| s.metric_kind) {
            Some(MetricKind::Rmse) => "RMSE",
            _ => "Acc",
        };

        let mut keys: Vec<(String, usize, String, String)> = Vec::new();
        let mut cells: BTreeMap<(String, usize, String, String, Algorithm), &CellSummary> = BTreeMap::new();
        for s in &summaries {
            let key = (s.dataset.clone(), s.nodes, s.activation.clone(), s.scheme.clone());
            if !keys.contains(&key) {
                keys.push(key.clone());
            }
            cells.insert((key.0, key.1, key.2, key.3, s.algorithm), s);
        }

        let mut out = String::new();
        let mut head = String::from("| Activation | Init |");
        let mut rule = String::from("|---|---|");
        if with_nodes {
            head.push_str(" Nodes |");
            rule.push_str("---:|");
        }
        for a in &algorithms {
            let _ = write!(head, " {a} {metric_name} | {a} Test Time |");
            rule.push_str("---:|---:|");
        }
        let _ = writeln!(out, "{head}");
        let _ = writeln!(out, "{rule}");
        let mut last_activation: Option<&str> = None;
        for key in &keys {
            let act = if last_activation == Some(key.2.as_str()) {
                ""
            } else {
                key.2.as_str()
            };
            last_activation = Some(key.2.as_str());
            let mut line = format!("| {act} | {} |", key.3);
            if with_nodes {
                let _ = write!(line, " {} |", key.1);
            }
            for &a in &algorithms {
                match cells.get(&(key.0.clone(), key.1, key.2.clone(), key.3.clone(), a)) {
                    Some(s) => {
                        let _ = write!(line, " {:.2} | {:.6} |", s.metric, s.test_time_s);
                    }
                    None => line.push_str(" - | - |"),
                }
            }
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format {
        path: "<report>".into(),
        msg: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl ReportFormat {
    /// `.md` selects markdown, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("md") | Some("markdown") => ReportFormat::Markdown,
            _ => ReportFormat::Csv,
        }
    }
}

/// Writes `report` to `path`.
pub fn emit_report(report: &BenchReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if report.is_empty() {
        return Err(Error::config("refusing to write an empty report"));
    }
    match format {
        ReportFormat::Csv => {
            let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
            report.write_csv(std::io::BufWriter::new(file)).map_err(|e| match e {
                Error::Io { source, .. } => Error::io(path, source),
                other => other,
            })
        }
        ReportFormat::Markdown => fs::write(path, report.to_markdown()).map_err(|e| Error::io(path, e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{gen_sinc, split_stratified};
    use crate::init::SeededRng;
    use crate::matrix::Matrix;
    use proptest::prelude::*;

    fn row(algorithm: Algorithm, metric: f64) -> BenchRow {
        BenchRow {
            dataset: "iris".into(),
            algorithm,
            nodes: 6,
            scheme: "ortho".into(),
            activation: "sigmoid".into(),
            metric_kind: MetricKind::Accuracy,
            metric,
            train_time_s: 0.001,
            test_time_s: 0.000_123_4,
            seed: 42,
            rep_index: 0,
        }
    }

    fn toy_classes() -> crate::datasets::SplitPair {
        let mut rng = SeededRng::new(0);
        let mut labels = Vec::new();
        let x = Matrix::from_fn(60, 3, |r, c| {
            if c == 0 {
                labels.push(if r % 3 == 0 { "a" } else if r % 3 == 1 { "b" } else { "c" });
            }
            (r % 3) as f64 * (c as f64 + 1.0) + rng.uniform(-0.5, 0.5)
        });
        let d = Dataset::classification("toy", x, &labels).unwrap();
        split_stratified(&d, 0.7, &mut SeededRng::new(1)).unwrap()
    }

    #[test]
    fn csv_has_fixed_header_and_one_line_per_row() {
        let report = BenchReport {
            rows: vec![row(Algorithm::Elm, 88.888), row(Algorithm::BfElm, 100.0)],
        };
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("iris,ELM,6,ortho,sigmoid,accuracy,88.888,"));
        let back = BenchReport::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn markdown_pivot_single_cell() {
        let report = BenchReport {
            rows: vec![row(Algorithm::Elm, 88.888), row(Algorithm::BfElm, 100.0)],
        };
        let md = report.to_markdown();
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[2],
            "| sigmoid | ortho | 88.89 | 0.000123 | 100.00 | 0.000123 |"
        );
        let numeric = lines[2].split('|').filter(|c| c.trim().parse::<f64>().is_ok()).count();
        assert_eq!(numeric, 4);
    }

    #[test]
    fn emit_rejects_empty_and_unwritable() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_report(&BenchReport::default(), ReportFormat::Csv, dir.path().join("r.csv")).is_err());
        let report = BenchReport {
            rows: vec![row(Algorithm::Elm, 50.0)],
        };
        let err = emit_report(&report, ReportFormat::Csv, dir.path().join("missing/r.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        emit_report(&report, ReportFormat::Markdown, dir.path().join("r.md")).unwrap();
        assert!(fs::read_to_string(dir.path().join("r.md")).unwrap().contains("50.00"));
    }

    #[test]
    fn grid_cardinality() {
        let split = toy_classes();
        let schemes = InitScheme::GRID_DEFAULT;
        let acts = ActivationKind::GRID_DEFAULT;
        let report = grid_experiment(
            &split.train,
            &split.test,
            6,
            &schemes,
            &acts,
            &[Algorithm::Elm, Algorithm::BfElm],
            1,
            3,
            &CellSettings::default(),
        )
        .unwrap();
        assert_eq!(report.len(), 100);
        report.validate().unwrap();
        let md = report.to_markdown();
        assert_eq!(md.lines().count(), 2 + 50);
    }

    #[test]
    fn sweep_is_reproducible_and_thread_count_independent() {
        let split = toy_classes();
        let run = |jobs| {
            node_sweep(
                &split.train,
                &split.test,
                &[1, 2, 4],
                &[Algorithm::Elm, Algorithm::BfElm],
                InitScheme::Orthogonal,
                ActivationKind::Sigmoid,
                2,
                9,
                &CellSettings {
                    jobs: Some(jobs),
                    ..CellSettings::default()
                },
            )
            .unwrap()
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(a.len(), 12);
        let strip = |r: &BenchReport| -> Vec<(Algorithm, usize, usize, u64, f64)> {
            r.rows.iter().map(|x| (x.algorithm, x.nodes, x.rep_index, x.seed, x.metric)).collect()
        };
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn sweep_rejects_bad_node_lists() {
        let split = toy_classes();
        let s = CellSettings::default();
        let go = |nodes: &[usize], reps| {
            node_sweep(&split.train, &split.test, nodes, &[Algorithm::Elm], InitScheme::RAND11, ActivationKind::Tanh, reps, 0, &s)
        };
        assert!(go(&[], 1).is_err());
        assert!(go(&[3, 2], 1).is_err());
        assert!(go(&[0, 2], 1).is_err());
        assert!(go(&[2], 0).is_err());
    }

    #[test]
    fn sweep_regression_reports_rmse() {
        let train = gen_sinc(300, 0.2, -10.0, 10.0, &mut SeededRng::new(1)).unwrap();
        let test = gen_sinc(100, 0.0, -10.0, 10.0, &mut SeededRng::new(2)).unwrap();
        let r = node_sweep(
            &train,
            &test,
            &[5, 10],
            &[Algorithm::BfElm],
            InitScheme::Orthogonal,
            ActivationKind::Sin,
            1,
            0,
            &CellSettings::default(),
        )
        .unwrap();
        assert!(r.rows.iter().all(|x| x.metric_kind == MetricKind::Rmse && x.metric >= 0.0));
        assert!(r.to_markdown().contains("RMSE"));
        assert!(r.to_markdown().contains("Nodes"));
    }

    #[test]
    fn cell_failures_are_tagged() {
        let split = toy_classes();
        let settings = CellSettings {
            noise_scale: -1.0,
            ..CellSettings::default()
        };
        let err = node_sweep(&split.train, &split.test, &[2], &[Algorithm::BfElm], InitScheme::RAND11, ActivationKind::Tanh, 1, 0, &settings)
            .unwrap_err();
        assert!(err.to_string().contains("BF-ELM nodes=2"), "{err}");
    }

    #[test]
    fn seeds_depend_on_every_coordinate() {
        let base = sweep_seed(1, Algorithm::Elm, 10, 0);
        assert_eq!(base, sweep_seed(1, Algorithm::Elm, 10, 0));
        assert_ne!(base, sweep_seed(2, Algorithm::Elm, 10, 0));
        assert_ne!(base, sweep_seed(1, Algorithm::BfElm, 10, 0));
        assert_ne!(base, sweep_seed(1, Algorithm::Elm, 11, 0));
        assert_ne!(base, sweep_seed(1, Algorithm::Elm, 10, 1));
        // "1","23" and "12","3" must not collide
        assert_ne!(cell_seed(0, &["1", "23"]), cell_seed(0, &["12", "3"]));
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    proptest! {
        #[test]
        fn csv_round_trip(metrics in proptest::collection::vec(0.0f64..100.0, 1..8), seed in any::<u64>()) {
            let rows = metrics.iter().enumerate().map(|(i, &m)| BenchRow {
                seed: seed.wrapping_add(i as u64),
                rep_index: i,
                train_time_s: m / 1e4,
                ..row(if i % 2 == 0 { Algorithm::Elm } else { Algorithm::BfElm }, m)
            }).collect();
            let report = BenchReport { rows };
            let mut buf = Vec::new();
            report.write_csv(&mut buf).unwrap();
            prop_assert_eq!(BenchReport::read_csv(buf.as_slice()).unwrap(), report);
        }
    }
}
