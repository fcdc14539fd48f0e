//! Dataset ingestion, synthesis, splitting and feature scaling.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::init::SeededRng;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    Regression,
    Classification,
}

/// Features, targets and task metadata.
///
/// For classification the targets are one-hot rows over `class_labels`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    features: Matrix,
    targets: Matrix,
    task: Task,
    class_labels: Vec<String>,
}

impl Dataset {
    pub fn regression(name: impl Into<String>, features: Matrix, targets: Matrix) -> Result<Self> {
        check_rows(&features, &targets)?;
        Ok(Dataset {
            name: name.into(),
            features,
            targets,
            task: Task::Regression,
            class_labels: Vec::new(),
        })
    }

    /// Classification dataset from per-sample labels; classes are ordered by
    /// first appearance.
    pub fn classification<S: AsRef<str>>(name: impl Into<String>, features: Matrix, labels: &[S]) -> Result<Self> {
        let mut class_labels: Vec<String> = Vec::new();
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut ids = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            let next = index.len();
            let id = *index.entry(l).or_insert_with(|| {
                class_labels.push(l.to_string());
                next
            });
            ids.push(id);
        }
        Dataset::from_class_indices(name, features, &ids, class_labels)
    }

    /// Classification dataset from class indices into `class_labels`.
    pub fn from_class_indices(
        name: impl Into<String>,
        features: Matrix,
        ids: &[usize],
        class_labels: Vec<String>,
    ) -> Result<Self> {
        let c = class_labels.len();
        if let Some(bad) = ids.iter().find(|&&i| i >= c) {
            return Err(Error::config(format!("class index {bad} out of range for {c} classes")));
        }
        let targets = Matrix::from_fn(ids.len(), c, |r, k| if ids[r] == k { 1.0 } else { 0.0 });
        check_rows(&features, &targets)?;
        Ok(Dataset {
            name: name.into(),
            features,
            targets,
            task: Task::Classification,
            class_labels,
        })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn targets(&self) -> &Matrix {
        &self.targets
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    pub fn n_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn n_outputs(&self) -> usize {
        self.targets.cols()
    }

    /// Class index of every sample (argmax of the one-hot row).
    pub fn class_indices(&self) -> Vec<usize> {
        (0..self.n_samples()).map(|r| argmax(self.targets.row(r))).collect()
    }

    /// Class label of every sample (empty for regression).
    pub fn labels(&self) -> Vec<String> {
        if self.task != Task::Classification {
            return Vec::new();
        }
        self.class_indices()
            .into_iter()
            .map(|i| self.class_labels[i].clone())
            .collect()
    }

    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: self.features.select_rows(indices),
            targets: self.targets.select_rows(indices),
            task: self.task,
            class_labels: self.class_labels.clone(),
        }
    }

    /// Same dataset with replaced features (e.g. after scaling).
    pub fn with_features(&self, features: Matrix) -> Result<Dataset> {
        check_rows(&features, &self.targets)?;
        Ok(Dataset {
            features,
            ..self.clone()
        })
    }

    /// Re-encodes the targets over `order`, which must contain every label of
    /// this dataset. Used to give a separately loaded test file the class
    /// order of its training file.
    pub fn with_class_order(&self, order: &[String]) -> Result<Dataset> {
        if self.task != Task::Classification {
            return Err(Error::config("class order only applies to classification data"));
        }
        let ids = self
            .labels()
            .iter()
            .map(|l| {
                order
                    .iter()
                    .position(|o| o == l)
                    .ok_or_else(|| Error::config(format!("label {l:?} of {} is not a training class", self.name)))
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::from_class_indices(self.name.clone(), self.features.clone(), &ids, order.to_vec())
    }
}

fn check_rows(features: &Matrix, targets: &Matrix) -> Result<()> {
    if features.rows() != targets.rows() {
        return Err(Error::Shape {
            op: "Dataset",
            left: features.shape(),
            right: targets.shape(),
        });
    }
    if features.rows() == 0 {
        return Err(Error::config("dataset has no samples"));
    }
    Ok(())
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Train/test partition.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
}

/// `y = sinc(x) + U[-noise, noise]` with `x ~ U[x_low, x_high]`.
pub fn gen_sinc(n: usize, noise_halfwidth: f64, x_low: f64, x_high: f64, rng: &mut SeededRng) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::config("gen_sinc needs n >= 1"));
    }
    if !x_low.is_finite() || !x_high.is_finite() || x_low >= x_high {
        return Err(Error::config(format!("gen_sinc needs x_low < x_high, got [{x_low}, {x_high}]")));
    }
    if !(noise_halfwidth >= 0.0 && noise_halfwidth.is_finite()) {
        return Err(Error::config(format!("noise half-width must be >= 0, got {noise_halfwidth}")));
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.uniform(x_low, x_high);
        let e = if noise_halfwidth > 0.0 {
            rng.uniform(-noise_halfwidth, noise_halfwidth)
        } else {
            0.0
        };
        xs.push(x);
        ys.push(ActivationKind::Sinc.eval(x) + e);
    }
    Dataset::regression("sinc", Matrix::new(n, 1, xs)?, Matrix::new(n, 1, ys)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    First,
    Last,
}

#[derive(Debug, Clone, Copy)]
pub struct CsvOptions {
    pub label_column: LabelColumn,
    pub has_header: bool,
    pub task: Task,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            label_column: LabelColumn::Last,
            has_header: false,
            task: Task::Classification,
            delimiter: b',',
        }
    }
}

/// Loads a delimited text file with one label column and numeric features.
/// Rows keep their file order.
pub fn load_csv(path: impl AsRef<Path>, options: CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, path, options)
}

fn read_csv<R: std::io::Read>(reader: R, path: &Path, options: CsvOptions) -> Result<Dataset> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .delimiter(options.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut width: Option<usize> = None;
    let mut features: Vec<f64> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        match width {
            None if record.len() < 2 => {
                return Err(parse_err(line, "need at least one feature and one label column".into()))
            }
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(parse_err(line, format!("expected {w} fields, found {}", record.len())))
            }
            _ => {}
        }
        let (label_idx, n) = match options.label_column {
            LabelColumn::First => (0, record.len()),
            LabelColumn::Last => (record.len() - 1, record.len()),
        };
        for (i, field) in record.iter().enumerate().take(n) {
            if i == label_idx {
                continue;
            }
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line, format!("non-numeric feature {field:?} in column {}", i + 1)))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite feature {field:?} in column {}", i + 1)));
            }
            features.push(v);
        }
        labels.push(record[label_idx].to_string());
    }
    let Some(width) = width else {
        return Err(parse_err(0, "file contains no data rows".into()));
    };
    let n = labels.len();
    let x = Matrix::new(n, width - 1, features)?;
    let name = path
        .file_stem()
        .map_or_else(|| "data".to_string(), |s| s.to_string_lossy().into_owned());
    match options.task {
        Task::Classification => Dataset::classification(name, x, &labels),
        Task::Regression => {
            let mut y = Vec::with_capacity(n);
            for (i, l) in labels.iter().enumerate() {
                let v: f64 = l
                    .parse()
                    .map_err(|_| parse_err(i + 1 + options.has_header as usize, format!("non-numeric target {l:?}")))?;
                if !v.is_finite() {
                    return Err(parse_err(i + 1 + options.has_header as usize, format!("non-finite target {l:?}")));
                }
                y.push(v);
            }
            Dataset::regression(name, x, Matrix::new(n, 1, y)?)
        }
    }
}

const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

fn be_u32(bytes: &[u8], at: usize) -> Option<u32> {
    bytes.get(at..at + 4).map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
}

/// Loads an IDX image/label file pair (the MNIST layout). Pixels are scaled
/// to `[0, 1]` by dividing by 255; labels become one-hot over the digits in
/// ascending order.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Dataset> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let images = fs::read(images_path).map_err(|e| Error::io(images_path, e))?;
    let labels = fs::read(labels_path).map_err(|e| Error::io(labels_path, e))?;
    parse_idx(&images, images_path, &labels, labels_path)
}

fn parse_idx(images: &[u8], images_path: &Path, labels: &[u8], labels_path: &Path) -> Result<Dataset> {
    let fmt_err = |p: &Path, msg: String| Error::Format {
        path: p.to_path_buf(),
        msg,
    };
    let magic = be_u32(images, 0).ok_or_else(|| fmt_err(images_path, "file too short for header".into()))?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(fmt_err(images_path, format!("magic {magic:#010x}, expected {IDX_IMAGES_MAGIC:#010x}")));
    }
    let (count, rows, cols) = match (be_u32(images, 4), be_u32(images, 8), be_u32(images, 12)) {
        (Some(n), Some(r), Some(c)) => (n as usize, r as usize, c as usize),
        _ => return Err(fmt_err(images_path, "file too short for header".into())),
    };
    let pixels = rows * cols;
    if images.len() != 16 + count * pixels {
        return Err(fmt_err(
            images_path,
            format!("expected {} bytes for {count} images of {rows}x{cols}, found {}", 16 + count * pixels, images.len()),
        ));
    }

    let magic = be_u32(labels, 0).ok_or_else(|| fmt_err(labels_path, "file too short for header".into()))?;
    if magic != IDX_LABELS_MAGIC {
        return Err(fmt_err(labels_path, format!("magic {magic:#010x}, expected {IDX_LABELS_MAGIC:#010x}")));
    }
    let label_count = be_u32(labels, 4).ok_or_else(|| fmt_err(labels_path, "file too short for header".into()))? as usize;
    if label_count != count {
        return Err(fmt_err(labels_path, format!("{label_count} labels for {count} images")));
    }
    if labels.len() != 8 + count {
        return Err(fmt_err(labels_path, format!("expected {} bytes, found {}", 8 + count, labels.len())));
    }

    let features: Vec<f64> = images[16..].iter().map(|&p| p as f64 / 255.0).collect();
    let digits = &labels[8..];
    let max = digits.iter().copied().max().unwrap_or(0) as usize;
    let class_labels: Vec<String> = (0..=max.max(9)).map(|d| d.to_string()).collect();
    let ids: Vec<usize> = digits.iter().map(|&d| d as usize).collect();
    let name = images_path
        .file_stem()
        .map_or_else(|| "idx".to_string(), |s| s.to_string_lossy().into_owned());
    Dataset::from_class_indices(name, Matrix::new(count, pixels, features)?, &ids, class_labels)
}

/// Loads a class-per-subdirectory image tree. Every image is converted to
/// grayscale, resized to `side × side`, scaled by 1/255 and flattened
/// row-major. Classes are ordered by directory name.
pub fn load_image_folder(root: impl AsRef<Path>, side: u32) -> Result<Dataset> {
    let root = root.as_ref();
    let mut class_dirs: Vec<_> = fs::read_dir(root)
        .map_err(|e| Error::io(root, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    class_dirs.sort();
    if class_dirs.is_empty() {
        return Err(Error::Format {
            path: root.to_path_buf(),
            msg: "no class subdirectories".into(),
        });
    }
    let mut features = Vec::new();
    let mut ids = Vec::new();
    let mut class_labels = Vec::new();
    for (class, dir) in class_dirs.iter().enumerate() {
        class_labels.push(dir.file_name().unwrap_or_default().to_string_lossy().into_owned());
        let mut files: Vec<_> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        for file in files {
            let img = image::open(&file).map_err(|e| Error::Format {
                path: file.clone(),
                msg: e.to_string(),
            })?;
            let gray = img
                .resize_exact(side, side, image::imageops::FilterType::Triangle)
                .to_luma8();
            features.extend(gray.as_raw().iter().map(|&p| p as f64 / 255.0));
            ids.push(class);
        }
    }
    let n = ids.len();
    let name = root
        .file_name()
        .map_or_else(|| "images".to_string(), |s| s.to_string_lossy().into_owned());
    Dataset::from_class_indices(name, Matrix::new(n, (side * side) as usize, features)?, &ids, class_labels)
}

/// Per-class random split. Each class with `k` samples sends
/// `round(train_fraction * k)` of them (at least one, at most `k - 1`) to
/// the training side. Both sides keep the original row order.
pub fn split_stratified(data: &Dataset, train_fraction: f64, rng: &mut SeededRng) -> Result<SplitPair> {
    if data.task() != Task::Classification {
        return Err(Error::config("stratified split needs a classification dataset"));
    }
    check_fraction(train_fraction)?;
    let ids = data.class_indices();
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, label) in data.class_labels().iter().enumerate() {
        let mut members: Vec<usize> = (0..ids.len()).filter(|&i| ids[i] == class).collect();
        if members.len() < 2 {
            return Err(Error::config(format!(
                "class {label:?} has {} sample(s); a stratified split needs at least 2",
                members.len()
            )));
        }
        members.shuffle(rng);
        let k = members.len();
        let n_train = ((train_fraction * k as f64).round() as usize).clamp(1, k - 1);
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitPair {
        train: data.select_rows(&train),
        test: data.select_rows(&test),
    })
}

/// Uniformly random split for any task: `round(train_fraction * N)` rows
/// (clamped to `1..N`) go to training. Both sides keep the original order.
pub fn split_random(data: &Dataset, train_fraction: f64, rng: &mut SeededRng) -> Result<SplitPair> {
    check_fraction(train_fraction)?;
    let n = data.n_samples();
    if n < 2 {
        return Err(Error::config("cannot split a single-sample dataset"));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let n_train = ((train_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let (mut train, mut test) = (idx[..n_train].to_vec(), idx[n_train..].to_vec());
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitPair {
        train: data.select_rows(&train),
        test: data.select_rows(&test),
    })
}

fn check_fraction(f: f64) -> Result<()> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!("train fraction must be in (0, 1), got {f}")))
    }
}

/// First `train_count` rows to train, the rest to test.
pub fn split_head(data: &Dataset, train_count: usize) -> Result<SplitPair> {
    let n = data.n_samples();
    if train_count == 0 || train_count >= n {
        return Err(Error::config(format!("head split count must be in 1..{n}, got {train_count}")));
    }
    let train: Vec<usize> = (0..train_count).collect();
    let test: Vec<usize> = (train_count..n).collect();
    Ok(SplitPair {
        train: data.select_rows(&train),
        test: data.select_rows(&test),
    })
}

/// Per-feature min-max scaling to `[0, 1]`, learned on training features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Scaler {
    /// Maps each feature to `[0, 1]`; constant features map to 0 and values
    /// outside the fitted range are clipped.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.min.len() {
            return Err(Error::Shape {
                op: "Scaler::apply",
                left: (1, self.min.len()),
                right: x.shape(),
            });
        }
        Ok(Matrix::from_fn(x.rows(), x.cols(), |r, c| {
            let span = self.max[c] - self.min[c];
            if span > 0.0 {
                ((x.get(r, c) - self.min[c]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            }
        }))
    }
}

pub fn fit_scaler(train_features: &Matrix) -> Result<Scaler> {
    if train_features.rows() == 0 {
        return Err(Error::config("cannot fit a scaler on zero rows"));
    }
    let p = train_features.cols();
    let mut min = vec![f64::INFINITY; p];
    let mut max = vec![f64::NEG_INFINITY; p];
    for r in 0..train_features.rows() {
        for (c, &v) in train_features.row(r).iter().enumerate() {
            min[c] = min[c].min(v);
            max[c] = max[c].max(v);
        }
    }
    Ok(Scaler { min, max })
}

pub fn apply_scaler(scaler: &Scaler, x: &Matrix) -> Result<Matrix> {
    scaler.apply(x)
}
