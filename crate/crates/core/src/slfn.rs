//! Single-hidden-layer networks: the trained model, its forward pass and
//! the evaluation metrics.
//!
//! Biases never appear as separate vectors. Inputs are augmented with a
//! trailing column of ones and the input-weight matrix carries the biases
//! in its last row, so one hidden unit computes
//! `g(w · x + b) = g([x, 1] · W[:, i])`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::activation::{apply_activation, ActivationKind};
use crate::datasets::{argmax, Scaler};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Appends a column of ones: `N × P` becomes `N × (P + 1)`.
pub fn augment(x: &Matrix) -> Matrix {
    let p = x.cols();
    Matrix::from_fn(x.rows(), p + 1, |r, c| if c < p { x.get(r, c) } else { 1.0 })
}

/// `g(augment(x) · input_weight)`, the hidden-layer output matrix.
pub fn hidden_layer(augmented: &Matrix, input_weight: &Matrix, activation: ActivationKind) -> Result<Matrix> {
    Ok(apply_activation(activation, &augmented.matmul(input_weight)?))
}

/// A trained single-hidden-layer feed-forward network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelFields", into = "ModelFields")]
pub struct SlfnModel {
    input_weight: Matrix,
    output_weight: Matrix,
    activation: ActivationKind,
    feature_dim: usize,
    class_labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct ModelFields {
    feature_dim: usize,
    activation: ActivationKind,
    class_labels: Option<Vec<String>>,
    input_weight: Matrix,
    output_weight: Matrix,
}

impl TryFrom<ModelFields> for SlfnModel {
    type Error = Error;

    fn try_from(f: ModelFields) -> Result<Self> {
        SlfnModel::new(f.input_weight, f.output_weight, f.activation, f.class_labels)
    }
}

impl From<SlfnModel> for ModelFields {
    fn from(m: SlfnModel) -> Self {
        ModelFields {
            feature_dim: m.feature_dim,
            activation: m.activation,
            class_labels: m.class_labels,
            input_weight: m.input_weight,
            output_weight: m.output_weight,
        }
    }
}

impl SlfnModel {
    /// `input_weight` is `(P + 1) × M` with the bias in its last row;
    /// `output_weight` is `M × C`.
    pub fn new(
        input_weight: Matrix,
        output_weight: Matrix,
        activation: ActivationKind,
        class_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if input_weight.rows() < 2 || input_weight.cols() == 0 || input_weight.cols() != output_weight.rows() {
            return Err(Error::Shape {
                op: "SlfnModel::new",
                left: input_weight.shape(),
                right: output_weight.shape(),
            });
        }
        if let Some(labels) = &class_labels {
            if labels.len() != output_weight.cols() {
                return Err(Error::config(format!(
                    "{} class labels for {} outputs",
                    labels.len(),
                    output_weight.cols()
                )));
            }
        }
        Ok(SlfnModel {
            feature_dim: input_weight.rows() - 1,
            input_weight,
            output_weight,
            activation,
            class_labels,
        })
    }

    pub fn input_weight(&self) -> &Matrix {
        &self.input_weight
    }

    pub fn output_weight(&self) -> &Matrix {
        &self.output_weight
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn hidden_nodes(&self) -> usize {
        self.input_weight.cols()
    }

    pub fn n_outputs(&self) -> usize {
        self.output_weight.cols()
    }

    pub fn class_labels(&self) -> Option<&[String]> {
        self.class_labels.as_deref()
    }

    /// Network outputs for every row of `x`, plus decoded labels for
    /// classifiers.
    pub fn predict_raw(&self, x: &Matrix) -> Result<Prediction> {
        if x.cols() != self.feature_dim {
            return Err(Error::Shape {
                op: "predict",
                left: (self.feature_dim, self.hidden_nodes()),
                right: x.shape(),
            });
        }
        let h = hidden_layer(&augment(x), &self.input_weight, self.activation)?;
        let raw = h.matmul(&self.output_weight)?;
        let labels = self.class_labels.as_ref().map(|names| {
            (0..raw.rows())
                .map(|r| names[argmax(raw.row(r))].clone())
                .collect()
        });
        Ok(Prediction { raw, labels })
    }
}

/// Free-function form of [`SlfnModel::predict_raw`].
pub fn predict_raw(model: &SlfnModel, x: &Matrix) -> Result<Prediction> {
    model.predict_raw(x)
}

/// Output of a forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// `N × C` network outputs.
    pub raw: Matrix,
    /// Argmax-decoded labels (classifiers only).
    pub labels: Option<Vec<String>>,
}

impl Prediction {
    /// Argmax class index per row.
    pub fn class_indices(&self) -> Vec<usize> {
        (0..self.raw.rows()).map(|r| argmax(self.raw.row(r))).collect()
    }
}

/// Root-mean-squared error over all entries.
pub fn rmse(pred: &Matrix, target: &Matrix) -> Result<f64> {
    if pred.shape() != target.shape() {
        return Err(Error::Shape {
            op: "rmse",
            left: pred.shape(),
            right: target.shape(),
        });
    }
    let n = pred.as_slice().len();
    if n == 0 {
        return Err(Error::config("rmse of empty matrices"));
    }
    let sse: f64 = pred
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok((sse / n as f64).sqrt())
}

/// Percentage of positions where the two label lists agree.
pub fn accuracy<T: PartialEq>(pred_labels: &[T], true_labels: &[T]) -> Result<f64> {
    if pred_labels.len() != true_labels.len() {
        return Err(Error::Shape {
            op: "accuracy",
            left: (pred_labels.len(), 1),
            right: (true_labels.len(), 1),
        });
    }
    if pred_labels.is_empty() {
        return Err(Error::config("accuracy of empty label lists"));
    }
    let hits = pred_labels.iter().zip(true_labels).filter(|(a, b)| a == b).count();
    Ok(100.0 * hits as f64 / pred_labels.len() as f64)
}

/// Rounds a metric to two decimals for reports.
pub fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

const MODEL_FORMAT: &str = "bfelm-slfn";
const MODEL_VERSION: u32 = 1;

/// On-disk model document: the network plus the feature scaler fitted
/// during training, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    format: String,
    version: u32,
    pub model: SlfnModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<Scaler>,
}

impl ModelFile {
    pub fn new(model: SlfnModel, scaler: Option<Scaler>) -> Self {
        ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            model,
            scaler,
        }
    }

    /// JSON text; floats use shortest round-trip formatting so a reload
    /// reproduces every weight bit for bit.
    pub fn to_writer<W: Write>(&self, w: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(w, self)
    }

    pub fn from_reader<R: Read>(r: R) -> Result<Self> {
        let file: ModelFile = serde_json::from_reader(r).map_err(|e| Error::Format {
            path: "<model>".into(),
            msg: e.to_string(),
        })?;
        file.check()?;
        Ok(file)
    }

    fn check(&self) -> Result<()> {
        if self.format != MODEL_FORMAT || self.version != MODEL_VERSION {
            return Err(Error::Format {
                path: "<model>".into(),
                msg: format!("unsupported model format {} v{}", self.format, self.version),
            });
        }
        if let Some(s) = &self.scaler {
            if s.min.len() != self.model.feature_dim || s.max.len() != self.model.feature_dim {
                return Err(Error::Format {
                    path: "<model>".into(),
                    msg: "scaler width does not match feature_dim".into(),
                });
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        file.check().map_err(|e| match e {
            Error::Format { msg, .. } => Error::Format {
                path: path.to_path_buf(),
                msg,
            },
            other => other,
        })?;
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init::SeededRng;
    use proptest::prelude::*;

    fn random_matrix(rows: usize, cols: usize, rng: &mut SeededRng) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| rng.uniform(-1.0, 1.0))
    }

    #[test]
    fn augment_appends_ones() {
        let x = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert_eq!(augment(&x), Matrix::from_rows(&[[1.0, 2.0, 1.0]]).unwrap());
        let y = random_matrix(3, 2, &mut SeededRng::new(1));
        let a = augment(&y);
        assert_eq!(a.column(2), [1.0; 3]);
        assert_eq!(a.column_range(0..2), y);
    }

    #[test]
    fn hand_computed_prediction() {
        let w = Matrix::from_rows(&[[2.0], [0.0]]).unwrap();
        let b = Matrix::from_rows(&[[3.0]]).unwrap();
        let m = SlfnModel::new(w, b, ActivationKind::Linear, None).unwrap();
        let p = m.predict_raw(&Matrix::from_rows(&[[1.0]]).unwrap()).unwrap();
        assert_eq!(p.raw, Matrix::from_rows(&[[6.0]]).unwrap());
        assert!(p.labels.is_none());
    }

    #[test]
    fn zero_rows_in_zero_rows_out() {
        let mut rng = SeededRng::new(2);
        let m = SlfnModel::new(random_matrix(4, 5, &mut rng), random_matrix(5, 2, &mut rng), ActivationKind::Tanh, None)
            .unwrap();
        let p = m.predict_raw(&Matrix::zeros(0, 3)).unwrap();
        assert_eq!(p.raw.shape(), (0, 2));
    }

    #[test]
    fn prediction_shape_errors() {
        let mut rng = SeededRng::new(3);
        let m = SlfnModel::new(random_matrix(4, 5, &mut rng), random_matrix(5, 2, &mut rng), ActivationKind::Tanh, None)
            .unwrap();
        assert!(matches!(m.predict_raw(&Matrix::zeros(2, 4)), Err(Error::Shape { .. })));
        assert!(SlfnModel::new(random_matrix(4, 5, &mut rng), random_matrix(4, 2, &mut rng), ActivationKind::Tanh, None).is_err());
        assert!(SlfnModel::new(
            random_matrix(4, 5, &mut rng),
            random_matrix(5, 2, &mut rng),
            ActivationKind::Tanh,
            Some(vec!["only-one".into()])
        )
        .is_err());
    }

    /// Scalar evaluation of `o_j = sum_i beta_i g(w_i . x_j + b_i)`.
    fn scalar_forward(model: &SlfnModel, x: &Matrix) -> Vec<Vec<f64>> {
        let w = model.input_weight();
        let beta = model.output_weight();
        let p = model.feature_dim();
        (0..x.rows())
            .map(|j| {
                (0..beta.cols())
                    .map(|k| {
                        let mut o = 0.0;
                        for i in 0..model.hidden_nodes() {
                            let mut z = w.get(p, i);
                            for f in 0..p {
                                z += w.get(f, i) * x.get(j, f);
                            }
                            o += beta.get(i, k) * model.activation().eval(z);
                        }
                        o
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn forward_pass_matches_scalar_loop() {
        let mut rng = SeededRng::new(4);
        for kind in ActivationKind::ALL {
            for (m_nodes, n, p) in [(4, 10, 3), (8, 20, 2), (1, 5, 1)] {
                let model = SlfnModel::new(
                    random_matrix(p + 1, m_nodes, &mut rng),
                    random_matrix(m_nodes, 2, &mut rng),
                    kind,
                    None,
                )
                .unwrap();
                let x = random_matrix(n, p, &mut rng);
                let got = model.predict_raw(&x).unwrap().raw;
                let want = scalar_forward(&model, &x);
                for (j, row) in want.iter().enumerate() {
                    for (k, w) in row.iter().enumerate() {
                        assert!((got.get(j, k) - w).abs() < 1e-12, "{kind}");
                    }
                }
            }
        }
    }

    #[test]
    fn argmax_labels_with_ties() {
        let w = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let b = Matrix::identity(2);
        let m = SlfnModel::new(w, b, ActivationKind::Linear, Some(vec!["a".into(), "b".into()])).unwrap();
        let p = m.predict_raw(&Matrix::from_rows(&[[5.0]]).unwrap()).unwrap();
        assert_eq!(p.labels.unwrap(), ["a"]);
    }

    #[test]
    fn rmse_values() {
        let t = Matrix::from_fn(3, 2, |r, c| (r + c) as f64);
        assert_eq!(rmse(&t, &t).unwrap(), 0.0);
        let shifted = t.map(|v| v + 0.2);
        assert!((rmse(&shifted, &t).unwrap() - 0.2).abs() < 1e-12);
        assert!(rmse(&t, &Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn rmse_matches_two_pass_oracle() {
        let mut rng = SeededRng::new(5);
        let a = random_matrix(7, 3, &mut rng);
        let b = random_matrix(7, 3, &mut rng);
        let diffs: Vec<f64> = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x - y).collect();
        let mean_sq = diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64;
        assert!((rmse(&a, &b).unwrap() - mean_sq.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn accuracy_values() {
        assert_eq!(accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 100.0);
        assert_eq!(accuracy(&[1, 2], &[3, 4]).unwrap(), 0.0);
        let truth: Vec<u8> = vec![0; 45];
        let mut pred = truth.clone();
        pred[0] = 1;
        assert_eq!(round2(accuracy(&pred, &truth).unwrap()), 97.78);
        assert!(accuracy::<u8>(&[], &[]).is_err());
        assert!(accuracy(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn model_file_rejects_garbage() {
        assert!(ModelFile::from_reader("{}".as_bytes()).is_err());
        assert!(ModelFile::load("/no/such/model.json").is_err());
    }

    proptest! {
        #[test]
        fn model_file_round_trip_is_bit_exact(seed in any::<u64>(), m in 1usize..6, p in 1usize..4, classify in any::<bool>()) {
            let mut rng = SeededRng::new(seed);
            let scale = 10f64.powi((seed % 7) as i32 - 3);
            let w = random_matrix(p + 1, m, &mut rng).scale(scale);
            let b = random_matrix(m, 2, &mut rng).scale(1.0 / scale);
            let labels = classify.then(|| vec!["neg".to_string(), "pos".to_string()]);
            let model = SlfnModel::new(w, b, ActivationKind::Sigmoid, labels).unwrap();
            let scaler = Scaler { min: vec![-1.5; p], max: vec![std::f64::consts::PI; p] };
            let file = ModelFile::new(model.clone(), Some(scaler));
            let mut buf = Vec::new();
            file.to_writer(&mut buf).unwrap();
            let back = ModelFile::from_reader(buf.as_slice()).unwrap();
            prop_assert_eq!(&back, &file);
            let x = random_matrix(6, p, &mut rng);
            let p1 = model.predict_raw(&x).unwrap();
            let p2 = back.model.predict_raw(&x).unwrap();
            prop_assert_eq!(p1.raw.as_slice(), p2.raw.as_slice());
            prop_assert_eq!(p1.labels, p2.labels);
        }
    }
}
