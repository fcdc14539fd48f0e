//! The two closed-form learners for single-hidden-layer networks.
//!
//! * [`train_elm`]: input weights are drawn at random, output weights solve
//!   the least-squares problem `H β ≈ T` through the pseudoinverse.
//! * [`train_bfelm`]: a backward pass first derives half of the input
//!   weights from the targets, the remaining columns are an orthonormal
//!   basis of that learned block, and a forward pass then solves for the
//!   output weights exactly as in ELM.
//!
//! # Backward pass
//!
//! With `M_b = ceil(M / 2)`:
//!
//! 1. draw a random `M_b × C` output weight `β̃`;
//! 2. `H̃ = T · pinv(β̃) + E`, with `E` i.i.d. `U[-noise_scale, noise_scale]`;
//! 3. `W̃ = pinv([X, 1]) · H̃`, the `(P + 1) × M_b` learned block.
//!
//! The full input weight is `W = [W̃ | Q]` where `Q` holds the first
//! `M - M_b` columns of `orth(W̃)`. If `orth(W̃)` has fewer columns, `Q` is
//! completed with seeded random directions orthonormalized against the
//! column space of `W̃` and against each other. Once all `P + 1` dimensions
//! are used up a fresh orthonormal set is started, so the extra columns are
//! orthonormal within each set of at most `P + 1` vectors.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::activation::ActivationKind;
use crate::datasets::{Dataset, Task};
use crate::error::{Error, Result};
use crate::init::{init_weights, InitContext, InitScheme, SeededRng};
use crate::matrix::{norm, orth_with_tolerance, orthogonalize_against, pinv, pinv_solve, Matrix};
use crate::slfn::{accuracy, augment, hidden_layer, rmse, SlfnModel};

/// Default half-width of the uniform perturbation added to `H̃`.
pub const DEFAULT_NOISE_SCALE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "ELM")]
    Elm,
    #[serde(rename = "BFELM")]
    BfElm,
}

impl Algorithm {
    pub fn train(self, data: &Dataset, spec: &TrainSpec) -> Result<TrainOutcome> {
        match self {
            Algorithm::Elm => train_elm(data, spec),
            Algorithm::BfElm => train_bfelm(data, spec),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Elm => "ELM",
            Algorithm::BfElm => "BFELM",
        }
    }
}

/// Human-readable name; `label` gives the report value.
impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Elm => "ELM",
            Algorithm::BfElm => "BF-ELM",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "").as_str() {
            "elm" => Ok(Algorithm::Elm),
            "bfelm" => Ok(Algorithm::BfElm),
            _ => Err(Error::config(format!("unknown algorithm {s:?}; expected elm|bfelm"))),
        }
    }
}

/// Everything a trainer needs besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSpec {
    pub hidden_nodes: usize,
    pub scheme: InitScheme,
    pub activation: ActivationKind,
    pub seed: u64,
    /// Half-width of the uniform noise added in the backward pass.
    pub noise_scale: f64,
    /// Pseudoinverse cutoff; `None` selects the numerical-rank default.
    pub pinv_tol: Option<f64>,
    /// Scheme for the backward pass's random `β̃`; `None` means `rand(-1,1)`.
    pub beta_tilde_scheme: Option<InitScheme>,
}

impl TrainSpec {
    pub fn new(hidden_nodes: usize, scheme: InitScheme, activation: ActivationKind, seed: u64) -> Self {
        TrainSpec {
            hidden_nodes,
            scheme,
            activation,
            seed,
            noise_scale: DEFAULT_NOISE_SCALE,
            pinv_tol: None,
            beta_tilde_scheme: None,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        TrainSpec { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_nodes == 0 {
            return Err(Error::config("hidden_nodes must be >= 1"));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::config(format!("noise_scale must be >= 0, got {}", self.noise_scale)));
        }
        if let Some(t) = self.pinv_tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::config(format!("pinv_tol must be >= 0, got {t}")));
            }
        }
        self.scheme.validate()?;
        if let Some(s) = &self.beta_tilde_scheme {
            s.validate()?;
        }
        Ok(())
    }

    fn beta_tilde_scheme(&self) -> InitScheme {
        self.beta_tilde_scheme.unwrap_or(InitScheme::RAND11)
    }
}

/// A trained model with its training wall time and training-split metric
/// (accuracy in percent for classification, RMSE for regression).
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: SlfnModel,
    pub train_time_s: f64,
    pub training_metric: f64,
}

fn check_data(data: &Dataset) -> Result<()> {
    if data.n_features() == 0 {
        return Err(Error::config(format!("dataset {} has no feature columns", data.name)));
    }
    if data.n_outputs() == 0 {
        return Err(Error::config(format!("dataset {} has no target columns", data.name)));
    }
    Ok(())
}

fn context(data: &Dataset, hidden_nodes: usize) -> InitContext {
    InitContext {
        n_in: data.n_features() + 1,
        n_out: data.n_outputs(),
        n_c: hidden_nodes,
    }
}

/// Classic ELM: random input weights, least-squares output weights.
pub fn train_elm(data: &Dataset, spec: &TrainSpec) -> Result<TrainOutcome> {
    spec.validate()?;
    check_data(data)?;
    let start = Instant::now();
    let mut rng = SeededRng::new(spec.seed);
    let x = augment(data.features());
    let w = init_weights(
        spec.scheme,
        x.cols(),
        spec.hidden_nodes,
        context(data, spec.hidden_nodes),
        &mut rng,
    )?;
    let model = forward_pass(data, &x, w, spec)?;
    let train_time_s = start.elapsed().as_secs_f64();
    finish(data, model, train_time_s)
}

/// Intermediate products of the backward pass.
#[derive(Debug, Clone)]
pub struct BackwardPass {
    /// Random `M_b × C` output weight.
    pub beta_tilde: Matrix,
    /// `T · pinv(β̃) + E`, `N × M_b`.
    pub hidden_tilde: Matrix,
    /// Learned input-weight block `pinv([X, 1]) · H̃`, `(P + 1) × M_b`.
    pub learned: Matrix,
}

/// Number of input-weight columns learned by the backward pass.
pub fn backward_width(hidden_nodes: usize) -> usize {
    hidden_nodes.div_ceil(2)
}

/// Runs the backward pass, drawing `β̃` and then `E` from `rng`.
pub fn backward_pass(data: &Dataset, augmented: &Matrix, spec: &TrainSpec, rng: &mut SeededRng) -> Result<BackwardPass> {
    let m_b = backward_width(spec.hidden_nodes);
    let c = data.n_outputs();
    if c > m_b {
        log::warn!(
            "{} outputs exceed the {m_b} backward-pass nodes; H~ is confined to a rank-{m_b} subspace plus noise",
            c
        );
    }
    let beta_tilde = init_weights(spec.beta_tilde_scheme(), m_b, c, context(data, spec.hidden_nodes), rng)?;
    let mut hidden_tilde = data.targets().matmul(&pinv(&beta_tilde, spec.pinv_tol)?)?;
    if spec.noise_scale > 0.0 {
        let noise = Matrix::from_fn(hidden_tilde.rows(), m_b, |_, _| rng.uniform(-spec.noise_scale, spec.noise_scale));
        hidden_tilde = hidden_tilde.add(&noise)?;
    }
    let learned = pinv_solve(augmented, &hidden_tilde, spec.pinv_tol)?;
    Ok(BackwardPass {
        beta_tilde,
        hidden_tilde,
        learned,
    })
}

/// `count` orthonormal columns derived from `learned`: its orthonormal
/// range basis first, then seeded random fill (see the module docs).
pub fn orthogonal_block(learned: &Matrix, count: usize, tol: Option<f64>, rng: &mut SeededRng) -> Result<Matrix> {
    let dim = learned.rows();
    let range = orth_with_tolerance(learned, tol)?;
    let mut columns: Vec<Vec<f64>> = (0..range.cols().min(count)).map(|c| range.column(c)).collect();
    let mut basis: Vec<Vec<f64>> = (0..range.cols()).map(|c| range.column(c)).collect();
    while columns.len() < count {
        if basis.len() >= dim {
            basis.clear();
        }
        let mut v: Vec<f64> = (0..dim).map(|_| rng.standard_normal()).collect();
        let before = norm(&v);
        orthogonalize_against(&mut v, &basis);
        let len = norm(&v);
        if len <= 1e-6 * before {
            // vanishingly unlikely; redraw
            continue;
        }
        v.iter_mut().for_each(|x| *x /= len);
        basis.push(v.clone());
        columns.push(v);
    }
    Matrix::from_columns(dim, &columns)
}

/// Backward-forward ELM.
pub fn train_bfelm(data: &Dataset, spec: &TrainSpec) -> Result<TrainOutcome> {
    spec.validate()?;
    check_data(data)?;
    let start = Instant::now();
    let mut rng = SeededRng::new(spec.seed);
    let x = augment(data.features());
    let back = backward_pass(data, &x, spec, &mut rng)?;
    let extra = spec.hidden_nodes - back.learned.cols();
    let w = if extra > 0 {
        let q = orthogonal_block(&back.learned, extra, spec.pinv_tol, &mut rng)?;
        back.learned.hstack(&q)?
    } else {
        back.learned
    };
    let model = forward_pass(data, &x, w, spec)?;
    let train_time_s = start.elapsed().as_secs_f64();
    finish(data, model, train_time_s)
}

fn forward_pass(data: &Dataset, augmented: &Matrix, input_weight: Matrix, spec: &TrainSpec) -> Result<SlfnModel> {
    let h = hidden_layer(augmented, &input_weight, spec.activation)?;
    let beta = pinv_solve(&h, data.targets(), spec.pinv_tol)?;
    let labels = (data.task() == Task::Classification).then(|| data.class_labels().to_vec());
    SlfnModel::new(input_weight, beta, spec.activation, labels)
}

fn finish(data: &Dataset, model: SlfnModel, train_time_s: f64) -> Result<TrainOutcome> {
    let training_metric = evaluate(&model, data)?;
    Ok(TrainOutcome {
        model,
        train_time_s,
        training_metric,
    })
}

/// Accuracy (percent) for classification, RMSE for regression.
pub fn evaluate(model: &SlfnModel, data: &Dataset) -> Result<f64> {
    let pred = model.predict_raw(data.features())?;
    match data.task() {
        Task::Classification => accuracy(&pred.class_indices(), &data.class_indices()),
        Task::Regression => rmse(&pred.raw, data.targets()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn blobs(seed: u64, n_per: usize, p: usize, c: usize) -> Dataset {
        let mut rng = SeededRng::new(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for k in 0..c {
            for _ in 0..n_per {
                rows.push((0..p).map(|f| if f % c == k { 1.0 } else { 0.0 } + 0.3 * rng.uniform(-1.0, 1.0)).collect::<Vec<_>>());
                labels.push(format!("k{k}"));
            }
        }
        Dataset::classification("blobs", Matrix::from_rows(&rows).unwrap(), &labels).unwrap()
    }

    #[test]
    fn exact_interpolation_when_n_equals_m() {
        let mut rng = SeededRng::new(1);
        let x = Matrix::from_fn(5, 2, |_, _| rng.uniform(-1.0, 1.0));
        let t = Matrix::from_fn(5, 1, |_, _| rng.uniform(-1.0, 1.0));
        let data = Dataset::regression("tiny", x, t).unwrap();
        let spec = TrainSpec::new(5, InitScheme::RAND11, ActivationKind::Sigmoid, 3);
        let out = train_elm(&data, &spec).unwrap();
        assert!(out.training_metric < 1e-6, "rmse {}", out.training_metric);
    }

    #[test]
    fn two_linear_nodes_fit_an_affine_map() {
        let x = Matrix::from_fn(20, 1, |r, _| r as f64 / 4.0 - 2.0);
        let t = x.map(|v| 2.0 * v - 1.0);
        let data = Dataset::regression("line", x, t).unwrap();
        let spec = TrainSpec::new(2, InitScheme::RAND11, ActivationKind::Linear, 8);
        let out = train_elm(&data, &spec).unwrap();
        assert!(out.training_metric < 1e-8, "rmse {}", out.training_metric);
    }

    #[test]
    fn bfelm_shapes() {
        let data = blobs(2, 10, 4, 3);
        let spec = TrainSpec::new(7, InitScheme::Orthogonal, ActivationKind::Sigmoid, 5);
        let out = train_bfelm(&data, &spec).unwrap();
        assert_eq!(out.model.input_weight().shape(), (5, 7));
        assert_eq!(out.model.output_weight().shape(), (7, 3));

        let mut rng = SeededRng::new(5);
        let x = augment(data.features());
        let back = backward_pass(&data, &x, &spec, &mut rng).unwrap();
        assert_eq!(back.learned.shape(), (5, 4));
        let direct = pinv(&x, None).unwrap().matmul(&back.hidden_tilde).unwrap();
        let first = out.model.input_weight().column_range(0..4);
        assert!(first.sub(&direct).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn noiseless_backward_pass_reproduces_targets() {
        // C = M_b = 3 with an invertible beta~: H~ beta~ = T exactly.
        let data = blobs(3, 8, 4, 3);
        let mut spec = TrainSpec::new(6, InitScheme::Orthogonal, ActivationKind::Sigmoid, 11);
        spec.noise_scale = 0.0;
        let x = augment(data.features());
        let back = backward_pass(&data, &x, &spec, &mut SeededRng::new(11)).unwrap();
        let recon = back.hidden_tilde.matmul(&back.beta_tilde).unwrap();
        assert!(recon.sub(data.targets()).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn orthogonal_block_columns_are_orthonormal() {
        let data = blobs(4, 10, 6, 2);
        let spec = TrainSpec::new(8, InitScheme::Orthogonal, ActivationKind::Tanh, 2);
        let out = train_bfelm(&data, &spec).unwrap();
        let q = out.model.input_weight().column_range(4..8);
        let g = q.transpose().matmul(&q).unwrap();
        assert!(g.sub(&Matrix::identity(4)).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn deficient_range_is_completed_from_the_complement() {
        // rank-1 learned block in R^4: one range column plus three fills
        let learned = Matrix::from_fn(4, 3, |r, c| (r + 1) as f64 * (c + 1) as f64);
        let q = orthogonal_block(&learned, 4, None, &mut SeededRng::new(0)).unwrap();
        let g = q.transpose().matmul(&q).unwrap();
        assert!(g.sub(&Matrix::identity(4)).unwrap().max_abs() < 1e-10);
        // fills are orthogonal to the learned column space
        let fills = q.column_range(1..4);
        assert!(learned.transpose().matmul(&fills).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn exhausted_space_restarts_orthonormal_sets() {
        let learned = Matrix::from_rows(&[[1.0, 2.0, 3.0], [0.5, 0.1, 0.2]]).unwrap();
        let q = orthogonal_block(&learned, 5, None, &mut SeededRng::new(1)).unwrap();
        assert_eq!(q.shape(), (2, 5));
        for c in 0..5 {
            assert!((norm(&q.column(c)) - 1.0).abs() < 1e-12);
        }
        let set = q.column_range(2..4);
        let g = set.transpose().matmul(&set).unwrap();
        assert!(g.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn zero_learned_block_is_filled() {
        let q = orthogonal_block(&Matrix::zeros(3, 2), 2, None, &mut SeededRng::new(4)).unwrap();
        let g = q.transpose().matmul(&q).unwrap();
        assert!(g.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn trainers_are_deterministic() {
        let data = blobs(5, 12, 3, 3);
        for algo in [Algorithm::Elm, Algorithm::BfElm] {
            for scheme in InitScheme::GRID_DEFAULT {
                let spec = TrainSpec::new(6, scheme, ActivationKind::Sigmoid, 77);
                let a = algo.train(&data, &spec).unwrap().model;
                let b = algo.train(&data, &spec).unwrap().model;
                assert_eq!(a, b, "{algo} {scheme}");
            }
        }
    }

    #[test]
    fn output_weights_are_least_squares_optimal() {
        let data = blobs(6, 15, 5, 3);
        for algo in [Algorithm::Elm, Algorithm::BfElm] {
            let spec = TrainSpec::new(9, InitScheme::Xavier, ActivationKind::Tanh, 13);
            let model = algo.train(&data, &spec).unwrap().model;
            let h = hidden_layer(&augment(data.features()), model.input_weight(), model.activation()).unwrap();
            let resid = h.matmul(model.output_weight()).unwrap().sub(data.targets()).unwrap();
            let grad = h.transpose().matmul(&resid).unwrap().max_abs();
            let scale = h.transpose().matmul(data.targets()).unwrap().max_abs();
            assert!(grad < 1e-6 * (1.0 + scale), "{algo}: {grad}");
        }
    }

    #[test]
    fn single_node_bfelm() {
        let data = blobs(7, 5, 2, 2);
        let spec = TrainSpec::new(1, InitScheme::RAND11, ActivationKind::Sigmoid, 1);
        let out = train_bfelm(&data, &spec).unwrap();
        assert_eq!(out.model.hidden_nodes(), 1);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let data = blobs(8, 4, 2, 2);
        let mut spec = TrainSpec::new(0, InitScheme::RAND11, ActivationKind::Sigmoid, 1);
        assert!(train_elm(&data, &spec).is_err());
        spec.hidden_nodes = 3;
        spec.noise_scale = -0.1;
        assert!(train_bfelm(&data, &spec).is_err());
        spec.noise_scale = 0.0;
        spec.pinv_tol = Some(f64::NAN);
        assert!(train_elm(&data, &spec).is_err());
    }

    #[test]
    fn algorithm_names() {
        assert_eq!("bfelm".parse::<Algorithm>().unwrap(), Algorithm::BfElm);
        assert_eq!("BF-ELM".parse::<Algorithm>().unwrap(), Algorithm::BfElm);
        assert_eq!("elm".parse::<Algorithm>().unwrap(), Algorithm::Elm);
        assert!("svm".parse::<Algorithm>().is_err());
    }
}
