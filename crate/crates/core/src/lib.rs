//! Extreme learning machines for single-hidden-layer feedforward networks.
//!
//! Two trainers are provided: the classic [`trainers::train_elm`], which
//! draws the input weights at random, and the backward-forward variant
//! [`trainers::train_bfelm`], which learns half of the input weights from
//! the targets in a backward pass and fills the rest with an orthogonal
//! complement. Both solve for the output weights with a pseudoinverse.
//!
//! ```
//! use bfelm::{ActivationKind, Algorithm, InitScheme, SeededRng, TrainSpec};
//! use bfelm::datasets::gen_sinc;
//!
//! let mut rng = SeededRng::new(7);
//! let train = gen_sinc(500, 0.0, -10.0, 10.0, &mut rng)?;
//! let spec = TrainSpec::new(20, InitScheme::Orthogonal, ActivationKind::Sin, 11);
//! let out = Algorithm::BfElm.train(&train, &spec)?;
//! assert!(out.training_metric < 0.05);
//! # Ok::<(), bfelm::Error>(())
//! ```

pub mod activation;
pub mod bench;
pub mod cli;
pub mod datasets;
pub mod error;
pub mod init;
pub mod matrix;
pub mod slfn;
pub mod trainers;

pub use activation::ActivationKind;
pub use bench::{BenchReport, BenchRow, CellSettings, MetricKind};
pub use datasets::{Dataset, Scaler, SplitPair, Task};
pub use error::{Error, Result};
pub use init::{InitScheme, SeededRng};
pub use matrix::{orth, pinv, Matrix, Svd};
pub use slfn::{ModelFile, Prediction, SlfnModel};
pub use trainers::{Algorithm, TrainOutcome, TrainSpec};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/activations.md")]
    mod activations {}
    #[doc = include_str!("../../../book/src/initialization.md")]
    mod initialization {}
    #[doc = include_str!("../../../book/src/elm.md")]
    mod elm {}
    #[doc = include_str!("../../../book/src/bfelm.md")]
    mod bfelm {}
    #[doc = include_str!("../../../book/src/datasets.md")]
    mod datasets {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
