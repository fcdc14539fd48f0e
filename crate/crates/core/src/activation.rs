//! Elementwise hidden-layer activations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::Matrix;

/// Activation applied to every hidden pre-activation.
///
/// `Softsign` is `1 / (1 + |x|)`, not the more common `x / (1 + |x|)`.
/// This is the form used in the reference experiments and it is kept as is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "&'static str", try_from = "String")]
pub enum ActivationKind {
    Linear,
    Sigmoid,
    ReLU,
    Tanh,
    Softsign,
    Sin,
    Cos,
    Sinc,
    LeakyReLU,
    Gaussian,
    BentIdentity,
    ArcTan,
}

const LEAKY_SLOPE: f64 = 0.001;

impl ActivationKind {
    pub const ALL: [ActivationKind; 12] = [
        ActivationKind::Linear,
        ActivationKind::Sigmoid,
        ActivationKind::ReLU,
        ActivationKind::Tanh,
        ActivationKind::Softsign,
        ActivationKind::Sin,
        ActivationKind::Cos,
        ActivationKind::Sinc,
        ActivationKind::LeakyReLU,
        ActivationKind::Gaussian,
        ActivationKind::BentIdentity,
        ActivationKind::ArcTan,
    ];

    /// The ten activations of the published result tables (no Sinc, no Gaussian).
    pub const GRID_DEFAULT: [ActivationKind; 10] = [
        ActivationKind::Linear,
        ActivationKind::ReLU,
        ActivationKind::Sigmoid,
        ActivationKind::Tanh,
        ActivationKind::Softsign,
        ActivationKind::Sin,
        ActivationKind::Cos,
        ActivationKind::LeakyReLU,
        ActivationKind::BentIdentity,
        ActivationKind::ArcTan,
    ];

    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            ActivationKind::Linear => x,
            ActivationKind::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            ActivationKind::ReLU => x.max(0.0),
            ActivationKind::Tanh => x.tanh(),
            ActivationKind::Softsign => 1.0 / (1.0 + x.abs()),
            ActivationKind::Sin => x.sin(),
            ActivationKind::Cos => x.cos(),
            ActivationKind::Sinc => {
                if x == 0.0 {
                    1.0
                } else {
                    x.sin() / x
                }
            }
            ActivationKind::LeakyReLU => {
                if x > 0.0 {
                    x
                } else {
                    LEAKY_SLOPE * x
                }
            }
            ActivationKind::Gaussian => (-x * x).exp(),
            ActivationKind::BentIdentity => (x.hypot(1.0) - 1.0) / 2.0 + x,
            ActivationKind::ArcTan => x.atan(),
        }
    }

    /// Lowercase name used on the command line and in model files.
    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Linear => "linear",
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::ReLU => "relu",
            ActivationKind::Tanh => "tanh",
            ActivationKind::Softsign => "softsign",
            ActivationKind::Sin => "sin",
            ActivationKind::Cos => "cos",
            ActivationKind::Sinc => "sinc",
            ActivationKind::LeakyReLU => "leakyrelu",
            ActivationKind::Gaussian => "gaussian",
            ActivationKind::BentIdentity => "bentide",
            ActivationKind::ArcTan => "arctan",
        }
    }
}

/// Applies `kind` to every entry of `x`.
pub fn apply_activation(kind: ActivationKind, x: &Matrix) -> Matrix {
    if kind == ActivationKind::Linear {
        return x.clone();
    }
    x.map(|v| kind.eval(v))
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let lower = s.trim().to_ascii_lowercase();
        // "none" is how the result tables label the identity activation
        if lower == "none" {
            return Ok(ActivationKind::Linear);
        }
        ActivationKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| {
                let names: Vec<_> = ActivationKind::ALL.iter().map(|k| k.name()).collect();
                Error::config(format!("unknown activation {s:?}; expected one of {}", names.join("|")))
            })
    }
}

impl From<ActivationKind> for &'static str {
    fn from(k: ActivationKind) -> Self {
        k.name()
    }
}

impl TryFrom<String> for ActivationKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}
