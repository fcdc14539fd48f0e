//! Random weight generation.
//!
//! All randomness in the crate flows through [`SeededRng`], a ChaCha8
//! stream keyed by a 64-bit seed. ChaCha8 output is specified
//! independently of platform and word size, so a seed reproduces the
//! same weights everywhere.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{orthonormalize_columns, Matrix};

/// Deterministic random stream (ChaCha8, seeded from a `u64`).
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The seed this stream started from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw from `[low, high)`.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Weight initialization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitScheme {
    /// i.i.d. `U[low, high)`.
    UniformRange { low: f64, high: f64 },
    /// i.i.d. normal with variance `2 / (n_in + n_out)`.
    Xavier,
    /// i.i.d. normal with standard deviation `sqrt(2 / n_c)`.
    ReluInit,
    /// Orthonormal rows (or columns, for tall shapes) from an orthonormalized
    /// standard-normal draw.
    Orthogonal,
}

impl InitScheme {
    /// `rand(0,1)`.
    pub const RAND01: InitScheme = InitScheme::UniformRange { low: 0.0, high: 1.0 };
    /// `rand(-1,1)`.
    pub const RAND11: InitScheme = InitScheme::UniformRange { low: -1.0, high: 1.0 };

    /// The five schemes of the published result tables.
    pub const GRID_DEFAULT: [InitScheme; 5] = [
        InitScheme::Orthogonal,
        InitScheme::RAND01,
        InitScheme::RAND11,
        InitScheme::Xavier,
        InitScheme::ReluInit,
    ];

    pub fn validate(&self) -> Result<()> {
        if let InitScheme::UniformRange { low, high } = *self {
            if !(low.is_finite() && high.is_finite() && low < high) {
                return Err(Error::config(format!(
                    "uniform range needs finite low < high, got [{low}, {high}]"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for InitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InitScheme::UniformRange { low, high } if low == 0.0 && high == 1.0 => f.write_str("rand01"),
            InitScheme::UniformRange { low, high } if low == -1.0 && high == 1.0 => f.write_str("rand11"),
            InitScheme::UniformRange { low, high } => write!(f, "uniform({low},{high})"),
            InitScheme::Xavier => f.write_str("xavier"),
            InitScheme::ReluInit => f.write_str("relu"),
            InitScheme::Orthogonal => f.write_str("ortho"),
        }
    }
}

impl FromStr for InitScheme {
    type Err = Error;

    /// Accepts `rand01 | rand11 | xavier | relu | ortho`, plus
    /// `uniform(l,u)` for arbitrary ranges.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let scheme = match lower.as_str() {
            "rand01" => InitScheme::RAND01,
            "rand11" => InitScheme::RAND11,
            "xavier" => InitScheme::Xavier,
            "relu" => InitScheme::ReluInit,
            "ortho" => InitScheme::Orthogonal,
            other => {
                let inner = other
                    .strip_prefix("uniform(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| {
                        Error::config(format!(
                            "unknown init scheme {s:?}; expected rand01|rand11|xavier|relu|ortho|uniform(l,u)"
                        ))
                    })?;
                let (l, u) = inner
                    .split_once(',')
                    .ok_or_else(|| Error::config(format!("bad uniform range {s:?}")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::config(format!("bad uniform bound {v:?}")))
                };
                InitScheme::UniformRange {
                    low: parse(l)?,
                    high: parse(u)?,
                }
            }
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

/// Fan sizes for the variance-scaled schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InitContext {
    /// Input width, including the bias row.
    pub n_in: usize,
    /// Output width.
    pub n_out: usize,
    /// Hidden-node count.
    pub n_c: usize,
}

/// Draws a `rows × cols` weight matrix according to `scheme`.
pub fn init_weights(
    scheme: InitScheme,
    rows: usize,
    cols: usize,
    ctx: InitContext,
    rng: &mut SeededRng,
) -> Result<Matrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::config(format!("cannot initialize a {rows}x{cols} weight matrix")));
    }
    if ctx.n_in == 0 || ctx.n_out == 0 || ctx.n_c == 0 {
        return Err(Error::config(format!("init context counts must be >= 1, got {ctx:?}")));
    }
    scheme.validate()?;
    let n = rows * cols;
    let data: Vec<f64> = match scheme {
        InitScheme::UniformRange { low, high } => (0..n).map(|_| rng.uniform(low, high)).collect(),
        InitScheme::Xavier => {
            let std = (2.0 / (ctx.n_in + ctx.n_out) as f64).sqrt();
            normal_draws(n, std, rng)
        }
        InitScheme::ReluInit => {
            let std = (2.0 / ctx.n_c as f64).sqrt();
            normal_draws(n, std, rng)
        }
        InitScheme::Orthogonal => return orthogonal(rows, cols, rng),
    };
    Matrix::new(rows, cols, data)
}

fn normal_draws(n: usize, std: f64, rng: &mut SeededRng) -> Vec<f64> {
    let dist = Normal::new(0.0, std).expect("std is finite and positive");
    (0..n).map(|_| dist.sample(rng)).collect()
}

fn orthogonal(rows: usize, cols: usize, rng: &mut SeededRng) -> Result<Matrix> {
    let g = Matrix::from_fn(rows, cols, |_, _| rng.standard_normal());
    if rows <= cols {
        Ok(orthonormalize_columns(&g.transpose())?.transpose())
    } else {
        orthonormalize_columns(&g)
    }
}
