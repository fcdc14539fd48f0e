#![allow(dead_code)]

use bfelm::Matrix;

/// SplitMix64; kept separate from the library RNG on purpose.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform on [-1, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut TestRng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.unit())
}

/// `rows × cols` matrix of rank at most `rank`, built as a product of two
/// random factors.
pub fn low_rank_matrix(rows: usize, cols: usize, rank: usize, rng: &mut TestRng) -> Matrix {
    let a = random_matrix(rows, rank, rng);
    let b = random_matrix(rank, cols, rng);
    a.matmul(&b).unwrap()
}

/// Random matrix with some columns duplicated or zeroed.
pub fn degenerate_columns(rows: usize, cols: usize, rng: &mut TestRng) -> Matrix {
    let base = random_matrix(rows, cols, rng);
    let mut data = base.as_slice().to_vec();
    for c in 1..cols {
        match rng.below(3) {
            0 => {
                let src = rng.below(c);
                for r in 0..rows {
                    data[r * cols + c] = data[r * cols + src];
                }
            }
            1 => {
                for r in 0..rows {
                    data[r * cols + c] = 0.0;
                }
            }
            _ => {}
        }
    }
    Matrix::new(rows, cols, data).unwrap()
}

/// Frobenius norm.
pub fn fro(a: &Matrix) -> f64 {
    a.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Inverse of a square matrix by Gauss-Jordan elimination with partial
/// pivoting. Returns `None` for (numerically) singular input.
pub fn gauss_jordan_inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let w = 2 * n;
    let mut m = vec![0.0; n * w];
    for r in 0..n {
        for c in 0..n {
            m[r * w + c] = a.get(r, c);
        }
        m[r * w + n + r] = 1.0;
    }
    let scale = a.as_slice().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i * w + col].abs().total_cmp(&m[j * w + col].abs()))?;
        if m[pivot * w + col].abs() <= 1e-13 * scale {
            return None;
        }
        if pivot != col {
            for c in 0..w {
                m.swap(pivot * w + c, col * w + c);
            }
        }
        let p = m[col * w + col];
        for c in 0..w {
            m[col * w + c] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * w + col];
                if f != 0.0 {
                    for c in 0..w {
                        m[r * w + c] -= f * m[col * w + c];
                    }
                }
            }
        }
    }
    Some(Matrix::from_fn(n, n, |r, c| m[r * w + n + c]))
}

/// Least-squares output weights from the normal equations
/// `(HᵀH)⁻¹ HᵀT`; valid only for full column rank `H`.
pub fn normal_equations(h: &Matrix, t: &Matrix) -> Option<Matrix> {
    let ht = h.transpose();
    let gram = ht.matmul(h).unwrap();
    let inv = gauss_jordan_inverse(&gram)?;
    Some(inv.matmul(&ht.matmul(t).unwrap()).unwrap())
}

/// Largest relative deviation `‖a − b‖_F / max(‖b‖_F, floor)`.
pub fn rel_err(a: &Matrix, b: &Matrix, floor: f64) -> f64 {
    fro(&a.sub(b).unwrap()) / fro(b).max(floor)
}

pub fn iris_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/iris.csv")
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
