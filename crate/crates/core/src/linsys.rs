//! Dense linear systems `Ax = b` and norm-weighted row sampling.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecops::{dot, norm, norm_sq};

/// A consistent-or-not linear system with a dense row-major matrix.
///
/// Squared row norms and the squared Frobenius norm are cached at
/// construction. The system is immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    row_sq_norms: Vec<f64>,
    frob_sq: f64,
}

impl LinearSystem {
    /// Builds a system from a row-major buffer of `rows * cols` entries.
    pub fn from_row_major(rows: usize, cols: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "system must have at least one row and one column, got {rows}x{cols}"
            )));
        }
        if a.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix buffer",
                expected: rows * cols,
                found: a.len(),
            });
        }
        if b.len() != rows {
            return Err(Error::DimensionMismatch {
                what: "right-hand side",
                expected: rows,
                found: b.len(),
            });
        }
        let row_sq_norms: Vec<f64> = a.chunks_exact(cols).map(norm_sq).collect();
        if let Some(i) = row_sq_norms.iter().position(|&r| r == 0.0) {
            return Err(Error::ZeroRow(i));
        }
        if a.iter()
            .chain(&b)
            .chain(&row_sq_norms)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument(
                "system contains non-finite entries".into(),
            ));
        }
        let frob_sq = row_sq_norms.iter().sum();
        Ok(Self {
            rows,
            cols,
            a,
            b,
            row_sq_norms,
            frob_sq,
        })
    }

    /// Builds a system from a list of rows.
    pub fn from_rows(rows: &[Vec<f64>], b: Vec<f64>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("system must be nonempty".into()));
        }
        let mut a = Vec::with_capacity(m * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "matrix row",
                    expected: n,
                    found: r.len(),
                });
            }
            a.extend_from_slice(r);
        }
        Self::from_row_major(m, n, a, b)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_major(&self) -> &[f64] {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn row_sq_norms(&self) -> &[f64] {
        &self.row_sq_norms
    }

    pub fn frob_sq(&self) -> f64 {
        self.frob_sq
    }

    pub fn check_row(&self, i: usize) -> Result<()> {
        if i < self.rows {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                rows: self.rows,
            })
        }
    }

    /// `Ax`
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_cols(x.len())?;
        Ok(self.a.chunks_exact(self.cols).map(|r| dot(r, x)).collect())
    }

    /// `Aᵀy`
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.cols];
        self.apply_transpose_into(y, &mut out)?;
        Ok(out)
    }

    pub fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch {
                what: "dual vector",
                expected: self.rows,
                found: y.len(),
            });
        }
        self.check_cols(out.len())?;
        out.fill(0.0);
        for (r, &yi) in self.a.chunks_exact(self.cols).zip(y) {
            if yi != 0.0 {
                for (o, aij) in out.iter_mut().zip(r) {
                    *o += yi * aij;
                }
            }
        }
        Ok(())
    }

    /// `‖Ax - b‖₂`
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        self.check_cols(x.len())?;
        Ok(self
            .a
            .chunks_exact(self.cols)
            .zip(&self.b)
            .map(|(r, bi)| {
                let d = dot(r, x) - bi;
                d * d
            })
            .sum::<f64>()
            .sqrt())
    }

    pub fn rhs_norm(&self) -> f64 {
        norm(&self.b)
    }

    fn check_cols(&self, len: usize) -> Result<()> {
        if len == self.cols {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                what: "primal vector",
                expected: self.cols,
                found: len,
            })
        }
    }
}

/// Draws row indices with probability `‖a_i‖² / ‖A‖_F²`.
///
/// The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
/// `seed_from_u64(seed)` on stream 1. Each draw consumes one uniform
/// `u = (next_u64 >> 11) · 2⁻⁵³` and returns the first index whose cumulative
/// probability exceeds `u`, found by binary search.
#[derive(Debug, Clone)]
pub struct RowSampler {
    cumulative: Vec<f64>,
    rng: ChaCha8Rng,
}

impl RowSampler {
    /// ChaCha stream used for row selection; stream 0 is used for problem
    /// generation, so a single seed drives both without overlap.
    pub const STREAM: u64 = 1;

    pub fn new(sys: &LinearSystem, seed: u64) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = sys
            .row_sq_norms()
            .iter()
            .map(|r| {
                acc += r / sys.frob_sq();
                acc
            })
            .collect();
        // Guard against the total rounding to slightly below one.
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(Self::STREAM);
        Self { cumulative, rng }
    }

    pub fn probability(&self, i: usize) -> f64 {
        let lo = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        self.cumulative[i] - lo
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn sample(&mut self) -> usize {
        let u: f64 = self.rng.random();
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.cumulative.len() - 1)
    }
}

/// On-disk problem description (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub x_hat: Vec<f64>,
    pub seed: u64,
}

impl ProblemFile {
    pub fn from_system(sys: &LinearSystem, lambda: f64, x_hat: Vec<f64>, seed: u64) -> Self {
        Self {
            m: sys.rows(),
            n: sys.cols(),
            lambda,
            a: (0..sys.rows()).map(|i| sys.row(i).to_vec()).collect(),
            b: sys.rhs().to_vec(),
            x_hat,
            seed,
        }
    }

    /// Validates the declared shape and builds the system.
    pub fn to_system(&self) -> Result<LinearSystem> {
        if self.a.len() != self.m {
            return Err(Error::DimensionMismatch {
                what: "matrix rows",
                expected: self.m,
                found: self.a.len(),
            });
        }
        if self.x_hat.len() != self.n {
            return Err(Error::DimensionMismatch {
                what: "x_hat",
                expected: self.n,
                found: self.x_hat.len(),
            });
        }
        let sys = LinearSystem::from_rows(&self.a, self.b.clone())?;
        if sys.cols() != self.n {
            return Err(Error::DimensionMismatch {
                what: "matrix columns",
                expected: self.n,
                found: sys.cols(),
            });
        }
        Ok(sys)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("problem file serializes")
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
