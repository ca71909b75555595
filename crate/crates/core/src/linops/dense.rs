use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative singular-value floor below which a matrix is treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Explicit `M × L` matrix with a cached thin QR factorization.
///
/// With `T = QR`, the pseudo-inverse is `R⁻¹Q*` and the range projection is `QQ*`.
#[derive(Clone, Debug)]
pub struct DenseTransform {
    matrix: DMatrix<Complex64>,
    q: DMatrix<Complex64>,
    q_adjoint: DMatrix<Complex64>,
    r: DMatrix<Complex64>,
    singular_values: Vec<f64>,
}

impl DenseTransform {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if cols == 0 || rows < cols {
            return Err(Error::BadShape { rows, cols });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parse("matrix has non-finite entries".into()));
        }

        let mut singular_values: Vec<f64> = matrix
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let sigma_max = singular_values[0];
        let sigma_min = *singular_values.last().unwrap();
        if !(sigma_max > 0.0) || sigma_min < RANK_TOLERANCE * sigma_max {
            return Err(Error::RankDeficient {
                sigma_min,
                sigma_max,
            });
        }

        let qr = matrix.clone().qr();
        let q = qr.q();
        let r = qr.r();
        Ok(Self {
            q_adjoint: q.adjoint(),
            matrix,
            q,
            r,
            singular_values,
        })
    }

    /// Builds from row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub(crate) fn analyze(&self, x: &[Complex64]) -> Vec<Complex64> {
        let x = DVector::from_column_slice(x);
        (&self.matrix * x).data.into()
    }

    pub(crate) fn synthesize(&self, c: &[Complex64]) -> Vec<Complex64> {
        let c = DVector::from_column_slice(c);
        let rhs = &self.q_adjoint * c;
        self.r
            .solve_upper_triangular(&rhs)
            .expect("R is nonsingular for a full-rank transform")
            .data
            .into()
    }

    pub(crate) fn project(&self, c: &[Complex64]) -> Vec<Complex64> {
        let c = DVector::from_column_slice(c);
        let coords = &self.q_adjoint * c;
        (&self.q * coords).data.into()
    }
}
