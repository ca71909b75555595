//! Injective linear transforms `T: C^L → C^M` with analysis, pseudo-inverse
//! synthesis and the orthogonal projection onto `range(T)`.

mod dense;
mod gabor;

pub use dense::{DenseTransform, RANK_TOLERANCE};
pub use gabor::{GaborTransform, WindowKind, TAP_TOLERANCE};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::vector::{CoefVec, SignalVec};

/// A full-column-rank transform. Immutable once built; share it freely across runs.
#[derive(Clone, Debug)]
pub enum LinearTransform {
    Dense(DenseTransform),
    Gabor(GaborTransform),
}

impl LinearTransform {
    /// Wraps an explicit `M × L` matrix, rejecting `M < L` and rank-deficient input.
    pub fn dense(matrix: DMatrix<Complex64>) -> Result<Self> {
        DenseTransform::new(matrix).map(Self::Dense)
    }

    /// Discrete Gabor transform of length `len`, hop `hop` and `channels` frequency bins.
    pub fn gabor(len: usize, hop: usize, channels: usize, window: WindowKind) -> Result<Self> {
        GaborTransform::new(len, hop, channels, window).map(Self::Gabor)
    }

    /// Signal dimension `L`.
    pub fn signal_len(&self) -> usize {
        match self {
            Self::Dense(t) => t.cols(),
            Self::Gabor(t) => t.len(),
        }
    }

    /// Coefficient dimension `M`.
    pub fn coef_len(&self) -> usize {
        match self {
            Self::Dense(t) => t.rows(),
            Self::Gabor(t) => t.coef_len(),
        }
    }

    /// `Tx`
    pub fn analyze(&self, x: &SignalVec) -> Result<CoefVec> {
        x.expect_len(self.signal_len())?;
        Ok(self.analyze_slice(x).into())
    }

    /// `T†c = (T*T)⁻¹T*c`
    pub fn synthesize(&self, c: &CoefVec) -> Result<SignalVec> {
        c.expect_len(self.coef_len())?;
        Ok(self.synthesize_slice(c).into())
    }

    /// `P_C1(c) = TT†c`
    pub fn project_range(&self, c: &CoefVec) -> Result<CoefVec> {
        c.expect_len(self.coef_len())?;
        Ok(self.project_slice(c).into())
    }

    /// `2·P_C1(c) − c`
    pub fn reflect_range(&self, c: &CoefVec) -> Result<CoefVec> {
        c.expect_len(self.coef_len())?;
        Ok(self.reflect_slice(c).into())
    }

    pub(crate) fn analyze_slice(&self, x: &[Complex64]) -> Vec<Complex64> {
        match self {
            Self::Dense(t) => t.analyze(x),
            Self::Gabor(t) => t.analyze(x),
        }
    }

    pub(crate) fn synthesize_slice(&self, c: &[Complex64]) -> Vec<Complex64> {
        match self {
            Self::Dense(t) => t.synthesize(c),
            Self::Gabor(t) => t.synthesize(c),
        }
    }

    pub(crate) fn project_slice(&self, c: &[Complex64]) -> Vec<Complex64> {
        match self {
            Self::Dense(t) => t.project(c),
            Self::Gabor(t) => t.project(c),
        }
    }

    pub(crate) fn reflect_slice(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut p = self.project_slice(c);
        for (pi, ci) in p.iter_mut().zip(c) {
            *pi = *pi * 2.0 - ci;
        }
        p
    }

    /// Materializes `T` column by column by analyzing the canonical basis.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let (m, l) = (self.coef_len(), self.signal_len());
        let mut out = DMatrix::zeros(m, l);
        let mut e = vec![Complex64::new(0.0, 0.0); l];
        for k in 0..l {
            e[k] = Complex64::new(1.0, 0.0);
            let col = self.analyze_slice(&e);
            out.column_mut(k).copy_from_slice(&col);
            e[k] = Complex64::new(0.0, 0.0);
        }
        out
    }
}
