//! Complex coefficient and signal vectors plus the handful of BLAS-1 style
//! helpers the solvers need.

use std::ops::{Deref, DerefMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

macro_rules! complex_vec {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, Default, PartialEq)]
        pub struct $name(Vec<Complex64>);

        impl $name {
            pub fn new(entries: Vec<Complex64>) -> Self {
                Self(entries)
            }

            pub fn zeros(len: usize) -> Self {
                Self(vec![Complex64::new(0.0, 0.0); len])
            }

            /// Builds a vector with zero imaginary parts.
            pub fn from_real(values: &[f64]) -> Self {
                Self(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            }

            pub fn into_inner(self) -> Vec<Complex64> {
                self.0
            }

            pub fn norm(&self) -> f64 {
                norm(&self.0)
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
            }

            pub(crate) fn expect_len(&self, expected: usize) -> Result<()> {
                check_len(expected, self.0.len())
            }
        }

        impl Deref for $name {
            type Target = [Complex64];

            fn deref(&self) -> &[Complex64] {
                &self.0
            }
        }

        impl DerefMut for $name {
            fn deref_mut(&mut self) -> &mut [Complex64] {
                &mut self.0
            }
        }

        impl From<Vec<Complex64>> for $name {
            fn from(entries: Vec<Complex64>) -> Self {
                Self(entries)
            }
        }

        impl FromIterator<Complex64> for $name {
            fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
                Self(iter.into_iter().collect())
            }
        }
    };
}

complex_vec!(
    /// A vector in coefficient space (length `M`).
    CoefVec
);

complex_vec!(
    /// A vector in signal space (length `L`). Real signals carry zero imaginary parts.
    SignalVec
);

impl SignalVec {
    pub fn real_parts(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.re).collect()
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    norm_sqr(v).sqrt()
}

/// `‖a − b‖²`
pub fn dist_sqr(a: &[Complex64], b: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

/// `‖a − b‖`
pub fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    dist_sqr(a, b).sqrt()
}

/// Hermitian inner product `⟨a, b⟩ = Σ a_i · conj(b_i)`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// `τ·a + σ·b`
pub fn lincomb(tau: f64, a: &[Complex64], sigma: f64, b: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * tau + y * sigma).collect()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Largest entry magnitude.
pub fn norm_inf(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
