//! The magnitude constraint set `C2 = {c : |c_i| = s_i}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{check_len, dist, norm_inf, CoefVec};

/// Nonnegative, finite target magnitudes `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MagnitudeSpec(Vec<f64>);

impl MagnitudeSpec {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = s
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidMagnitude { index, value });
        }
        Ok(Self(s))
    }

    /// `|c|` componentwise.
    pub fn from_coefficients(c: &[Complex64]) -> Self {
        Self(c.iter().map(|z| z.norm()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl TryFrom<Vec<f64>> for MagnitudeSpec {
    type Error = Error;

    fn try_from(s: Vec<f64>) -> Result<Self> {
        Self::new(s)
    }
}

impl From<MagnitudeSpec> for Vec<f64> {
    fn from(s: MagnitudeSpec) -> Self {
        s.0
    }
}

/// Rescales every entry to magnitude `s_i`, keeping its phase. Exact zeros map to `s_i`.
pub fn project_magnitude(c: &CoefVec, s: &MagnitudeSpec) -> Result<CoefVec> {
    check_len(s.len(), c.len())?;
    Ok(project_magnitude_slice(c, s.as_slice()).into())
}

pub(crate) fn project_magnitude_slice(c: &[Complex64], s: &[f64]) -> Vec<Complex64> {
    c.iter().zip(s).map(|(&z, &si)| rescale(z, si)).collect()
}

#[inline]
fn rescale(z: Complex64, target: f64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        Complex64::new(target, 0.0)
    } else {
        z * (target / z.norm())
    }
}

/// `d_C2(c) = ‖|c| − s‖`.
pub fn distance_c2(c: &CoefVec, s: &MagnitudeSpec) -> Result<f64> {
    check_len(s.len(), c.len())?;
    Ok(distance_c2_slice(c, s.as_slice()))
}

pub(crate) fn distance_c2_slice(c: &[Complex64], s: &[f64]) -> f64 {
    distance_c2_sqr_slice(c, s).sqrt()
}

pub(crate) fn distance_c2_sqr_slice(c: &[Complex64], s: &[f64]) -> f64 {
    c.iter()
        .zip(s)
        .map(|(z, si)| {
            let d = z.norm() - si;
            d * d
        })
        .sum()
}

/// `2·P_C2(c) − c`.
pub fn reflect_magnitude(c: &CoefVec, s: &MagnitudeSpec) -> Result<CoefVec> {
    check_len(s.len(), c.len())?;
    Ok(reflect_magnitude_slice(c, s.as_slice()).into())
}

pub(crate) fn reflect_magnitude_slice(c: &[Complex64], s: &[f64]) -> Vec<Complex64> {
    c.iter()
        .zip(s)
        .map(|(&z, &si)| rescale(z, si) * 2.0 - z)
        .collect()
}

/// Membership in the pole set `D`: some `|c_i| ≤ tol` while `s_i > tol`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PoleReport {
    pub hit: bool,
    pub indices: Vec<usize>,
}

pub fn in_pole_set(c: &CoefVec, s: &MagnitudeSpec, tol: f64) -> Result<PoleReport> {
    check_len(s.len(), c.len())?;
    if !(tol >= 0.0) {
        return Err(Error::InvalidParams(format!("pole tolerance {tol} must be >= 0")));
    }
    let indices: Vec<usize> = pole_indices(c, s.as_slice(), tol).collect();
    Ok(PoleReport {
        hit: !indices.is_empty(),
        indices,
    })
}

fn pole_indices<'a>(
    c: &'a [Complex64],
    s: &'a [f64],
    tol: f64,
) -> impl Iterator<Item = usize> + 'a {
    c.iter()
        .zip(s)
        .enumerate()
        .filter(move |(_, (z, si))| z.norm() <= tol && **si > tol)
        .map(|(i, _)| i)
}

/// Default diagnostic band for pole detection: `1e−12·‖c‖∞`.
pub fn default_pole_tol(c: &[Complex64]) -> f64 {
    1e-12 * norm_inf(c)
}

pub(crate) fn pole_hit(c: &[Complex64], s: &[f64]) -> bool {
    pole_indices(c, s, default_pole_tol(c)).next().is_some()
}

/// `‖c − P_C2(c)‖`, the right-hand side of the distance identity.
pub fn distance_to_projection(c: &CoefVec, s: &MagnitudeSpec) -> Result<f64> {
    Ok(dist(c, &project_magnitude(c, s)?))
}
