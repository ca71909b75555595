//! Parameter gate for the accelerated iteration: sufficient conditions on
//! `(α, β, γ)` under which
//!
//! ```text
//! d²(c_n) + K1·Δt_n² ≤ d²(c_{n−1}) + K2·Δt_{n−1}²,   K1 > K2 > 0,
//! ```
//!
//! holds for every step, together with the constants themselves.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::vector::{check_len, dist_sqr, lincomb, norm_sqr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `0 < γ ≤ 1`
    GammaLe1,
    /// `1 < γ < 2`
    GammaIn1To2,
    Invalid,
}

impl Regime {
    pub fn of(gamma: f64) -> Self {
        if gamma > 0.0 && gamma <= 1.0 {
            Regime::GammaLe1
        } else if gamma > 1.0 && gamma < 2.0 {
            Regime::GammaIn1To2
        } else {
            Regime::Invalid
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateVerdict {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub cond1_ok: bool,
    /// Strict upper bound on α; `None` when the (β, γ) condition fails.
    pub alpha_bound: Option<f64>,
    pub alpha_ok: bool,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub regime: Regime,
}

impl GateVerdict {
    pub fn passed(&self) -> bool {
        self.alpha_ok
    }
}

/// Relative margin on the strict inequality of [`check_cond1`].
///
/// Decimal inputs such as β = 0.75, γ = 1.4 sit exactly on the boundary, but
/// their binary representations can land a few ulps inside it. The α bound is
/// zero on the boundary, so nothing usable is lost by the margin.
pub const COND1_MARGIN: f64 = 1e-12;

/// `0 < γ < 2` and `0 ≤ 2β|1 − γ| < 2 − γ`.
pub fn check_cond1(beta: f64, gamma: f64) -> bool {
    beta >= 0.0
        && gamma > 0.0
        && gamma < 2.0
        && 2.0 * beta * (1.0 - gamma).abs() < (2.0 - gamma) * (1.0 - COND1_MARGIN)
}

/// Supremum of admissible α for a (β, γ) pair that satisfies [`check_cond1`].
pub fn alpha_bound(beta: f64, gamma: f64) -> Result<f64> {
    if !check_cond1(beta, gamma) {
        return Err(Error::Cond1Violated { beta, gamma });
    }
    Ok(alpha_bound_unchecked(beta, gamma))
}

fn alpha_bound_unchecked(beta: f64, gamma: f64) -> f64 {
    if gamma <= 1.0 {
        (1.0 - 1.0 / gamma) * beta + 1.0 / gamma - 0.5
    } else {
        1.0 / (2.0 * beta * (gamma - 1.0) + gamma) - 0.5
    }
}

fn constants_unchecked(alpha: f64, beta: f64, gamma: f64) -> (f64, f64) {
    let a2 = alpha * alpha;
    let w = (1.0 - gamma) / gamma;
    let tail1 = (1.0 - alpha - a2) / gamma;
    let tail2 = (alpha - a2) / gamma;
    if gamma <= 1.0 {
        (
            w * (1.0 + 2.0 * alpha + a2 - beta - alpha * beta) + tail1,
            w * (beta - alpha * beta + a2) + tail2,
        )
    } else {
        (
            w * (1.0 + 2.0 * alpha + a2 + beta + alpha * beta) + tail1,
            w * (a2 - beta - 3.0 * alpha * beta) + tail2,
        )
    }
}

/// Full verdict. α = 0 is rejected because K2 degenerates there.
pub fn gate(alpha: f64, beta: f64, gamma: f64) -> GateVerdict {
    evaluate(alpha, beta, gamma, false)
}

/// Like [`gate`], but admits α = 0. Such a verdict passes with no K1/K2, which
/// disables descent monitoring for the run.
pub fn gate_allowing_zero_alpha(alpha: f64, beta: f64, gamma: f64) -> GateVerdict {
    evaluate(alpha, beta, gamma, true)
}

fn evaluate(alpha: f64, beta: f64, gamma: f64, allow_zero_alpha: bool) -> GateVerdict {
    let cond1_ok = check_cond1(beta, gamma);
    let regime = if cond1_ok {
        Regime::of(gamma)
    } else {
        Regime::Invalid
    };
    let bound = cond1_ok.then(|| alpha_bound_unchecked(beta, gamma));
    let below = bound.is_some_and(|b| alpha < b);
    let alpha_ok = below && (alpha > 0.0 || (allow_zero_alpha && alpha == 0.0));
    let (k1, k2) = if alpha_ok && alpha > 0.0 {
        let (k1, k2) = constants_unchecked(alpha, beta, gamma);
        (Some(k1), Some(k2))
    } else {
        (None, None)
    };
    GateVerdict {
        alpha,
        beta,
        gamma,
        cond1_ok,
        alpha_bound: bound,
        alpha_ok,
        k1,
        k2,
        regime,
    }
}

/// Descent constants `(K1, K2)` for a gate-passing triple.
pub fn descent_constants(alpha: f64, beta: f64, gamma: f64) -> Result<(f64, f64)> {
    let verdict = gate(alpha, beta, gamma);
    match (verdict.k1, verdict.k2) {
        (Some(k1), Some(k2)) => Ok((k1, k2)),
        _ => Err(Error::GateFailed { alpha, beta, gamma }),
    }
}

/// `d² + K2·Δt²`
pub fn lyapunov(d2: f64, delta_t: f64, k2: f64) -> f64 {
    d2 + k2 * delta_t * delta_t
}

/// Evaluates both sides of
/// `‖τa + σb‖² = (τ+σ)τ‖a‖² + (τ+σ)σ‖b‖² − τσ‖a − b‖²`.
pub fn parallelogram_identity(
    a: &[Complex64],
    b: &[Complex64],
    tau: f64,
    sigma: f64,
) -> Result<(f64, f64)> {
    check_len(a.len(), b.len())?;
    let lhs = norm_sqr(&lincomb(tau, a, sigma, b));
    let rhs = (tau + sigma) * tau * norm_sqr(a) + (tau + sigma) * sigma * norm_sqr(b)
        - tau * sigma * dist_sqr(a, b);
    Ok((lhs, rhs))
}

/// Evenly spaced nodes `min, min + step, …, max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min <= max) || points < 2 {
            return Err(Error::InvalidParams(format!(
                "grid axis [{min}, {max}] with {points} points"
            )));
        }
        Ok(Self { min, max, points })
    }

    /// Axis with spacing `step`; `max` is included when it lies on the lattice.
    pub fn with_step(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidParams(format!("grid step {step} must be positive")));
        }
        let intervals = ((max - min) / step + 1e-9).floor() as usize;
        let axis = Self::new(min, min + intervals as f64 * step, intervals + 1)?;
        Ok(axis)
    }

    /// Node values, rounded to 12 decimals so decimal grids land on exact values like 1.0.
    pub fn nodes(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let v = self.min + k as f64 * step;
                (v * 1e12).round() / 1e12
            })
            .collect()
    }
}

/// Largest admissible α on a (β, γ) lattice; `None` where the (β, γ) condition fails.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaGrid {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    /// `cells[i][j]` belongs to `(betas[i], gammas[j])`.
    pub cells: Vec<Vec<Option<f64>>>,
}

pub fn alpha_grid(beta: GridAxis, gamma: GridAxis) -> Result<AlphaGrid> {
    if beta.min < 0.0 {
        return Err(Error::InvalidParams("beta axis must be nonnegative".into()));
    }
    let betas = beta.nodes();
    let gammas = gamma.nodes();
    let cells = betas
        .iter()
        .map(|&b| gammas.iter().map(|&g| alpha_bound(b, g).ok()).collect())
        .collect();
    Ok(AlphaGrid {
        betas,
        gammas,
        cells,
    })
}

impl AlphaGrid {
    /// CSV with β rows and γ columns; failing cells are left empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["beta".to_string()];
        header.extend(self.gammas.iter().map(|g| g.to_string()));
        w.write_record(&header)?;
        for (b, row) in self.betas.iter().zip(&self.cells) {
            let mut rec = vec![b.to_string()];
            rec.extend(row.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
