//! Quality metrics and brute-force oracles.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::LinearTransform;
use crate::magproj::{distance_c2_slice, project_magnitude_slice, MagnitudeSpec};
use crate::solvers::{Trace, TraceRecord};
use crate::vector::{check_len, dist, CoefVec, SignalVec};

/// Reported in place of `+∞` when the magnitudes match exactly.
pub const SSNR_CAP: f64 = 310.0;

/// Absolute slack allowed by [`descent_audit`].
pub const DESCENT_SLACK: f64 = 1e-9;

/// `−10·log10(‖|Tx| − s‖ / ‖s‖)`.
///
/// This is a ratio of norms, not of squared norms, so it is half of the
/// `20·log10` convention used elsewhere.
pub fn ssnr(transform: &LinearTransform, x: &SignalVec, s: &MagnitudeSpec) -> Result<f64> {
    check_len(transform.coef_len(), s.len())?;
    let coef = transform.analyze(x)?;
    let s_norm = s.norm();
    if s_norm == 0.0 {
        return Err(Error::ZeroTarget);
    }
    Ok(ssnr_from_distance(distance_c2_slice(&coef, s.as_slice()), s_norm))
}

/// SSNR from a precomputed distance `‖|c| − s‖` and `‖s‖ > 0`, capped at [`SSNR_CAP`].
pub fn ssnr_from_distance(distance: f64, s_norm: f64) -> f64 {
    if distance == 0.0 {
        return SSNR_CAP;
    }
    (-10.0 * (distance / s_norm).log10()).min(SSNR_CAP)
}

/// `‖P_C1(P_C2(c)) − c‖`; zero exactly at fixed points of alternating projections.
pub fn fixed_point_residual(
    transform: &LinearTransform,
    c: &CoefVec,
    s: &MagnitudeSpec,
) -> Result<f64> {
    check_len(transform.coef_len(), s.len())?;
    check_len(transform.coef_len(), c.len())?;
    let y = transform.project_slice(&project_magnitude_slice(c, s.as_slice()));
    Ok(dist(&y, c))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricSample {
    pub ssnr: f64,
    pub residual: f64,
    pub d2: f64,
}

/// Metrics of a coefficient vector; the SSNR is that of `T†c`.
pub fn sample(transform: &LinearTransform, c: &CoefVec, s: &MagnitudeSpec) -> Result<MetricSample> {
    let residual = fixed_point_residual(transform, c, s)?;
    let d = distance_c2_slice(c, s.as_slice());
    let x = transform.synthesize(c)?;
    Ok(MetricSample {
        ssnr: ssnr(transform, &x, s)?,
        residual,
        d2: d * d,
    })
}

/// Nearest point of `C2` among `grid_points` equally spaced phases per entry.
///
/// Ties go to the lowest phase index, so a zero entry maps to `s_i` (phase 0).
pub fn oracle_nearest_c2(c: &CoefVec, s: &MagnitudeSpec, grid_points: usize) -> Result<CoefVec> {
    check_len(s.len(), c.len())?;
    if grid_points == 0 {
        return Err(Error::InvalidParams("phase grid needs at least one point".into()));
    }
    let phases: Vec<Complex64> = (0..grid_points)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / grid_points as f64))
        .collect();
    Ok(c.iter()
        .zip(s.as_slice())
        .map(|(&z, &si)| {
            let mut best = Complex64::new(si, 0.0);
            let mut best_d = f64::INFINITY;
            for ph in &phases {
                // ‖z − s·ph‖² minus the constant ‖z‖²; exact ties stay exact.
                let d = si * si - 2.0 * si * (z.re * ph.re + z.im * ph.im);
                if d < best_d {
                    best_d = d;
                    best = ph * si;
                }
            }
            best
        })
        .collect())
}

/// Outcome of checking `d²(c_n) + K1·Δt_n² ≤ d²(c_{n−1}) + K2·Δt_{n−1}² + slack`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub passed: bool,
    /// First iteration index `n` where the inequality fails.
    pub first_violation: Option<usize>,
    pub violations: usize,
    /// Largest `lhs − rhs` seen, floored at zero.
    pub max_slack_used: f64,
    pub checked_steps: usize,
    pub first_step: usize,
}

/// Audits a trace against the descent inequality.
///
/// The inequality needs `c_{n−1} ∈ range(T)`. When the run started outside the
/// range (zero-phase start, say) the check begins at `n = 2`.
pub fn descent_audit(trace: &Trace, k1: f64, k2: f64) -> AuditReport {
    let first = if trace.init_in_range { 1 } else { 2 };
    descent_audit_from(&trace.records, k1, k2, first)
}

pub fn descent_audit_from(records: &[TraceRecord], k1: f64, k2: f64, first_step: usize) -> AuditReport {
    let mut report = AuditReport {
        passed: true,
        first_violation: None,
        violations: 0,
        max_slack_used: 0.0,
        checked_steps: 0,
        first_step,
    };
    for pair in records.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        if cur.n < first_step {
            continue;
        }
        let lhs = cur.d2 + k1 * cur.delta_t * cur.delta_t;
        let rhs = prev.d2 + k2 * prev.delta_t * prev.delta_t;
        let excess = lhs - rhs;
        report.checked_steps += 1;
        report.max_slack_used = report.max_slack_used.max(excess);
        if !(excess <= DESCENT_SLACK) {
            report.violations += 1;
            report.first_violation.get_or_insert(cur.n);
            report.passed = false;
        }
    }
    report
}
