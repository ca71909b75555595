//! Iteration engines: alternating projections (GLA), its one- and
//! two-sequence inertial variants (FGLA, AGLA), RAAR and the Difference Map.
//!
//! All five share [`run`], which records one [`TraceRecord`] per iterate.
//! For the projected methods the point `y_n = P_C1(P_C2(c_n))` needed by the
//! trace is also the input of the next step, so it is computed once.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guarantees::{gate, lyapunov};
use crate::linops::LinearTransform;
use crate::magproj::{distance_c2_slice, pole_hit, project_magnitude_slice, MagnitudeSpec};
use crate::metrics::ssnr_from_distance;
use crate::vector::{check_len, dist, norm, CoefVec, SignalVec};

/// Relaxation used in the comparison runs for RAAR.
pub const RAAR_DEFAULT_LAMBDA: f64 = 0.9;
/// Difference-map parameter used in the comparison runs.
pub const DM_DEFAULT_RHO: f64 = 0.8;
/// Momentum used for FGLA in the comparison runs (outside its guarantee).
pub const FGLA_DEFAULT_ALPHA: f64 = 0.99;
/// Best-scoring triple that satisfies the convergence conditions.
pub const AGLA_GUARANTEED: (f64, f64, f64) = (0.09, 1.1, 0.2);
/// Best-scoring triple overall; it does not satisfy the conditions.
pub const AGLA_FASTEST: (f64, f64, f64) = (1.05, 1.35, 1.25);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Algorithm {
    Gla,
    Fgla { alpha: f64 },
    Agla { alpha: f64, beta: f64, gamma: f64 },
    Raar { lambda: f64 },
    Dm { rho: f64 },
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Gla => "gla",
            Algorithm::Fgla { .. } => "fgla",
            Algorithm::Agla { .. } => "agla",
            Algorithm::Raar { .. } => "raar",
            Algorithm::Dm { .. } => "dm",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        match *self {
            Algorithm::Gla => Ok(()),
            Algorithm::Fgla { alpha } if !(alpha >= 0.0 && alpha.is_finite()) => {
                bad(format!("alpha = {alpha} must be finite and >= 0"))
            }
            Algorithm::Agla { alpha, beta, gamma }
                if !(alpha >= 0.0 && beta >= 0.0 && gamma > 0.0)
                    || !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) =>
            {
                bad(format!(
                    "(alpha, beta, gamma) = ({alpha}, {beta}, {gamma}) needs alpha, beta >= 0 and gamma > 0"
                ))
            }
            Algorithm::Raar { lambda } if !(lambda > 0.0 && lambda <= 1.0) => {
                bad(format!("lambda = {lambda} must lie in (0, 1]"))
            }
            Algorithm::Dm { rho } if !(rho != 0.0 && rho.is_finite()) => {
                bad(format!("rho = {rho} must be finite and nonzero"))
            }
            _ => Ok(()),
        }
    }

    /// `(K1, K2)` when the parameters carry the descent guarantee.
    pub fn descent_constants(&self) -> Option<(f64, f64)> {
        let verdict = match *self {
            Algorithm::Fgla { alpha } => gate(alpha, 0.0, 1.0),
            Algorithm::Agla { alpha, beta, gamma } => gate(alpha, beta, gamma),
            _ => return None,
        };
        verdict.k1.zip(verdict.k2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub algorithm: Algorithm,
    /// Iteration budget `N ≥ 1`.
    pub max_iters: usize,
    /// Stop once the step norm drops below this value.
    pub stop_delta_t: Option<f64>,
}

impl SolverParams {
    pub fn new(algorithm: Algorithm, max_iters: usize) -> Self {
        Self {
            algorithm,
            max_iters,
            stop_delta_t: None,
        }
    }

    pub fn with_stop_delta_t(mut self, tol: f64) -> Self {
        self.stop_delta_t = Some(tol);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be >= 1".into()));
        }
        if let Some(tol) = self.stop_delta_t {
            if !(tol >= 0.0) {
                return Err(Error::InvalidParams(format!("stop_delta_t = {tol} must be >= 0")));
            }
        }
        self.algorithm.validate()
    }
}

/// Iterates of the inertial methods. `t`, `d` and `t_prev` stay in `range(T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateState {
    pub c: CoefVec,
    pub t: CoefVec,
    pub d: CoefVec,
    pub t_prev: CoefVec,
    pub n: usize,
}

impl IterateState {
    /// `‖t_n − t_{n−1}‖`
    pub fn delta_t(&self) -> f64 {
        dist(&self.t, &self.t_prev)
    }
}

/// One row of a run's diagnostics.
///
/// `delta_t` is `‖t_n − t_{n−1}‖` for FGLA/AGLA and `‖c_n − c_{n−1}‖` for the
/// single-sequence methods; row 0 has `delta_t = 0`. SSNR values are taken on
/// coefficient vectors, `−10·log10(‖|v| − s‖/‖s‖)`, which equals the signal
/// SSNR of `T†v` whenever `v ∈ range(T)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub n: usize,
    /// `d_C2²(c_n)`
    pub d2: f64,
    pub delta_t: f64,
    /// `d2 + K2·delta_t²`, with `K2 = 0` when the run carries no guarantee.
    pub lyapunov: f64,
    /// `‖P_C1(P_C2(c_n)) − c_n‖`
    pub residual: f64,
    pub ssnr_c: f64,
    /// SSNR of `y_n = P_C1(P_C2(c_n))`.
    pub ssnr_y: f64,
    pub pole_hit: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub algorithm: Algorithm,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    /// Whether `c_0` already lay in `range(T)`.
    pub init_in_range: bool,
    pub records: Vec<TraceRecord>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trace: Trace,
    pub coefficients: CoefVec,
    /// `T†c_N`
    pub signal: SignalVec,
}

/// What a monitor sees after each recorded iterate. Monitors cannot change the run.
#[derive(Debug)]
pub struct IterateView<'a> {
    pub n: usize,
    pub c: &'a [Complex64],
    /// `P_C1(P_C2(c_n))`
    pub y: &'a [Complex64],
    pub record: &'a TraceRecord,
}

/// A transform paired with its target magnitudes.
#[derive(Clone, Copy, Debug)]
pub struct Problem<'a> {
    transform: &'a LinearTransform,
    target: &'a MagnitudeSpec,
}

impl<'a> Problem<'a> {
    pub fn new(transform: &'a LinearTransform, target: &'a MagnitudeSpec) -> Result<Self> {
        check_len(transform.coef_len(), target.len())?;
        Ok(Self { transform, target })
    }

    pub fn transform(&self) -> &'a LinearTransform {
        self.transform
    }

    pub fn target(&self) -> &'a MagnitudeSpec {
        self.target
    }

    fn p1(&self, c: &[Complex64]) -> Vec<Complex64> {
        self.transform.project_slice(c)
    }

    fn p2(&self, c: &[Complex64]) -> Vec<Complex64> {
        project_magnitude_slice(c, self.target.as_slice())
    }

    fn alternate(&self, c: &[Complex64]) -> Vec<Complex64> {
        self.p1(&self.p2(c))
    }

    fn check(&self, c: &[Complex64]) -> Result<()> {
        check_len(self.transform.coef_len(), c.len())
    }

    /// Initial inertial state with `t_0 = d_0 = P_C1(c_0)`.
    pub fn init_state(&self, c0: &CoefVec) -> Result<IterateState> {
        self.check(c0)?;
        let t0: CoefVec = self.p1(c0).into();
        Ok(IterateState {
            c: c0.clone(),
            t: t0.clone(),
            d: t0.clone(),
            t_prev: t0,
            n: 0,
        })
    }

    /// `P_C1(P_C2(c))`
    pub fn step_gla(&self, c: &CoefVec) -> Result<CoefVec> {
        self.check(c)?;
        Ok(self.alternate(c).into())
    }

    /// `t_n = P_C1(P_C2(c_{n−1}))`, `c_n = t_n + α(t_n − t_{n−1})`.
    pub fn step_fgla(&self, state: &mut IterateState, alpha: f64) -> Result<()> {
        self.check(&state.c)?;
        let y = self.alternate(&state.c);
        advance_fgla(state, y, alpha);
        Ok(())
    }

    /// `t_n = (1−γ)d_{n−1} + γ·P_C1(P_C2(c_{n−1}))`, then both extrapolations.
    pub fn step_agla(&self, state: &mut IterateState, alpha: f64, beta: f64, gamma: f64) -> Result<()> {
        self.check(&state.c)?;
        let y = self.alternate(&state.c);
        advance_agla(state, y, alpha, beta, gamma);
        Ok(())
    }


    /// `c⁺ = (λ/2)(c + R_C1(R_C2(c))) + (1−λ)P_C2(c)` with `R = 2P − I`.
    pub fn step_raar(&self, c: &CoefVec, lambda: f64) -> Result<CoefVec> {
        self.check(c)?;
        let p2 = self.p2(c);
        Ok(self.raar_from(c, &p2, lambda).into())
    }

    fn raar_from(&self, c: &[Complex64], p2: &[Complex64], lambda: f64) -> Vec<Complex64> {
        let r2: Vec<Complex64> = p2.iter().zip(c).map(|(p, x)| p * 2.0 - x).collect();
        let p1r2 = self.p1(&r2);
        c.iter()
            .zip(&r2)
            .zip(p1r2.iter().zip(p2))
            .map(|((x, r), (q, p))| {
                let r1r2 = q * 2.0 - r;
                (x + r1r2) * (lambda / 2.0) + p * (1.0 - lambda)
            })
            .collect()
    }

    /// Difference map:
    ///
    /// ```text
    /// u = P_C2(c) + (P_C2(c) − c)/ρ
    /// v = P_C1(c) + (P_C1(c) − c)/ρ
    /// c⁺ = c + ρ(P_C1(u) − P_C2(v))
    /// ```
    pub fn step_dm(&self, c: &CoefVec, rho: f64) -> Result<CoefVec> {
        self.check(c)?;
        let p2 = self.p2(c);
        Ok(self.dm_from(c, &p2, rho).into())
    }

    fn dm_from(&self, c: &[Complex64], p2: &[Complex64], rho: f64) -> Vec<Complex64> {
        let inv = 1.0 / rho;
        let p1 = self.p1(c);
        let u: Vec<Complex64> = p2.iter().zip(c).map(|(p, x)| p + (p - x) * inv).collect();
        let v: Vec<Complex64> = p1.iter().zip(c).map(|(p, x)| p + (p - x) * inv).collect();
        let p1u = self.p1(&u);
        let p2v = self.p2(&v);
        c.iter()
            .zip(p1u.iter().zip(&p2v))
            .map(|(x, (a, b))| x + (a - b) * rho)
            .collect()
    }
}

fn advance_fgla(state: &mut IterateState, y: Vec<Complex64>, alpha: f64) {
    let t_new = CoefVec::from(y);
    state.t_prev = std::mem::replace(&mut state.t, t_new);
    state.c = extrapolate(&state.t, &state.t_prev, alpha);
    state.d = state.t.clone();
    state.n += 1;
}

fn advance_agla(state: &mut IterateState, y: Vec<Complex64>, alpha: f64, beta: f64, gamma: f64) {
    let t_new: CoefVec = state
        .d
        .iter()
        .zip(&y)
        .map(|(d, p)| d * (1.0 - gamma) + p * gamma)
        .collect();
    state.t_prev = std::mem::replace(&mut state.t, t_new);
    state.c = extrapolate(&state.t, &state.t_prev, alpha);
    state.d = extrapolate(&state.t, &state.t_prev, beta);
    state.n += 1;
}

/// `t + w(t − t_prev)`
fn extrapolate(t: &[Complex64], t_prev: &[Complex64], w: f64) -> CoefVec {
    t.iter().zip(t_prev).map(|(a, b)| a + (a - b) * w).collect()
}

/// Runs `params.max_iters` steps (or fewer with early stopping) from `init`.
pub fn run(
    transform: &LinearTransform,
    target: &MagnitudeSpec,
    params: &SolverParams,
    init: &CoefVec,
) -> Result<RunOutput> {
    run_monitored(transform, target, params, init, &mut |_| {})
}

/// [`run`] with a callback invoked after every recorded iterate, `n = 0..=N`.
pub fn run_monitored(
    transform: &LinearTransform,
    target: &MagnitudeSpec,
    params: &SolverParams,
    init: &CoefVec,
    monitor: &mut dyn FnMut(&IterateView<'_>),
) -> Result<RunOutput> {
    params.validate()?;
    let problem = Problem::new(transform, target)?;
    problem.check(init)?;
    if !init.is_finite() {
        return Err(Error::NonFiniteIterate { iter: 0 });
    }
    let s = target.as_slice();
    let s_norm = target.norm();
    if s_norm == 0.0 {
        return Err(Error::ZeroTarget);
    }

    let algorithm = params.algorithm;
    let constants = algorithm.descent_constants();
    let k2 = constants.map_or(0.0, |(_, k2)| k2);

    let mut state = problem.init_state(init)?;
    let init_in_range = dist(&state.t, init) <= 1e-10 * norm(init).max(f64::MIN_POSITIVE);
    let mut c: Vec<Complex64> = init.to_vec();
    let mut delta_t = 0.0;
    let mut records = Vec::with_capacity(params.max_iters + 1);

    for n in 0..=params.max_iters {
        let p2 = problem.p2(&c);
        let y = problem.p1(&p2);

        let d2 = crate::magproj::distance_c2_sqr_slice(&c, s);
        let record = TraceRecord {
            n,
            d2,
            delta_t,
            lyapunov: lyapunov(d2, delta_t, k2),
            residual: dist(&y, &c),
            ssnr_c: ssnr_from_distance(d2.sqrt(), s_norm),
            ssnr_y: ssnr_from_distance(distance_c2_slice(&y, s), s_norm),
            pole_hit: pole_hit(&c, s),
        };
        monitor(&IterateView {
            n,
            c: &c,
            y: &y,
            record: &record,
        });
        records.push(record);

        let converged = n > 0 && params.stop_delta_t.is_some_and(|tol| delta_t < tol);
        if n == params.max_iters || converged {
            break;
        }

        let next = match algorithm {
            Algorithm::Gla => y,
            Algorithm::Fgla { alpha } => {
                advance_fgla(&mut state, y, alpha);
                state.c.to_vec()
            }
            Algorithm::Agla { alpha, beta, gamma } => {
                advance_agla(&mut state, y, alpha, beta, gamma);
                state.c.to_vec()
            }
            Algorithm::Raar { lambda } => problem.raar_from(&c, &p2, lambda),
            Algorithm::Dm { rho } => problem.dm_from(&c, &p2, rho),
        };
        if next.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFiniteIterate { iter: n + 1 });
        }
        delta_t = match algorithm {
            Algorithm::Fgla { .. } | Algorithm::Agla { .. } => state.delta_t(),
            _ => dist(&next, &c),
        };
        c = next;
    }

    let coefficients = CoefVec::from(c);
    let signal = transform.synthesize(&coefficients)?;
    Ok(RunOutput {
        trace: Trace {
            algorithm,
            k1: constants.map(|(k1, _)| k1),
            k2: constants.map(|(_, k2)| k2),
            init_in_range,
            records,
        },
        coefficients,
        signal,
    })
}
