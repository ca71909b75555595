//! Discrete Gabor transform on the cyclic group `Z_L`.
//!
//! Coefficients are laid out frame-major: index `n·channels + m` holds
//!
//! ```text
//! c(m, n) = Σ_l x(l) · g(l − n·a) · exp(−2πi·m·l / channels)
//! ```
//!
//! (frequency-invariant phase convention, real window `g`). Synthesis with the
//! canonical dual window `γ = S⁻¹g` realizes the pseudo-inverse `T† = S⁻¹T*`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linops::dense::RANK_TOLERANCE;

/// Window and dual entries below this fraction of their peak are set to zero.
///
/// The Gaussian is far below double precision over most of `Z_L`; dropping
/// those taps changes results by less than rounding and lets analysis and
/// synthesis skip them.
pub const TAP_TOLERANCE: f64 = 1e-18;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowKind {
    /// Periodized Gaussian `exp(−π·l²/(a·channels))`, matched to the lattice.
    Gaussian,
    /// Box of `width` samples centered at the origin.
    Rectangular { width: usize },
}

#[derive(Clone)]
pub struct GaborTransform {
    len: usize,
    hop: usize,
    channels: usize,
    kind: WindowKind,
    window: Vec<f64>,
    dual: Vec<f64>,
    /// Nonzero `(offset, value)` pairs of `window` and `dual`.
    window_taps: Vec<(usize, f64)>,
    dual_taps: Vec<(usize, f64)>,
    frame_bounds: (f64, f64),
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for GaborTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaborTransform")
            .field("len", &self.len)
            .field("hop", &self.hop)
            .field("channels", &self.channels)
            .field("kind", &self.kind)
            .field("frame_bounds", &self.frame_bounds)
            .finish_non_exhaustive()
    }
}

impl GaborTransform {
    pub fn new(len: usize, hop: usize, channels: usize, kind: WindowKind) -> Result<Self> {
        if len == 0 || hop == 0 || channels == 0 {
            return Err(Error::BadLattice(format!(
                "L = {len}, a = {hop}, channels = {channels} must all be positive"
            )));
        }
        if len % hop != 0 {
            return Err(Error::BadLattice(format!("hop {hop} does not divide L = {len}")));
        }
        if len % channels != 0 {
            return Err(Error::BadLattice(format!(
                "channel count {channels} does not divide L = {len}"
            )));
        }
        if channels < hop {
            // M = channels·L/a < L: too few coefficients to be injective.
            return Err(Error::NotAFrame {
                lower: 0.0,
                upper: f64::NAN,
            });
        }

        let mut window = match kind {
            WindowKind::Gaussian => gaussian_window(len, (hop * channels) as f64),
            WindowKind::Rectangular { width } => {
                if width == 0 || width > len {
                    return Err(Error::BadLattice(format!(
                        "rectangular width {width} outside 1..={len}"
                    )));
                }
                rectangular_window(len, width)
            }
        };

        let window_taps = truncate(&mut window);
        let (mut dual, frame_bounds) = canonical_dual(&window, hop, channels)?;
        let dual_taps = truncate(&mut dual);

        let mut planner = FftPlanner::new();
        Ok(Self {
            len,
            hop,
            channels,
            kind,
            window,
            dual,
            window_taps,
            dual_taps,
            frame_bounds,
            fft: planner.plan_fft_forward(channels),
            ifft: planner.plan_fft_inverse(channels),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn frames(&self) -> usize {
        self.len / self.hop
    }

    pub fn coef_len(&self) -> usize {
        self.frames() * self.channels
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn window(&self) -> &[f64] {
        &self.window
    }

    pub fn dual_window(&self) -> &[f64] {
        &self.dual
    }

    /// Lower and upper frame bounds (extreme eigenvalues of the frame operator).
    pub fn frame_bounds(&self) -> (f64, f64) {
        self.frame_bounds
    }

    pub(crate) fn analyze(&self, x: &[Complex64]) -> Vec<Complex64> {
        let (l, m) = (self.len, self.channels);
        let mut out = vec![Complex64::new(0.0, 0.0); self.coef_len()];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        for (n, buf) in out.chunks_exact_mut(m).enumerate() {
            let shift = n * self.hop;
            // x(j)·g(j − shift), folded modulo the channel count.
            for &(k, g) in &self.window_taps {
                let j = wrap(k + shift, l);
                buf[j % m] += x[j] * g;
            }
            self.fft.process_with_scratch(buf, &mut scratch);
        }
        out
    }

    /// Synthesis `Σ c(m,n)·w(l − n·a)·exp(2πi·m·l/channels)` with an arbitrary window.
    fn synthesize_with(&self, taps: &[(usize, f64)], c: &[Complex64]) -> Vec<Complex64> {
        let (l, m) = (self.len, self.channels);
        let mut x = vec![Complex64::new(0.0, 0.0); l];
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.ifft.get_inplace_scratch_len()];
        for (n, frame) in c.chunks_exact(m).enumerate() {
            buf.copy_from_slice(frame);
            self.ifft.process_with_scratch(&mut buf, &mut scratch);
            let shift = n * self.hop;
            for &(k, g) in taps {
                let j = wrap(k + shift, l);
                x[j] += buf[j % m] * g;
            }
        }
        x
    }

    pub(crate) fn synthesize(&self, c: &[Complex64]) -> Vec<Complex64> {
        self.synthesize_with(&self.dual_taps, c)
    }

    /// The adjoint `T*c` (synthesis with the analysis window).
    pub fn adjoint(&self, c: &[Complex64]) -> Vec<Complex64> {
        self.synthesize_with(&self.window_taps, c)
    }

    pub(crate) fn project(&self, c: &[Complex64]) -> Vec<Complex64> {
        self.analyze(&self.synthesize(c))
    }
}

fn wrap(j: usize, len: usize) -> usize {
    if j >= len {
        j - len
    } else {
        j
    }
}

/// Zeroes entries below [`TAP_TOLERANCE`] of the peak and lists the rest.
fn truncate(w: &mut [f64]) -> Vec<(usize, f64)> {
    let peak = w.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    w.iter_mut()
        .enumerate()
        .filter_map(|(k, v)| {
            if v.abs() <= TAP_TOLERANCE * peak {
                *v = 0.0;
                None
            } else {
                Some((k, *v))
            }
        })
        .collect()
}

fn gaussian_window(len: usize, spread: f64) -> Vec<f64> {
    // g(l) = Σ_k exp(−π (l − kL)² / spread); enough periods that the tails vanish.
    let lf = len as f64;
    let periods = ((50.0 * spread / PI).sqrt() / lf).ceil() as i64 + 1;
    let mut g: Vec<f64> = (0..len)
        .map(|l| {
            (-periods..=periods)
                .map(|k| {
                    let t = l as f64 - k as f64 * lf;
                    (-PI * t * t / spread).exp()
                })
                .sum()
        })
        .collect();
    normalize(&mut g);
    g
}

fn rectangular_window(len: usize, width: usize) -> Vec<f64> {
    let mut g = vec![0.0; len];
    let half = width / 2;
    for k in 0..width {
        g[(k + len - half) % len] = 1.0;
    }
    normalize(&mut g);
    g
}

fn normalize(g: &mut [f64]) {
    let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    g.iter_mut().for_each(|v| *v /= n);
}

/// Frame operator `S = T*T` restricted to one residue class modulo `channels`.
///
/// Only samples congruent mod `channels` interact, so `S` splits into
/// `channels` real symmetric blocks of size `L/channels`.
fn frame_block(window: &[f64], hop: usize, channels: usize, residue: usize) -> DMatrix<f64> {
    let l = window.len();
    let size = l / channels;
    let frames = l / hop;
    let mut block = DMatrix::zeros(size, size);
    let at = |j: usize, n: usize| window[(residue + j * channels + l - (n * hop) % l) % l];
    for j in 0..size {
        for k in j..size {
            let v: f64 = (0..frames).map(|n| at(j, n) * at(k, n)).sum::<f64>() * channels as f64;
            block[(j, k)] = v;
            block[(k, j)] = v;
        }
    }
    block
}

/// Returns the canonical dual window and the frame bounds.
fn canonical_dual(window: &[f64], hop: usize, channels: usize) -> Result<(Vec<f64>, (f64, f64))> {
    let l = window.len();
    let size = l / channels;
    let blocks: Vec<DMatrix<f64>> = (0..channels)
        .map(|r| frame_block(window, hop, channels, r))
        .collect();

    let (mut lower, mut upper) = (f64::INFINITY, 0.0f64);
    for block in &blocks {
        let eig = block.clone().symmetric_eigenvalues();
        lower = lower.min(eig.min());
        upper = upper.max(eig.max());
    }
    if !(upper > 0.0) || lower <= RANK_TOLERANCE * upper {
        return Err(Error::NotAFrame { lower, upper });
    }

    let mut dual = vec![0.0; l];
    for (r, block) in blocks.into_iter().enumerate() {
        let chol = block
            .cholesky()
            .ok_or(Error::NotAFrame { lower, upper })?;
        let rhs = nalgebra::DVector::from_iterator(size, (0..size).map(|j| window[r + j * channels]));
        let sol = chol.solve(&rhs);
        for j in 0..size {
            dual[r + j * channels] = sol[j];
        }
    }
    Ok((dual, (lower, upper)))
}
