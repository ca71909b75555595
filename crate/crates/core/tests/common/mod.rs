//! Random instances shared by the integration tests.
#![allow(dead_code)]

use agla_core::signal::{init_coeffs, make_target, InitMode};
use agla_core::{CoefVec, Complex64, LinearTransform, MagnitudeSpec, SignalVec, WindowKind};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vec(rng: &mut impl Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| gaussian_complex(rng)).collect()
}

pub fn dense_transform(rng: &mut impl Rng, rows: usize, cols: usize) -> LinearTransform {
    let entries = gaussian_vec(rng, rows * cols);
    LinearTransform::dense(DMatrix::from_row_slice(rows, cols, &entries)).unwrap()
}

/// A transform, consistent magnitudes `|Tx|` and an initial point inside `range(T)`.
pub struct Instance {
    pub label: String,
    pub transform: LinearTransform,
    pub signal: SignalVec,
    pub target: MagnitudeSpec,
    pub init: CoefVec,
}

fn finish(label: String, transform: LinearTransform, signal: SignalVec, seed: u64) -> Instance {
    let target = make_target(&transform, &signal).unwrap();
    let phased = init_coeffs(&InitMode::RandomPhase { seed }, &target).unwrap();
    let init = transform.project_range(&phased).unwrap();
    Instance {
        label,
        transform,
        signal,
        target,
        init,
    }
}

/// Complex Gaussian `T` (16×8) and `x`.
pub fn dense_instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    let t = dense_transform(&mut r, 16, 8);
    let x = SignalVec::new(gaussian_vec(&mut r, 8));
    finish(format!("dense#{seed}"), t, x, seed ^ 0x5eed)
}

/// Gaussian-window Gabor transform (L=256, a=8, Mch=16) of real white noise.
pub fn gabor_instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    let t = LinearTransform::gabor(256, 8, 16, WindowKind::Gaussian).unwrap();
    let x: Vec<f64> = (0..256).map(|_| r.sample(StandardNormal)).collect();
    finish(format!("gabor#{seed}"), t, SignalVec::from_real(&x), seed ^ 0x5eed)
}

/// 80 dense and 20 Gabor instances.
pub fn mixed_instances() -> Vec<Instance> {
    (0..80)
        .map(|k| dense_instance(1000 + k))
        .chain((0..20).map(|k| gabor_instance(2000 + k)))
        .collect()
}
