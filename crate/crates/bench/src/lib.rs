//! Fixtures shared by the benchmarks in `benches/`.

use agla_core::signal::{init_coeffs, make_target, GeneratorSpec, InitMode};
use agla_core::{CoefVec, LinearTransform, MagnitudeSpec, WindowKind};

pub struct Fixture {
    pub transform: LinearTransform,
    pub target: MagnitudeSpec,
    pub init: CoefVec,
}

/// Gaussian-window Gabor frame with the magnitudes of a seeded multitone.
pub fn gabor_fixture(len: usize, hop: usize, channels: usize) -> Fixture {
    let transform = LinearTransform::gabor(len, hop, channels, WindowKind::Gaussian)
        .expect("benchmark lattice must be a frame");
    let x = GeneratorSpec {
        kind: agla_core::signal::GeneratorKind::Multitone,
        seed: 7,
        len: None,
    }
    .generate(len);
    let target = make_target(&transform, &x).expect("lengths match");
    let init = init_coeffs(&InitMode::ZeroPhase, &target).expect("lengths match");
    Fixture {
        transform,
        target,
        init,
    }
}
