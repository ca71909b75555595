//! Test signals, WAV ingestion, target magnitudes and initial coefficients.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linops::LinearTransform;
use crate::magproj::MagnitudeSpec;
use crate::vector::{CoefVec, SignalVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Chirp,
    Multitone,
    NoiseBurst,
}

/// A seeded synthetic signal, written `name[,seed=N][,L=N]`, e.g. `multitone,seed=7,L=256`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub seed: u64,
    pub len: Option<usize>,
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut parts = text.split(',').map(str::trim);
        let kind = match parts.next().unwrap_or_default() {
            "chirp" => GeneratorKind::Chirp,
            "multitone" => GeneratorKind::Multitone,
            "noise-burst" | "noiseburst" => GeneratorKind::NoiseBurst,
            other => return Err(Error::Parse(format!("unknown generator {other:?}"))),
        };
        let mut spec = GeneratorSpec {
            kind,
            seed: 0,
            len: None,
        };
        for part in parts.filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            let bad = |_| Error::Parse(format!("bad value for {key}: {value:?}"));
            match key {
                "seed" => spec.seed = value.parse().map_err(bad)?,
                "L" | "len" => spec.len = Some(value.parse().map_err(bad)?),
                _ => return Err(Error::Parse(format!("unknown generator option {key:?}"))),
            }
        }
        Ok(spec)
    }
}

impl GeneratorSpec {
    /// Generates `len` samples (the spec's own `L` wins when given).
    pub fn generate(&self, len: usize) -> SignalVec {
        let len = self.len.unwrap_or(len);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let samples = match self.kind {
            GeneratorKind::Chirp => chirp(len, &mut rng),
            GeneratorKind::Multitone => multitone(len, &mut rng),
            GeneratorKind::NoiseBurst => noise_burst(len, &mut rng),
        };
        SignalVec::from_real(&samples)
    }
}

fn chirp(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // Frequencies in cycles per sample.
    let f0 = rng.random_range(0.005..0.05);
    let f1 = rng.random_range(0.15..0.45);
    let dur = len.max(1) as f64;
    (0..len)
        .map(|l| {
            let t = l as f64;
            0.8 * (TAU * (f0 * t + (f1 - f0) * t * t / (2.0 * dur))).sin()
        })
        .collect()
}

fn multitone(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let tones: Vec<(f64, f64, f64)> = (0..rng.random_range(3..=5))
        .map(|_| {
            (
                rng.random_range(0.2..1.0),
                rng.random_range(0.01..0.45),
                rng.random_range(0.0..TAU),
            )
        })
        .collect();
    let mut out: Vec<f64> = (0..len)
        .map(|l| {
            tones
                .iter()
                .map(|(amp, f, ph)| amp * (TAU * f * l as f64 + ph).sin())
                .sum()
        })
        .collect();
    let peak = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        out.iter_mut().for_each(|v| *v *= 0.9 / peak);
    }
    out
}

fn noise_burst(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // Hann-tapered uniform noise over the middle third.
    let start = len / 3;
    let width = (len - start).min(len / 3).max(1);
    (0..len)
        .map(|l| {
            if l >= start && l < start + width {
                let taper = (PI * (l - start) as f64 / width as f64).sin().powi(2);
                taper * rng.random_range(-1.0..1.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// Reads a PCM (16/24-bit) or float32 WAV, averages channels, and trims or
/// zero-pads to `len` samples. Integer samples are scaled into `[−1, 1)`.
pub fn ingest_wav(path: impl AsRef<Path>, len: usize) -> Result<SignalVec> {
    let reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16 | 24) => {
            let scale = (1i64 << (spec.bits_per_sample - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f64 / scale))
                .collect::<std::result::Result<_, _>>()?
        }
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()?,
        (format, bits) => {
            return Err(Error::UnsupportedFormat(format!("{bits}-bit {format:?} samples")))
        }
    };
    if interleaved.is_empty() || channels == 0 {
        return Err(Error::EmptyFile);
    }
    let mut mono: Vec<f64> = interleaved
        .chunks(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    mono.resize(len, 0.0);
    Ok(SignalVec::from_real(&mono))
}

/// Writes the real part of a signal as a mono float32 WAV.
pub fn write_wav(path: impl AsRef<Path>, x: &SignalVec, sample_rate: u32) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut w = hound::WavWriter::create(path, spec)?;
    for z in x.iter() {
        w.write_sample(z.re as f32)?;
    }
    w.finalize()?;
    Ok(())
}

/// `s = |Tx|`.
pub fn make_target(transform: &LinearTransform, x: &SignalVec) -> Result<MagnitudeSpec> {
    let c = transform.analyze(x)?;
    Ok(MagnitudeSpec::from_coefficients(&c))
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitMode {
    /// `c_0 = s` with zero phase.
    ZeroPhase,
    /// `c_0,i = s_i·e^{iθ_i}` with seeded uniform `θ_i`.
    RandomPhase { seed: u64 },
    Provided(CoefVec),
}

pub fn init_coeffs(mode: &InitMode, s: &MagnitudeSpec) -> Result<CoefVec> {
    match mode {
        InitMode::ZeroPhase => Ok(CoefVec::from_real(s.as_slice())),
        InitMode::RandomPhase { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok(s.as_slice()
                .iter()
                .map(|&si| Complex64::from_polar(si, rng.random_range(0.0..TAU)))
                .collect())
        }
        InitMode::Provided(c) => {
            c.expect_len(s.len())?;
            Ok(c.clone())
        }
    }
}
