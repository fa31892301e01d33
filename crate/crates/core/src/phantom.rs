//! Synthetic 3-D+t test volumes with controlled motion.
//!
//! Noise comes from ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`, drawing one `next_u64` per voxel in storage
//! order and mapping it to `u % (2a + 1) - a`. Both the stream and the
//! mapping are value-stable, so golden outputs are portable.

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::volume::{Dims, Volume};

/// Seeded additive texture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    pub seed: u64,
    pub amplitude: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhantomKind {
    Constant {
        value: i32,
    },
    /// Horizontal ramp (`slope` codes per pixel) moving `velocity` px/frame along x.
    TranslatingGradient {
        velocity: f64,
        slope: f64,
    },
    /// Disk whose radius oscillates as `base + amplitude * sin(2π t / period)`.
    DeformingDisk {
        center: (f64, f64),
        base_radius: f64,
        radius_amplitude: f64,
        period: usize,
        inside: i32,
        outside: i32,
        antialias: bool,
    },
    /// Mid-level plane plus uniform noise.
    NoiseField {
        seed: u64,
        amplitude: u32,
    },
}

impl PhantomKind {
    /// Disk centred in an `nx` x `ny` frame with the default intensities.
    pub fn deforming_disk(nx: usize, ny: usize, base_radius: f64, radius_amplitude: f64, period: usize) -> Self {
        PhantomKind::DeformingDisk {
            center: ((nx as f64 - 1.0) / 2.0, (ny as f64 - 1.0) / 2.0),
            base_radius,
            radius_amplitude,
            period,
            inside: 2600,
            outside: 900,
            antialias: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub kind: PhantomKind,
    pub dims: Dims,
    pub bit_depth: u32,
    /// Optional texture added on top of `kind`.
    pub noise: Option<Noise>,
}

impl PhantomSpec {
    pub fn new(kind: PhantomKind, dims: Dims) -> Self {
        PhantomSpec {
            kind,
            dims,
            bit_depth: crate::volume::DEFAULT_BIT_DEPTH,
            noise: None,
        }
    }

    pub fn with_noise(mut self, seed: u64, amplitude: u32) -> Self {
        self.noise = Some(Noise { seed, amplitude });
        self
    }
}

/// Renders the phantom. Samples are clamped to the bit-depth range.
pub fn generate(spec: &PhantomSpec) -> Result<Volume> {
    let d = spec.dims;
    if d.is_empty() {
        return Err(Error::InvalidDims(format!("{d} has a zero extent")));
    }
    if !(1..=16).contains(&spec.bit_depth) {
        return Err(Error::InvalidParameter(format!(
            "bit depth {} outside 1..=16",
            spec.bit_depth
        )));
    }
    if let PhantomKind::DeformingDisk { period: 0, .. } = spec.kind {
        return Err(Error::InvalidParameter("disk period must be positive".into()));
    }
    let max = (1i64 << spec.bit_depth) - 1;
    let mid = (max + 1) / 2;

    let mut base = Vec::with_capacity(d.len());
    for t in 0..d.nt {
        for _z in 0..d.nz {
            for y in 0..d.ny {
                for x in 0..d.nx {
                    base.push(base_value(&spec.kind, x, y, t, mid));
                }
            }
        }
    }

    let overlays = [
        match spec.kind {
            PhantomKind::NoiseField { seed, amplitude } => Some(Noise { seed, amplitude }),
            _ => None,
        },
        spec.noise,
    ];
    for noise in overlays.into_iter().flatten() {
        add_noise(&mut base, noise);
    }

    let samples = base.into_iter().map(|v| v.clamp(0, max) as i32).collect();
    Volume::new(d, spec.bit_depth, samples)
}

fn base_value(kind: &PhantomKind, x: usize, y: usize, t: usize, mid: i64) -> i64 {
    match *kind {
        PhantomKind::Constant { value } => value as i64,
        PhantomKind::TranslatingGradient { velocity, slope } => {
            let u = x as f64 - velocity * t as f64;
            (mid as f64 / 2.0 + slope * u).round() as i64
        }
        PhantomKind::DeformingDisk {
            center,
            base_radius,
            radius_amplitude,
            period,
            inside,
            outside,
            antialias,
        } => {
            // reducing t modulo the period keeps frames exactly periodic
            let phase = (t % period) as f64 / period as f64;
            let radius = base_radius + radius_amplitude * (2.0 * PI * phase).sin();
            let dx = x as f64 - center.0;
            let dy = y as f64 - center.1;
            let dist = (dx * dx + dy * dy).sqrt();
            let coverage = if antialias {
                (radius + 0.5 - dist).clamp(0.0, 1.0)
            } else if dist <= radius {
                1.0
            } else {
                0.0
            };
            (outside as f64 + coverage * (inside - outside) as f64).round() as i64
        }
        PhantomKind::NoiseField { .. } => mid,
    }
}

fn add_noise(samples: &mut [i64], noise: Noise) {
    if noise.amplitude == 0 {
        return;
    }
    let span = 2 * noise.amplitude as u64 + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    for s in samples.iter_mut() {
        *s += (rng.next_u64() % span) as i64 - noise.amplitude as i64;
    }
}
