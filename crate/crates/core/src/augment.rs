//! Stochastic window transformations used to build augmentation-coincident
//! pairs: median smoothing, time translation, baseline jumps and wander,
//! rotation, and additive Gaussian noise.
//!
//! Sampling ranges follow the defaults in [`AugmentationRanges`]; they are
//! project choices (visible but sub-dominant to gross motion) and can be
//! overridden through the training config.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, StandardNormal};

use crate::error::{CadenceError, Result};
use crate::signal::{Window, TARGET_RATE_HZ, WINDOW_SAMPLES};

/// Rotation convention for [`AugmentationSpec::Rotate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationMode {
    /// Rotate the x-y plane counter-clockwise about z.
    Planar,
    /// Rotate about a random unit axis drawn from the apply seed.
    ThreeAxis,
}

/// One parameterized transformation.
#[derive(Debug, Clone, PartialEq)]
pub enum AugmentationSpec {
    /// Sliding median with reflected edges.
    MedianSmooth { width: usize },
    /// Shift samples `offset` positions later (negative: earlier), filling
    /// exposed edges by reflection.
    TimeTranslate { offset: i64 },
    /// Add `amplitude_g` to one axis from `index` onward.
    BaselineJump { amplitude_g: f64, index: usize, axis: usize },
    /// Add a sinusoid of the given amplitude and period to each axis, with an
    /// independent random phase per axis.
    BaselineWander { amplitude_g: f64, period_s: f64 },
    Rotate { angle_rad: f64, mode: RotationMode },
    /// Add i.i.d. zero-mean Gaussian noise to every value.
    GaussianNoise { sigma_g: f64 },
}

impl AugmentationSpec {
    /// Stable lowercase tag, used in config keys and preview output.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::MedianSmooth { .. } => "median_smooth",
            Self::TimeTranslate { .. } => "time_translate",
            Self::BaselineJump { .. } => "baseline_jump",
            Self::BaselineWander { .. } => "baseline_wander",
            Self::Rotate { .. } => "rotate",
            Self::GaussianNoise { .. } => "gaussian_noise",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CadenceError::ParameterOutOfRange(msg));
        match *self {
            Self::MedianSmooth { width } => {
                if width % 2 == 0 || !(3..WINDOW_SAMPLES).contains(&width) {
                    return bad(format!("median width {width} not odd in 3..300"));
                }
            }
            Self::TimeTranslate { offset } => {
                if offset.unsigned_abs() as usize >= WINDOW_SAMPLES {
                    return bad(format!("translate offset {offset} exceeds window"));
                }
            }
            Self::BaselineJump { amplitude_g, index, axis } => {
                if !amplitude_g.is_finite() {
                    return bad(format!("jump amplitude {amplitude_g} not finite"));
                }
                if index >= WINDOW_SAMPLES || axis >= 3 {
                    return bad(format!("jump index {index} or axis {axis} out of range"));
                }
            }
            Self::BaselineWander { amplitude_g, period_s } => {
                if !amplitude_g.is_finite() || period_s <= 0.0 || period_s.is_nan() {
                    return bad(format!("wander amplitude {amplitude_g} period {period_s}"));
                }
            }
            Self::Rotate { angle_rad, .. } => {
                if !angle_rad.is_finite() {
                    return bad(format!("rotation angle {angle_rad} not finite"));
                }
            }
            Self::GaussianNoise { sigma_g } => {
                if sigma_g < 0.0 || !sigma_g.is_finite() {
                    return bad(format!("noise sigma {sigma_g} not a finite non-negative"));
                }
            }
        }
        Ok(())
    }
}

/// Parameter ranges for [`sample_augmentation_chain_with`].
#[derive(Debug, Clone)]
pub struct AugmentationRanges {
    pub median_widths: Vec<usize>,
    pub translate_min: i64,
    pub translate_max: i64,
    pub jump_min_g: f64,
    pub jump_max_g: f64,
    pub wander_min_g: f64,
    pub wander_max_g: f64,
    pub wander_min_period_s: f64,
    pub wander_max_period_s: f64,
    pub noise_min_g: f64,
    pub noise_max_g: f64,
    pub rotation_mode: RotationMode,
}

impl Default for AugmentationRanges {
    fn default() -> Self {
        Self {
            median_widths: vec![3, 5, 7],
            translate_min: 15,
            translate_max: 90,
            jump_min_g: 0.05,
            jump_max_g: 0.5,
            wander_min_g: 0.05,
            wander_max_g: 0.3,
            wander_min_period_s: 5.0,
            wander_max_period_s: 20.0,
            noise_min_g: 0.005,
            noise_max_g: 0.05,
            rotation_mode: RotationMode::Planar,
        }
    }
}

const KIND_COUNT: usize = 6;

/// Apply one transformation. Deterministic given `(spec, rng_seed)`; the seed
/// feeds only the kinds with internal randomness (wander phases, 3-axis
/// rotation axis).
pub fn apply_augmentation(spec: &AugmentationSpec, w: &Window, rng_seed: u64) -> Result<Window> {
    spec.validate()?;
    let mut out = w.clone();
    let n = w.data.len();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    match *spec {
        AugmentationSpec::MedianSmooth { width } => {
            let half = (width / 2) as i64;
            let mut buf = vec![0.0f64; width];
            for i in 0..n {
                for axis in 0..3 {
                    for (k, slot) in buf.iter_mut().enumerate() {
                        let src = reflect(i as i64 + k as i64 - half, n);
                        *slot = w.data[src][axis];
                    }
                    buf.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    out.data[i][axis] = buf[width / 2];
                }
            }
        }
        AugmentationSpec::TimeTranslate { offset } => {
            for i in 0..n {
                let src = reflect(i as i64 - offset, n);
                out.data[i] = w.data[src];
            }
        }
        AugmentationSpec::BaselineJump { amplitude_g, index, axis } => {
            for row in out.data[index..].iter_mut() {
                row[axis] += amplitude_g;
            }
        }
        AugmentationSpec::BaselineWander { amplitude_g, period_s } => {
            let phases = [
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ];
            for (i, row) in out.data.iter_mut().enumerate() {
                let t = i as f64 / TARGET_RATE_HZ;
                for axis in 0..3 {
                    row[axis] +=
                        amplitude_g * (std::f64::consts::TAU * t / period_s + phases[axis]).sin();
                }
            }
        }
        AugmentationSpec::Rotate { angle_rad, mode } => {
            let (sin, cos) = angle_rad.sin_cos();
            match mode {
                RotationMode::Planar => {
                    for row in out.data.iter_mut() {
                        let (x, y) = (row[0], row[1]);
                        row[0] = x * cos - y * sin;
                        row[1] = x * sin + y * cos;
                    }
                }
                RotationMode::ThreeAxis => {
                    let u = random_unit_vector(&mut rng);
                    for row in out.data.iter_mut() {
                        *row = rodrigues(*row, u, sin, cos);
                    }
                }
            }
        }
        AugmentationSpec::GaussianNoise { sigma_g } => {
            if sigma_g == 0.0 {
                return Ok(out);
            }
            let normal = Normal::new(0.0, sigma_g).expect("validated sigma");
            for row in out.data.iter_mut() {
                for v in row.iter_mut() {
                    *v += normal.sample(&mut rng);
                }
            }
        }
    }
    Ok(out)
}

/// Apply an ordered chain, deriving a distinct seed per element.
pub fn apply_chain(chain: &[AugmentationSpec], w: &Window, rng_seed: u64) -> Result<Window> {
    let mut out = w.clone();
    for (i, spec) in chain.iter().enumerate() {
        out = apply_augmentation(spec, &out, rng_seed.wrapping_add(i as u64))?;
    }
    Ok(out)
}

/// Draw a chain of 1-3 distinct-kind transformations with default ranges.
pub fn sample_augmentation_chain(rng_seed: u64) -> Vec<AugmentationSpec> {
    sample_augmentation_chain_with(&AugmentationRanges::default(), rng_seed)
}

/// Draw a chain of 1-3 distinct-kind transformations from the given ranges.
pub fn sample_augmentation_chain_with(
    ranges: &AugmentationRanges,
    rng_seed: u64,
) -> Vec<AugmentationSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let len = rng.gen_range(1..=3usize);
    let mut kinds: Vec<usize> = (0..KIND_COUNT).collect();
    for i in 0..len {
        let j = rng.gen_range(i..KIND_COUNT);
        kinds.swap(i, j);
    }
    kinds.truncate(len);

    kinds
        .into_iter()
        .map(|kind| match kind {
            0 => AugmentationSpec::MedianSmooth {
                width: ranges.median_widths[rng.gen_range(0..ranges.median_widths.len())],
            },
            1 => {
                let magnitude = rng.gen_range(ranges.translate_min..=ranges.translate_max);
                let sign = if rng.gen::<bool>() { 1 } else { -1 };
                AugmentationSpec::TimeTranslate { offset: sign * magnitude }
            }
            2 => {
                let magnitude = rng.gen_range(ranges.jump_min_g..=ranges.jump_max_g);
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                AugmentationSpec::BaselineJump {
                    amplitude_g: sign * magnitude,
                    index: rng.gen_range(0..WINDOW_SAMPLES),
                    axis: rng.gen_range(0..3),
                }
            }
            3 => AugmentationSpec::BaselineWander {
                amplitude_g: rng.gen_range(ranges.wander_min_g..=ranges.wander_max_g),
                period_s: rng.gen_range(ranges.wander_min_period_s..=ranges.wander_max_period_s),
            },
            4 => AugmentationSpec::Rotate {
                angle_rad: rng.gen_range(0.0..std::f64::consts::TAU),
                mode: ranges.rotation_mode,
            },
            _ => AugmentationSpec::GaussianNoise {
                sigma_g: rng.gen_range(ranges.noise_min_g..=ranges.noise_max_g),
            },
        })
        .collect()
}

/// Mirror an out-of-range index back into `0..n` (single bounce).
fn reflect(idx: i64, n: usize) -> usize {
    let n = n as i64;
    let r = if idx < 0 {
        -idx
    } else if idx >= n {
        2 * (n - 1) - idx
    } else {
        idx
    };
    r.clamp(0, n - 1) as usize
}

fn random_unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-9 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

fn rodrigues(v: [f64; 3], u: [f64; 3], sin: f64, cos: f64) -> [f64; 3] {
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let k = dot * (1.0 - cos);
    [
        v[0] * cos + cross[0] * sin + u[0] * k,
        v[1] * cos + cross[1] * sin + u[1] * k,
        v[2] * cos + cross[2] * sin + u[2] * k,
    ]
}
