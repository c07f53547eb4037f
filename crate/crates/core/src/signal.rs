//! Canonical signal representation: recordings, unit normalization, resampling
//! to the 30 Hz working rate, 10-second windowing, and the trivial statistical
//! feature baseline.

use crate::error::{CadenceError, Result};

/// Working sample rate all recordings are resampled to.
pub const TARGET_RATE_HZ: f64 = 30.0;
/// Window length in seconds.
pub const WINDOW_SECONDS: f64 = 10.0;
/// Samples per window at the working rate.
pub const WINDOW_SAMPLES: usize = 300;
/// Window duration in epoch milliseconds.
pub const WINDOW_MS: i64 = 10_000;
/// Standard gravity, for m/s² → g adapters.
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// One subject/device's continuous 3-axis acceleration stream.
///
/// Timestamps are implied by index: sample `i` is at
/// `start_time_ms + i * 1000 / sample_rate_hz`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub subject_id: String,
    pub device_id: String,
    pub sample_rate_hz: f64,
    /// Epoch milliseconds of the first sample.
    pub start_time_ms: i64,
    /// Ordered (ax, ay, az) triples in native units.
    pub samples: Vec<[f64; 3]>,
    /// Multiplier converting native units to g.
    pub unit_scale: f64,
}

impl Recording {
    /// Duration spanned by the samples, in milliseconds.
    pub fn duration_ms(&self) -> f64 {
        if self.samples.len() < 2 {
            return 0.0;
        }
        (self.samples.len() - 1) as f64 * 1000.0 / self.sample_rate_hz
    }

    /// End of the recording's time span in epoch milliseconds (exclusive),
    /// counting one sample period past the last sample.
    pub fn end_time_ms(&self) -> i64 {
        self.start_time_ms + (self.samples.len() as f64 * 1000.0 / self.sample_rate_hz).ceil() as i64
    }
}

/// A 10 s, 30 Hz, 3-axis block of acceleration in g.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub subject_id: String,
    /// Epoch milliseconds of the first sample.
    pub start_time_ms: i64,
    /// Row-major 300×3 values in g.
    pub data: Vec<[f64; 3]>,
    pub label: Option<String>,
}

/// A labeled activity span. `activity` may be `"null"` for amorphous motion.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInterval {
    pub activity: String,
    pub start_ms: i64,
    pub end_ms: i64,
}

impl LabeledInterval {
    pub fn new(activity: impl Into<String>, start_ms: i64, end_ms: i64) -> Self {
        debug_assert!(start_ms < end_ms);
        Self {
            activity: activity.into(),
            start_ms,
            end_ms,
        }
    }
}

/// The 8-dimensional statistical feature vector: per-axis and per-sample-norm
/// mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineFeatures {
    pub mean_x: f64,
    pub mean_y: f64,
    pub mean_z: f64,
    pub mean_norm: f64,
    pub std_x: f64,
    pub std_y: f64,
    pub std_z: f64,
    pub std_norm: f64,
}

impl BaselineFeatures {
    /// Fixed ordering: means then stds, each x, y, z, norm.
    pub fn to_array(self) -> [f64; 8] {
        [
            self.mean_x,
            self.mean_y,
            self.mean_z,
            self.mean_norm,
            self.std_x,
            self.std_y,
            self.std_z,
            self.std_norm,
        ]
    }
}

/// Options for [`normalize_and_resample_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ResampleOptions {
    /// Apply a boxcar pre-decimation low-pass (width = one output period in
    /// native samples) before interpolating. Off by default; resampling with
    /// and without it gives near-identical downstream behavior.
    pub lowpass: bool,
}

/// Convert a recording to g and linearly resample it to 30 Hz.
pub fn normalize_and_resample(rec: &Recording) -> Result<Recording> {
    normalize_and_resample_with(rec, ResampleOptions::default())
}

/// As [`normalize_and_resample`], with explicit options.
pub fn normalize_and_resample_with(rec: &Recording, opts: ResampleOptions) -> Result<Recording> {
    if rec.samples.len() < 2 {
        return Err(CadenceError::EmptyRecording);
    }
    for (i, s) in rec.samples.iter().enumerate() {
        if !s.iter().all(|v| v.is_finite()) {
            return Err(CadenceError::NonFiniteSample(i));
        }
    }

    let scaled: Vec<[f64; 3]> = rec
        .samples
        .iter()
        .map(|s| [s[0] * rec.unit_scale, s[1] * rec.unit_scale, s[2] * rec.unit_scale])
        .collect();

    let source = if opts.lowpass {
        let width = (rec.sample_rate_hz / TARGET_RATE_HZ).round().max(1.0) as usize;
        boxcar(&scaled, width)
    } else {
        scaled
    };

    let n_in = source.len();
    let ratio = rec.sample_rate_hz / TARGET_RATE_HZ;
    // Output samples sit at native positions k * ratio; the count preserves
    // the input duration to within one output period.
    let n_out = (((n_in - 1) as f64) / ratio).floor() as usize + 1;

    let mut out = Vec::with_capacity(n_out);
    for k in 0..n_out {
        let pos = k as f64 * ratio;
        let i0 = pos.floor() as usize;
        let frac = pos - i0 as f64;
        if frac == 0.0 || i0 + 1 >= n_in {
            out.push(source[i0.min(n_in - 1)]);
        } else {
            let a = &source[i0];
            let b = &source[i0 + 1];
            out.push([
                a[0] + (b[0] - a[0]) * frac,
                a[1] + (b[1] - a[1]) * frac,
                a[2] + (b[2] - a[2]) * frac,
            ]);
        }
    }

    Ok(Recording {
        subject_id: rec.subject_id.clone(),
        device_id: rec.device_id.clone(),
        sample_rate_hz: TARGET_RATE_HZ,
        start_time_ms: rec.start_time_ms,
        samples: out,
        unit_scale: 1.0,
    })
}

fn boxcar(samples: &[[f64; 3]], width: usize) -> Vec<[f64; 3]> {
    if width <= 1 {
        return samples.to_vec();
    }
    let half = width / 2;
    let n = samples.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        let mut acc = [0.0f64; 3];
        for s in &samples[lo..hi] {
            acc[0] += s[0];
            acc[1] += s[1];
            acc[2] += s[2];
        }
        let m = (hi - lo) as f64;
        out.push([acc[0] / m, acc[1] / m, acc[2] / m]);
    }
    out
}

/// Split a 30 Hz recording in g into consecutive disjoint 300-sample windows.
/// A trailing remainder shorter than one window is dropped.
pub fn split_windows(rec: &Recording) -> Vec<Window> {
    debug_assert_eq!(rec.sample_rate_hz, TARGET_RATE_HZ);
    let count = rec.samples.len() / WINDOW_SAMPLES;
    (0..count)
        .map(|i| Window {
            subject_id: rec.subject_id.clone(),
            start_time_ms: rec.start_time_ms + WINDOW_MS * i as i64,
            data: rec.samples[i * WINDOW_SAMPLES..(i + 1) * WINDOW_SAMPLES].to_vec(),
            label: None,
        })
        .collect()
}

/// Number of whole windows a 30 Hz stream of `sample_count` samples yields.
/// Pure index arithmetic; no data is touched.
pub fn window_count(sample_count: u64) -> u64 {
    sample_count / WINDOW_SAMPLES as u64
}

/// Per-axis and per-sample-norm mean and population standard deviation.
pub fn baseline_features(w: &Window) -> Result<BaselineFeatures> {
    let n = w.data.len() as f64;
    let mut sum = [0.0f64; 4];
    let mut sum_sq = [0.0f64; 4];
    for (i, s) in w.data.iter().enumerate() {
        if !s.iter().all(|v| v.is_finite()) {
            return Err(CadenceError::NonFiniteSample(i));
        }
        let norm = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
        for (k, v) in [s[0], s[1], s[2], norm].into_iter().enumerate() {
            sum[k] += v;
            sum_sq[k] += v * v;
        }
    }
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let std: Vec<f64> = (0..4)
        .map(|k| (sum_sq[k] / n - mean[k] * mean[k]).max(0.0).sqrt())
        .collect();
    Ok(BaselineFeatures {
        mean_x: mean[0],
        mean_y: mean[1],
        mean_z: mean[2],
        mean_norm: mean[3],
        std_x: std[0],
        std_y: std[1],
        std_z: std[2],
        std_norm: std[3],
    })
}

/// Assign each window the activity occupying the majority of its time span.
///
/// Time not covered by any interval counts as unlabeled; a window whose
/// labeled majority does not reach half the window stays unlabeled. Ties
/// break toward the lexicographically smaller activity name.
pub fn assign_window_labels(windows: &mut [Window], intervals: &[LabeledInterval]) {
    for w in windows.iter_mut() {
        let w_start = w.start_time_ms;
        let w_end = w.start_time_ms + WINDOW_MS;
        let mut overlaps: Vec<(&str, i64)> = Vec::new();
        for iv in intervals {
            let lo = iv.start_ms.max(w_start);
            let hi = iv.end_ms.min(w_end);
            if hi > lo {
                match overlaps.iter_mut().find(|(a, _)| *a == iv.activity) {
                    Some((_, d)) => *d += hi - lo,
                    None => overlaps.push((&iv.activity, hi - lo)),
                }
            }
        }
        overlaps.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        w.label = match overlaps.first() {
            Some(&(name, dur)) if dur * 2 >= WINDOW_MS => Some(name.to_string()),
            _ => None,
        };
    }
}

/// Full preprocessing pipeline for a batch of recordings: resample each to
/// 30 Hz in g, split into windows, and label the windows from the recording's
/// intervals. Window order follows recording order.
pub fn windows_from_recordings(
    pairs: &[(Recording, Vec<LabeledInterval>)],
) -> Result<Vec<Window>> {
    let mut all = Vec::new();
    for (rec, intervals) in pairs {
        let resampled = normalize_and_resample(rec)?;
        let mut windows = split_windows(&resampled);
        assign_window_labels(&mut windows, intervals);
        all.extend(windows);
    }
    Ok(all)
}
