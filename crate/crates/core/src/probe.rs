//! Frozen-encoder embedding and the label-efficiency linear-probe protocol.
//!
//! A probe run draws, for each class, n labeled windows (with replacement)
//! from a fresh seeded 75:25 split, fits a multinomial logistic regression on
//! the drawn features, and scores accuracy on the held-out quarter. Repeats
//! are seeded by (run seed, n, repeat), so the embedding and baseline feature
//! sources see identical splits and can be compared pairwise.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2, Axis};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CadenceError, Result};
use crate::nn::encoder::{encoder_forward, windows_to_batch, EncoderParams};
use crate::signal::{baseline_features, Window};

/// Windows per forward pass when embedding a dataset.
const EMBED_CHUNK: usize = 256;

/// One embedded (or baseline-featurized) window.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRecord {
    pub subject_id: String,
    pub start_time_ms: i64,
    pub vector: Vec<f32>,
    pub label: Option<String>,
}

/// Ordered feature records with a uniform dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSeries {
    records: Vec<EmbeddingRecord>,
    dim: usize,
}

impl EmbeddingSeries {
    /// Validate uniform dimension and finite values.
    pub fn new(records: Vec<EmbeddingRecord>) -> Result<Self> {
        let dim = records.first().map_or(0, |r| r.vector.len());
        for (i, r) in records.iter().enumerate() {
            if r.vector.len() != dim {
                return Err(CadenceError::ShapeMismatch(format!(
                    "record {i} has {} values, series dimension is {dim}",
                    r.vector.len()
                )));
            }
            if r.vector.iter().any(|v| !v.is_finite()) {
                return Err(CadenceError::NonFiniteFeature(i));
            }
        }
        Ok(Self { records, dim })
    }

    pub fn records(&self) -> &[EmbeddingRecord] {
        &self.records
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Drop unlabeled records and the amorphous `"null"` class.
    pub fn without_null(&self) -> EmbeddingSeries {
        let records = self
            .records
            .iter()
            .filter(|r| r.label.as_deref().is_some_and(|l| l != "null"))
            .cloned()
            .collect();
        EmbeddingSeries { records, dim: self.dim }
    }
}

/// Which features feed the probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSource {
    Embedding,
    Baseline,
}

impl FeatureSource {
    pub fn name(self) -> &'static str {
        match self {
            Self::Embedding => "embedding",
            Self::Baseline => "baseline",
        }
    }
}

/// Label-efficiency protocol parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub n_values: Vec<usize>,
    pub repeats: usize,
    pub train_fraction: f64,
    pub source: FeatureSource,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            n_values: vec![1, 5, 10, 15, 25, 50],
            repeats: 10,
            train_fraction: 0.75,
            source: FeatureSource::Embedding,
            seed: 0,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(CadenceError::InvalidConfig(
                "probe n_values must be non-empty and ≥ 1".into(),
            ));
        }
        if self.repeats == 0 {
            return Err(CadenceError::InvalidConfig("probe repeats must be ≥ 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(CadenceError::InvalidConfig(format!(
                "probe train_fraction {} outside (0, 1)",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

/// Accuracies for one n across all repeats.
#[derive(Debug, Clone)]
pub struct CurveCell {
    pub n: usize,
    pub accuracies: Vec<f64>,
}

impl CurveCell {
    pub fn mean(&self) -> f64 {
        self.accuracies.iter().sum::<f64>() / self.accuracies.len() as f64
    }

    /// Half-width of the reported interval: one sample standard deviation
    /// over the repeats (zero for a single repeat).
    pub fn ci_halfwidth(&self) -> f64 {
        let k = self.accuracies.len();
        if k < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let var = self
            .accuracies
            .iter()
            .map(|a| (a - mean) * (a - mean))
            .sum::<f64>()
            / (k - 1) as f64;
        var.max(0.0).sqrt()
    }
}

/// Label-efficiency curve for one feature source.
#[derive(Debug, Clone)]
pub struct AccuracyReport {
    pub source: FeatureSource,
    pub repeats: usize,
    pub cells: Vec<CurveCell>,
    pub class_counts: BTreeMap<String, usize>,
}

fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one (n, repeat) cell. n = 0 is reserved for full-split runs.
fn cell_seed(seed: u64, n: u64, repeat: u64) -> u64 {
    let a = splitmix(seed ^ (n.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix(a ^ (repeat.wrapping_add(1)).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Embed windows with the frozen encoder, preserving input order and copying
/// labels through. Chunks run in parallel; assembly is order-stable.
pub fn embed_windows(
    encoder: &EncoderParams<f32>,
    windows: &[Window],
) -> Result<EmbeddingSeries> {
    let want = encoder.config.input_len;
    for (i, w) in windows.iter().enumerate() {
        if w.data.len() != want {
            return Err(CadenceError::ShapeMismatch(format!(
                "window {i} has {} samples, encoder expects {want}",
                w.data.len()
            )));
        }
    }
    let embedded: Result<Vec<Array2<f32>>> = windows
        .par_chunks(EMBED_CHUNK)
        .map(|chunk| encoder_forward(encoder, &windows_to_batch::<f32>(chunk)))
        .collect();
    let embedded = embedded?;

    let mut records = Vec::with_capacity(windows.len());
    for (chunk, emb) in windows.chunks(EMBED_CHUNK).zip(&embedded) {
        for (w, row) in chunk.iter().zip(emb.rows()) {
            records.push(EmbeddingRecord {
                subject_id: w.subject_id.clone(),
                start_time_ms: w.start_time_ms,
                vector: row.to_vec(),
                label: w.label.clone(),
            });
        }
    }
    EmbeddingSeries::new(records)
}

/// The 8-dimensional hand-crafted features as a series, for the baseline arm
/// of the probe protocol.
pub fn baseline_series(windows: &[Window]) -> Result<EmbeddingSeries> {
    let records: Result<Vec<EmbeddingRecord>> = windows
        .iter()
        .map(|w| {
            let f = baseline_features(w)?;
            Ok(EmbeddingRecord {
                subject_id: w.subject_id.clone(),
                start_time_ms: w.start_time_ms,
                vector: f.to_array().iter().map(|&v| v as f32).collect(),
                label: w.label.clone(),
            })
        })
        .collect();
    EmbeddingSeries::new(records?)
}

/// Seeded random split of `0..count` into (train, test) index sets. Both
/// sides are always non-empty.
pub fn split_indices(
    count: usize,
    train_fraction: f64,
    rng_seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if count < 2 {
        return Err(CadenceError::InvalidConfig(format!(
            "cannot split {count} records into train and test"
        )));
    }
    let mut idx: Vec<usize> = (0..count).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    let train_len =
        ((count as f64 * train_fraction).round() as usize).clamp(1, count - 1);
    let test = idx.split_off(train_len);
    Ok((idx, test))
}

/// Draw n examples per class, with replacement, from `candidates` (indices
/// into `labels`). Classes are visited in the given order; returned indices
/// are global.
pub fn sample_label_subset(
    labels: &[Option<String>],
    candidates: &[usize],
    classes: &[String],
    n: usize,
    rng_seed: u64,
) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::with_capacity(classes.len() * n);
    for class in classes {
        let pool: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&i| labels[i].as_deref() == Some(class))
            .collect();
        if pool.is_empty() {
            return Err(CadenceError::MissingClass(class.clone()));
        }
        for _ in 0..n {
            out.push(pool[rng.gen_range(0..pool.len())]);
        }
    }
    Ok(out)
}

/// Fitted multinomial logistic probe.
#[derive(Debug, Clone)]
pub struct ProbeModel {
    pub classes: Vec<String>,
    /// d×k coefficient matrix.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl ProbeModel {
    /// Argmax class per feature row; ties break toward the first class.
    pub fn predict(&self, features: &Array2<f64>) -> Vec<String> {
        self.predict_ids(features)
            .into_iter()
            .map(|i| self.classes[i].clone())
            .collect()
    }

    pub fn predict_ids(&self, features: &Array2<f64>) -> Vec<usize> {
        let logits = features.dot(&self.weights) + &self.bias;
        logits
            .rows()
            .into_iter()
            .map(|row| {
                let mut best = 0;
                for (j, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = j;
                    }
                }
                best
            })
            .collect()
    }
}

const PROBE_MAX_ITERS: usize = 500;
const PROBE_GRAD_TOL: f64 = 1e-6;
/// Inverse-regularization strength: objective = Σ CE + ||W||² / (2·C).
const PROBE_C: f64 = 1.0;

/// Fit a multinomial logistic regression by full-batch gradient descent with
/// backtracking line search, L2 penalty on weights (not bias).
pub fn fit_linear_probe(features: &Array2<f64>, labels: &[String]) -> Result<ProbeModel> {
    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(CadenceError::SingleClass);
    }
    let ids: Vec<usize> = labels
        .iter()
        .map(|l| classes.binary_search(l).expect("label in class list"))
        .collect();
    let (weights, bias) = fit_logistic(features, &ids, classes.len())?;
    Ok(ProbeModel { classes, weights, bias })
}

/// Softmax cross-entropy objective, its value summed over rows plus the L2
/// term, and its gradients.
fn logistic_objective(
    x: &Array2<f64>,
    y: &[usize],
    w: &Array2<f64>,
    b: &Array1<f64>,
    with_grad: bool,
) -> (f64, Option<(Array2<f64>, Array1<f64>)>) {
    let mut z = x.dot(w);
    z += b;
    let mut loss = 0.0;
    // In place, z becomes the softmax probabilities.
    for (i, mut row) in z.rows_mut().into_iter().enumerate() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        loss += sum.ln() - row[y[i]].ln();
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    loss += w.iter().map(|v| v * v).sum::<f64>() / (2.0 * PROBE_C);
    if !with_grad {
        return (loss, None);
    }
    for (i, mut row) in z.rows_mut().into_iter().enumerate() {
        row[y[i]] -= 1.0;
    }
    let gw = x.t().dot(&z) + &(w / PROBE_C);
    let gb = z.sum_axis(Axis(0));
    (loss, Some((gw, gb)))
}

fn fit_logistic(
    x: &Array2<f64>,
    y: &[usize],
    k: usize,
) -> Result<(Array2<f64>, Array1<f64>)> {
    let (n, d) = x.dim();
    if y.len() != n {
        return Err(CadenceError::ShapeMismatch(format!(
            "{n} feature rows, {} labels",
            y.len()
        )));
    }
    for (i, row) in x.rows().into_iter().enumerate() {
        if row.iter().any(|v| !v.is_finite()) {
            return Err(CadenceError::NonFiniteFeature(i));
        }
    }
    let mut w = Array2::<f64>::zeros((d, k));
    let mut b = Array1::<f64>::zeros(k);
    let mut step = 1.0 / n as f64;
    for _ in 0..PROBE_MAX_ITERS {
        let (loss, grads) = logistic_objective(x, y, &w, &b, true);
        let (gw, gb) = grads.expect("requested gradients");
        let gmax = gw
            .iter()
            .chain(gb.iter())
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        if gmax < PROBE_GRAD_TOL {
            break;
        }
        let gsq = gw.iter().map(|v| v * v).sum::<f64>() + gb.iter().map(|v| v * v).sum::<f64>();

        let mut t = step * 2.0;
        loop {
            let w_next = &w - &(&gw * t);
            let b_next = &b - &(&gb * t);
            let (next_loss, _) = logistic_objective(x, y, &w_next, &b_next, false);
            if next_loss <= loss - 0.5 * t * gsq {
                w = w_next;
                b = b_next;
                step = t;
                break;
            }
            t *= 0.5;
            if t < 1e-18 {
                return Ok((w, b));
            }
        }
    }
    Ok((w, b))
}

fn dense_features(series: &EmbeddingSeries) -> Array2<f64> {
    let n = series.len();
    let d = series.dim();
    Array2::from_shape_fn((n, d), |(i, j)| series.records()[i].vector[j] as f64)
}

fn row_subset(features: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    let d = features.dim().1;
    Array2::from_shape_fn((rows.len(), d), |(i, j)| features[[rows[i], j]])
}

/// Center and scale train columns to unit variance (fit on train, applied to
/// both); constant columns are left centered only.
fn standardize(train: &mut Array2<f64>, test: &mut Array2<f64>) {
    let (n, d) = train.dim();
    for j in 0..d {
        let mean = train.column(j).sum() / n as f64;
        let var = train.column(j).iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let denom = if var > 0.0 { var.sqrt() } else { 1.0 };
        for v in train.column_mut(j) {
            *v = (*v - mean) / denom;
        }
        for v in test.column_mut(j) {
            *v = (*v - mean) / denom;
        }
    }
}

struct CurveData {
    features: Array2<f64>,
    labels: Vec<Option<String>>,
    classes: Vec<String>,
    class_ids: Vec<usize>,
    class_counts: BTreeMap<String, usize>,
}

fn prepare_curve_data(series: &EmbeddingSeries) -> Result<CurveData> {
    let mut labels = Vec::with_capacity(series.len());
    for (i, r) in series.records().iter().enumerate() {
        match &r.label {
            Some(l) if l != "null" => labels.push(Some(l.clone())),
            _ => {
                return Err(CadenceError::InvalidConfig(format!(
                    "record {i} is unlabeled or null; filter with without_null first"
                )))
            }
        }
    }
    let mut classes: Vec<String> = labels.iter().flatten().cloned().collect();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(CadenceError::SingleClass);
    }
    let class_ids: Vec<usize> = labels
        .iter()
        .map(|l| classes.binary_search(l.as_ref().expect("validated above")).unwrap())
        .collect();
    let mut class_counts = BTreeMap::new();
    for id in &class_ids {
        *class_counts.entry(classes[*id].clone()).or_insert(0usize) += 1;
    }
    Ok(CurveData {
        features: dense_features(series),
        labels,
        classes,
        class_ids,
        class_counts,
    })
}

fn run_cell(data: &CurveData, cfg: &ProbeConfig, n: usize, repeat: usize) -> Result<f64> {
    let seed = cell_seed(cfg.seed, n as u64, repeat as u64);
    let (train_idx, test_idx) =
        split_indices(data.labels.len(), cfg.train_fraction, splitmix(seed ^ 1))?;
    let subset = sample_label_subset(
        &data.labels,
        &train_idx,
        &data.classes,
        n,
        splitmix(seed ^ 2),
    )?;
    score_fit(data, cfg, &subset, &test_idx)
}

fn score_fit(
    data: &CurveData,
    cfg: &ProbeConfig,
    train_rows: &[usize],
    test_rows: &[usize],
) -> Result<f64> {
    let mut train_x = row_subset(&data.features, train_rows);
    let mut test_x = row_subset(&data.features, test_rows);
    if cfg.source == FeatureSource::Baseline {
        standardize(&mut train_x, &mut test_x);
    }
    let train_y: Vec<usize> = train_rows.iter().map(|&i| data.class_ids[i]).collect();
    let (w, b) = fit_logistic(&train_x, &train_y, data.classes.len())?;
    let model = ProbeModel { classes: data.classes.clone(), weights: w, bias: b };
    let predictions = model.predict_ids(&test_x);
    let correct = predictions
        .iter()
        .zip(test_rows)
        .filter(|&(p, &i)| *p == data.class_ids[i])
        .count();
    Ok(correct as f64 / test_rows.len() as f64)
}

/// Run the full protocol: for every n and repeat, a fresh split, an n-per-
/// class draw, a probe fit, and a held-out accuracy. Cells run in parallel.
pub fn label_efficiency_curve(
    series: &EmbeddingSeries,
    cfg: &ProbeConfig,
) -> Result<AccuracyReport> {
    cfg.validate()?;
    let data = prepare_curve_data(series)?;

    let specs: Vec<(usize, usize)> = (0..cfg.n_values.len())
        .flat_map(|ni| (0..cfg.repeats).map(move |r| (ni, r)))
        .collect();
    let results: Result<Vec<((usize, usize), f64)>> = specs
        .par_iter()
        .map(|&(ni, r)| run_cell(&data, cfg, cfg.n_values[ni], r).map(|a| ((ni, r), a)))
        .collect();

    let mut cells: Vec<CurveCell> = cfg
        .n_values
        .iter()
        .map(|&n| CurveCell { n, accuracies: vec![0.0; cfg.repeats] })
        .collect();
    for ((ni, r), acc) in results? {
        cells[ni].accuracies[r] = acc;
    }
    Ok(AccuracyReport {
        source: cfg.source,
        repeats: cfg.repeats,
        cells,
        class_counts: data.class_counts,
    })
}

/// Accuracy per repeat when the probe trains on the entire 75% split instead
/// of an n-per-class draw.
pub fn full_split_accuracies(series: &EmbeddingSeries, cfg: &ProbeConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let data = prepare_curve_data(series)?;
    let repeats: Vec<usize> = (0..cfg.repeats).collect();
    repeats
        .par_iter()
        .map(|&r| {
            let seed = cell_seed(cfg.seed, 0, r as u64);
            let (train_idx, test_idx) =
                split_indices(data.labels.len(), cfg.train_fraction, splitmix(seed ^ 1))?;
            score_fit(&data, cfg, &train_idx, &test_idx)
        })
        .collect()
}
