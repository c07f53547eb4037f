//! Coincident-pair sampling and batch label/weight construction for the
//! contrastive objective.
//!
//! A pair is coincident when both windows come from the same subject within
//! `delta_t_s` seconds, or when the second window is an augmented view of the
//! first. Batches stack b pairs into 2b encoder inputs and materialize the
//! full (2b)×(2b) label and weight matrices.

use std::collections::BTreeMap;

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::augment::{apply_chain, sample_augmentation_chain_with, AugmentationRanges};
use crate::error::{CadenceError, Result};
use crate::signal::Window;

/// Sampling configuration.
#[derive(Debug, Clone)]
pub struct PairingConfig {
    /// Temporal proximity radius in seconds.
    pub delta_t_s: f64,
    /// Probability of drawing a temporal pair instead of an augmented one.
    pub mode_mix: f64,
    /// Pairs per batch.
    pub batch_b: usize,
}

impl Default for PairingConfig {
    fn default() -> Self {
        Self { delta_t_s: 60.0, mode_mix: 0.5, batch_b: 128 }
    }
}

impl PairingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.delta_t_s < 10.0 || self.delta_t_s.is_nan() {
            return Err(CadenceError::InvalidConfig(format!(
                "pairing.delta_t_s {} below one window (10 s)",
                self.delta_t_s
            )));
        }
        if !(0.0..=1.0).contains(&self.mode_mix) {
            return Err(CadenceError::InvalidConfig(format!(
                "pairing.mode_mix {} outside [0, 1]",
                self.mode_mix
            )));
        }
        if self.batch_b < 1 {
            return Err(CadenceError::InvalidConfig("pairing.batch_b must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// How a pair's second window was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    Temporal,
    Augmentation,
}

/// Read-only window store grouped by subject, sorted by start time within
/// each subject. Activity labels are dropped on construction so nothing
/// downstream of pairing can read them; the self-supervised path sees only
/// subject identity, time, and signal.
#[derive(Debug, Clone)]
pub struct WindowIndex {
    windows: Vec<Window>,
    by_subject: BTreeMap<String, Vec<usize>>,
}

impl WindowIndex {
    pub fn new(mut windows: Vec<Window>) -> Result<Self> {
        if windows.is_empty() {
            return Err(CadenceError::EmptyDataset);
        }
        for w in &mut windows {
            w.label = None;
        }
        let mut by_subject: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, w) in windows.iter().enumerate() {
            by_subject.entry(w.subject_id.clone()).or_default().push(i);
        }
        for ids in by_subject.values_mut() {
            ids.sort_by_key(|&i| windows[i].start_time_ms);
        }
        Ok(Self { windows, by_subject })
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn get(&self, i: usize) -> &Window {
        &self.windows[i]
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    /// Indices of same-subject windows within `delta_ms` of the anchor,
    /// excluding the anchor itself.
    fn temporal_neighbors(&self, anchor: usize, delta_ms: i64) -> Vec<usize> {
        let w = &self.windows[anchor];
        self.by_subject[&w.subject_id]
            .iter()
            .copied()
            .filter(|&i| {
                i != anchor && (self.windows[i].start_time_ms - w.start_time_ms).abs() <= delta_ms
            })
            .collect()
    }
}

/// Draw one coincident pair. Temporal pairs take a uniform same-subject
/// neighbor within the radius; anchors without neighbors fall back to an
/// augmented view. Deterministic given the seed.
pub fn sample_coincident_pair(
    index: &WindowIndex,
    cfg: &PairingConfig,
    rng_seed: u64,
) -> Result<(Window, Window, PairMode)> {
    sample_coincident_pair_with(index, cfg, &AugmentationRanges::default(), rng_seed)
}

/// [`sample_coincident_pair`] with explicit augmentation parameter ranges.
pub fn sample_coincident_pair_with(
    index: &WindowIndex,
    cfg: &PairingConfig,
    ranges: &AugmentationRanges,
    rng_seed: u64,
) -> Result<(Window, Window, PairMode)> {
    cfg.validate()?;
    if index.is_empty() {
        return Err(CadenceError::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let anchor_idx = rng.gen_range(0..index.len());
    let anchor = index.get(anchor_idx).clone();

    let want_temporal = rng.gen::<f64>() < cfg.mode_mix;
    if want_temporal {
        let delta_ms = (cfg.delta_t_s * 1000.0).round() as i64;
        let neighbors = index.temporal_neighbors(anchor_idx, delta_ms);
        if !neighbors.is_empty() {
            let partner = neighbors[rng.gen_range(0..neighbors.len())];
            return Ok((anchor, index.get(partner).clone(), PairMode::Temporal));
        }
    }
    let chain = sample_augmentation_chain_with(ranges, rng.gen());
    let view = apply_chain(&chain, &anchor, rng.gen())?;
    Ok((anchor, view, PairMode::Augmentation))
}

/// One training batch: 2b windows where positions (2i, 2i+1) are coincident,
/// plus the label and weight matrices over all window pairs.
#[derive(Debug, Clone)]
pub struct PairBatch {
    pub windows: Vec<Window>,
    /// (2b)×(2b); 1 on the diagonal and between stacked pair positions.
    pub labels: Array2<f32>,
    /// (2b)×(2b); 0 on the diagonal, 1 for coincident entries, 1/(2b−2)
    /// elsewhere.
    pub weights: Array2<f32>,
}

/// Stack `expected_b` pairs into a batch with its label/weight matrices.
pub fn build_pair_batch(pairs: Vec<(Window, Window)>, expected_b: usize) -> Result<PairBatch> {
    if pairs.len() != expected_b || expected_b == 0 {
        return Err(CadenceError::WrongPairCount { expected: expected_b, got: pairs.len() });
    }
    let b = pairs.len();
    let m = 2 * b;
    let mut windows = Vec::with_capacity(m);
    for (first, second) in pairs {
        windows.push(first);
        windows.push(second);
    }

    let negative_weight = if m > 2 { 1.0 / (m as f32 - 2.0) } else { 0.0 };
    let mut labels = Array2::<f32>::zeros((m, m));
    let mut weights = Array2::<f32>::from_elem((m, m), negative_weight);
    for p in 0..m {
        labels[[p, p]] = 1.0;
        weights[[p, p]] = 0.0;
        let partner = p ^ 1;
        labels[[p, partner]] = 1.0;
        weights[[p, partner]] = 1.0;
    }
    Ok(PairBatch { windows, labels, weights })
}

/// Draw b coincident pairs and build the batch. Per-pair seeds derive from
/// `rng_seed`, so the batch is a pure function of (index, cfg, seed).
pub fn sample_pair_batch(
    index: &WindowIndex,
    cfg: &PairingConfig,
    rng_seed: u64,
) -> Result<PairBatch> {
    sample_pair_batch_with(index, cfg, &AugmentationRanges::default(), rng_seed)
}

/// [`sample_pair_batch`] with explicit augmentation parameter ranges.
pub fn sample_pair_batch_with(
    index: &WindowIndex,
    cfg: &PairingConfig,
    ranges: &AugmentationRanges,
    rng_seed: u64,
) -> Result<PairBatch> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut pairs = Vec::with_capacity(cfg.batch_b);
    for _ in 0..cfg.batch_b {
        let (a, b, _) = sample_coincident_pair_with(index, cfg, ranges, rng.gen())?;
        pairs.push((a, b));
    }
    build_pair_batch(pairs, cfg.batch_b)
}
