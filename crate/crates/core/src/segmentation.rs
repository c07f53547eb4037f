//! Unsupervised salient-activity segmentation of an embedding time series.
//!
//! Each subject's stream is cut into blocks of up to 180 windows (30 minutes
//! at one window per 10 s). Within a block, every boundary pair becomes a
//! candidate segment scored by how much more self-similar it is than its
//! surroundings, and overlapping candidates are resolved by non-maximal
//! suppression. The whole pipeline reads only embedding vectors; labels play
//! no part.
//!
//! Salience is `Mean(sim(seg)) − Mean(sim(seg+nb)) − 2·Stdev(sim(seg))`,
//! where `sim(X)` is the multiset of cosine similarities over all unordered
//! distinct window pairs within X and `seg+nb` is the union of the segment
//! with its flanking neighborhood. A coherent segment in incoherent
//! surroundings scores positive under this orientation; the opposite sign
//! would reject exactly the segments worth keeping.

use std::ops::Range;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{CadenceError, Result};
use crate::probe::EmbeddingSeries;
use crate::signal::WINDOW_MS;

/// Windows per similarity block: 30 minutes at 10 s per window.
pub const BLOCK_WINDOWS: usize = 180;

/// Shortest stream a block is built for.
pub const MIN_BLOCK_WINDOWS: usize = 6;

/// Shortest accepted segment, in windows (30 s at 10 s per window).
pub const MIN_SEGMENT_WINDOWS: usize = 3;

/// Neighborhood cap per side, in windows (5 minutes).
pub const MAX_NEIGHBORHOOD_WINDOWS: usize = 30;

/// Proposals must clear this salience to be accepted. The threshold is
/// "greater than zero", but rectangle sums carry cancellation error of
/// roughly this size, so a mathematically zero salience (e.g. a perfectly
/// incoherent stretch) can read as ±1e-13; anything below the prefix-sum
/// agreement tolerance is treated as zero.
pub const SALIENCE_EPSILON: f64 = 1e-9;

/// Cosine-similarity matrix for one block, with 2-D prefix sums of S and S²
/// so any rectangle sum costs O(1).
#[derive(Debug, Clone)]
pub struct SimilarityBlock {
    s: Array2<f64>,
    prefix: Array2<f64>,
    prefix_sq: Array2<f64>,
}

impl SimilarityBlock {
    pub fn len(&self) -> usize {
        self.s.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.s.nrows() == 0
    }

    /// Cosine similarity between windows i and j. The diagonal is exactly 1.
    pub fn sim(&self, i: usize, j: usize) -> f64 {
        self.s[[i, j]]
    }

    /// Sum of S over `rows × cols`.
    pub fn rect_sum(&self, rows: Range<usize>, cols: Range<usize>) -> f64 {
        rect(&self.prefix, rows, cols)
    }

    /// Sum of S² over `rows × cols`.
    pub fn rect_sum_sq(&self, rows: Range<usize>, cols: Range<usize>) -> f64 {
        rect(&self.prefix_sq, rows, cols)
    }

    /// Mean and population variance of the C(len, 2) pair similarities
    /// within `range`, from prefix sums alone.
    fn pair_stats(&self, range: Range<usize>) -> (f64, f64) {
        let len = range.end - range.start;
        let pairs = (len * (len - 1) / 2) as f64;
        // The diagonal contributes exactly `len` to both rectangle sums.
        let sum = (self.rect_sum(range.clone(), range.clone()) - len as f64) / 2.0;
        let sum_sq = (self.rect_sum_sq(range.clone(), range) - len as f64) / 2.0;
        let mean = sum / pairs;
        let var = (sum_sq / pairs - mean * mean).max(0.0);
        (mean, var)
    }
}

fn rect(prefix: &Array2<f64>, rows: Range<usize>, cols: Range<usize>) -> f64 {
    prefix[[rows.end, cols.end]] - prefix[[rows.start, cols.end]]
        - prefix[[rows.end, cols.start]]
        + prefix[[rows.start, cols.start]]
}

/// Build the cosine-similarity block for up to 180 embedding vectors.
pub fn similarity_block(vectors: &[&[f32]]) -> Result<SimilarityBlock> {
    let w = vectors.len();
    if w > BLOCK_WINDOWS {
        return Err(CadenceError::InvalidConfig(format!(
            "similarity block holds at most {BLOCK_WINDOWS} windows, got {w}"
        )));
    }
    let dim = vectors.first().map_or(0, |v| v.len());
    let mut unit = Vec::with_capacity(w);
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(CadenceError::ShapeMismatch(format!(
                "vector {i} has {} values, block dimension is {dim}",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CadenceError::NonFiniteFeature(i));
        }
        let mut u: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(CadenceError::ZeroVector(i));
        }
        for x in &mut u {
            *x /= norm;
        }
        unit.push(u);
    }

    let mut s = Array2::<f64>::zeros((w, w));
    for i in 0..w {
        s[[i, i]] = 1.0;
        for j in i + 1..w {
            // Identical vectors get exactly 1, so constant stretches score
            // exactly zero salience instead of accumulated rounding noise.
            let dot: f64 = if vectors[i] == vectors[j] {
                1.0
            } else {
                unit[i].iter().zip(&unit[j]).map(|(a, b)| a * b).sum()
            };
            s[[i, j]] = dot;
            s[[j, i]] = dot;
        }
    }

    let mut prefix = Array2::<f64>::zeros((w + 1, w + 1));
    let mut prefix_sq = Array2::<f64>::zeros((w + 1, w + 1));
    for i in 0..w {
        for j in 0..w {
            let v = s[[i, j]];
            prefix[[i + 1, j + 1]] =
                v + prefix[[i, j + 1]] + prefix[[i + 1, j]] - prefix[[i, j]];
            prefix_sq[[i + 1, j + 1]] =
                v * v + prefix_sq[[i, j + 1]] + prefix_sq[[i + 1, j]] - prefix_sq[[i, j]];
        }
    }
    Ok(SimilarityBlock { s, prefix, prefix_sq })
}

/// Candidate segment within one block: half-open window range, per-side
/// neighborhood extent, and its salience score.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentProposal {
    pub start: usize,
    pub end: usize,
    /// Nominal neighborhood per side; clipped at block edges when scored.
    pub neighborhood: usize,
    pub salience: f64,
}

/// Per-side neighborhood for a segment of `len` windows: half the segment
/// length, capped at 5 minutes.
pub fn neighborhood_extent(len: usize) -> usize {
    (len / 2).min(MAX_NEIGHBORHOOD_WINDOWS)
}

/// Salience of the window range `start..end` within the block: mean pair
/// similarity inside the segment, minus the mean over the segment plus its
/// neighborhood, minus twice the in-segment standard deviation.
pub fn salience(block: &SimilarityBlock, start: usize, end: usize) -> Result<f64> {
    let w = block.len();
    if start + 2 > end || end > w {
        return Err(CadenceError::OutOfBounds { start, end, len: w });
    }
    let nb = neighborhood_extent(end - start);
    let union = start.saturating_sub(nb)..(end + nb).min(w);
    let (seg_mean, seg_var) = block.pair_stats(start..end);
    let (union_mean, _) = block.pair_stats(union);
    Ok(seg_mean - union_mean - 2.0 * seg_var.sqrt())
}

/// All boundary pairs of a block of `w` windows: a segment is fixed by its
/// first and last window, so there are w·(w−1)/2 of them (16,110 at w=180).
pub fn boundary_pairs(w: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..w).flat_map(move |first| (first + 1..w).map(move |last| (first, last)))
}

/// Score every boundary pair at least 3 windows long and keep those with
/// strictly positive salience.
pub fn propose_segments(block: &SimilarityBlock) -> Result<Vec<SegmentProposal>> {
    let mut accepted = Vec::new();
    for (first, last) in boundary_pairs(block.len()) {
        let (start, end) = (first, last + 1);
        if end - start < MIN_SEGMENT_WINDOWS {
            continue;
        }
        let score = salience(block, start, end)?;
        if score > SALIENCE_EPSILON {
            accepted.push(SegmentProposal {
                start,
                end,
                neighborhood: neighborhood_extent(end - start),
                salience: score,
            });
        }
    }
    Ok(accepted)
}

fn overlap_len(a: &SegmentProposal, b: &SegmentProposal) -> usize {
    a.end.min(b.end).saturating_sub(a.start.max(b.start))
}

/// Resolve overlapping proposals into a disjoint set.
///
/// Candidates are processed in descending salience. When a candidate
/// overlaps a survivor by more than half of the shorter of the two, they
/// merge into their union (keeping the larger salience); otherwise the
/// overlapped region is cut from whichever of the two scores lower.
/// Anything shrinking below 3 windows is dropped.
pub fn suppress_overlaps(proposals: &[SegmentProposal]) -> Vec<SegmentProposal> {
    let mut order: Vec<SegmentProposal> = proposals.to_vec();
    order.sort_by(|a, b| {
        b.salience
            .total_cmp(&a.salience)
            .then(a.start.cmp(&b.start))
            .then(a.end.cmp(&b.end))
    });

    let mut survivors: Vec<SegmentProposal> = Vec::new();
    'candidates: for mut cand in order {
        loop {
            let hit = survivors
                .iter()
                .position(|s| overlap_len(s, &cand) > 0);
            let Some(idx) = hit else {
                if cand.end - cand.start >= MIN_SEGMENT_WINDOWS {
                    survivors.push(cand);
                }
                continue 'candidates;
            };
            let surv = survivors[idx].clone();
            let ov = overlap_len(&surv, &cand);
            let shorter = (surv.end - surv.start).min(cand.end - cand.start);
            if ov as f64 / shorter as f64 > 0.5 {
                survivors.remove(idx);
                cand = SegmentProposal {
                    start: cand.start.min(surv.start),
                    end: cand.end.max(surv.end),
                    neighborhood: 0,
                    salience: cand.salience.max(surv.salience),
                };
                cand.neighborhood = neighborhood_extent(cand.end - cand.start);
            } else if cand.salience > surv.salience {
                // The established segment loses the contested region. The
                // partial overlap guarantees neither interval contains the
                // other, so one cut leaves a single interval.
                let trimmed = &mut survivors[idx];
                if cand.start <= trimmed.start {
                    trimmed.start = cand.end;
                } else {
                    trimmed.end = cand.start;
                }
                if trimmed.end - trimmed.start < MIN_SEGMENT_WINDOWS {
                    survivors.remove(idx);
                } else {
                    trimmed.neighborhood = neighborhood_extent(trimmed.end - trimmed.start);
                }
            } else {
                if surv.start <= cand.start {
                    cand.start = surv.end;
                } else {
                    cand.end = surv.start;
                }
                if cand.end - cand.start < MIN_SEGMENT_WINDOWS {
                    continue 'candidates;
                }
                cand.neighborhood = neighborhood_extent(cand.end - cand.start);
            }
        }
    }
    survivors.sort_by_key(|s| s.start);
    survivors
}

/// A salient segment in absolute time.
#[derive(Debug, Clone, PartialEq)]
pub struct SalientSegment {
    pub subject_id: String,
    pub start_ms: i64,
    pub end_ms: i64,
    pub salience: f64,
}

/// Consecutive block ranges over a stream of `count` windows: full blocks of
/// 180, plus a trailing partial block when it has at least 6 windows.
pub fn block_spans(count: usize) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut at = 0;
    while at + BLOCK_WINDOWS <= count {
        spans.push(at..at + BLOCK_WINDOWS);
        at += BLOCK_WINDOWS;
    }
    if count - at >= MIN_BLOCK_WINDOWS {
        spans.push(at..count);
    }
    spans
}

/// Segment a full embedding stream: per subject, cut into blocks, propose
/// and suppress within each block, and stitch the results back in time
/// order. Blocks are scored in parallel.
pub fn segment_timeseries(series: &EmbeddingSeries) -> Result<Vec<SalientSegment>> {
    let records = series.records();
    let mut jobs: Vec<Range<usize>> = Vec::new();
    let mut at = 0;
    while at < records.len() {
        let subject = &records[at].subject_id;
        let mut end = at + 1;
        while end < records.len() && records[end].subject_id == *subject {
            if records[end].start_time_ms <= records[end - 1].start_time_ms {
                return Err(CadenceError::InvalidConfig(format!(
                    "windows for subject {subject} are not in increasing time order \
                     at record {end}"
                )));
            }
            end += 1;
        }
        jobs.extend(block_spans(end - at).into_iter().map(|r| at + r.start..at + r.end));
        at = end;
    }

    let per_block: Result<Vec<Vec<SalientSegment>>> = jobs
        .par_iter()
        .map(|span| {
            let vectors: Vec<&[f32]> =
                records[span.clone()].iter().map(|r| r.vector.as_slice()).collect();
            let block = similarity_block(&vectors).map_err(|e| match e {
                CadenceError::ZeroVector(i) => CadenceError::ZeroVector(span.start + i),
                CadenceError::NonFiniteFeature(i) => {
                    CadenceError::NonFiniteFeature(span.start + i)
                }
                other => other,
            })?;
            let kept = suppress_overlaps(&propose_segments(&block)?);
            Ok(kept
                .into_iter()
                .map(|p| SalientSegment {
                    subject_id: records[span.start].subject_id.clone(),
                    start_ms: records[span.start + p.start].start_time_ms,
                    end_ms: records[span.start + p.end - 1].start_time_ms + WINDOW_MS,
                    salience: p.salience,
                })
                .collect())
        })
        .collect();
    Ok(per_block?.into_iter().flatten().collect())
}
