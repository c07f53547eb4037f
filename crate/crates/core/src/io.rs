//! Pipeline file formats: the embedding blob with its metadata sidecar, and
//! the CSV renderings of loss traces, segments, probe reports, and
//! segmentation-evaluation reports.
//!
//! Renderers return plain strings and use shortest round-trip float
//! formatting, so equal in-memory values always yield byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{CadenceError, Result};
use crate::evaluation::{MetricRow, SegEvalReport};
use crate::probe::{AccuracyReport, EmbeddingRecord, EmbeddingSeries};
use crate::segmentation::SalientSegment;
use crate::signal::LabeledInterval;

const EMBEDDINGS_MAGIC: &str = "cadence-embeddings v1";
/// Marker for an undefined ratio (zero denominator) in report CSVs.
pub const NA_MARKER: &str = "NA";

/// Write `bytes` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CadenceError::io(parent, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(|e| CadenceError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CadenceError::io(path, e))
}

/// Metadata sidecar accompanying an embeddings file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.csv");
    PathBuf::from(s)
}

/// Write an embedding series: a binary file (text header with count and
/// dimension, then little-endian 32-bit floats) plus a
/// `subject_id,start_ms,label` sidecar CSV with one row per record, in order.
/// An empty label field means unlabeled.
pub fn write_embeddings(path: &Path, series: &EmbeddingSeries) -> Result<()> {
    let mut meta = String::from("subject_id,start_ms,label\n");
    for rec in series.records() {
        let label = rec.label.as_deref().unwrap_or("");
        for field in [rec.subject_id.as_str(), label] {
            if field.contains([',', '\n', '\r']) {
                return Err(CadenceError::InvalidConfig(format!(
                    "field {field:?} cannot appear in a CSV sidecar"
                )));
            }
        }
        let _ = writeln!(meta, "{},{},{label}", rec.subject_id, rec.start_time_ms);
    }

    let header = format!(
        "{EMBEDDINGS_MAGIC}\ncount={}\ndim={}\nblob\n",
        series.len(),
        series.dim()
    );
    let mut bytes = header.into_bytes();
    bytes.reserve(series.len() * series.dim() * 4);
    for rec in series.records() {
        for v in &rec.vector {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }

    write_atomic(path, &bytes)?;
    write_atomic(&sidecar_path(path), meta.as_bytes())
}

/// Read an embeddings file and its sidecar back into a series.
pub fn read_embeddings(path: &Path) -> Result<EmbeddingSeries> {
    let bytes = std::fs::read(path).map_err(|e| CadenceError::io(path, e))?;
    let schema = |message: String| CadenceError::SchemaMismatch {
        path: path.display().to_string(),
        message,
    };

    let mut offset = 0usize;
    let mut next_line = || -> Result<&str> {
        let rest = &bytes[offset..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| schema("truncated header".into()))?;
        let line = std::str::from_utf8(&rest[..end])
            .map_err(|_| schema("non-UTF-8 header".into()))?;
        offset += end + 1;
        Ok(line)
    };

    if next_line()? != EMBEDDINGS_MAGIC {
        return Err(schema(format!("expected {EMBEDDINGS_MAGIC:?} header")));
    }
    let mut count = None;
    let mut dim = None;
    loop {
        let line = next_line()?;
        if line == "blob" {
            break;
        }
        match line.split_once('=') {
            Some(("count", v)) => count = v.parse::<usize>().ok(),
            Some(("dim", v)) => dim = v.parse::<usize>().ok(),
            _ => return Err(schema(format!("unexpected header line {line:?}"))),
        }
    }
    let count = count.ok_or_else(|| schema("missing or bad count".into()))?;
    let dim = dim.ok_or_else(|| schema("missing or bad dim".into()))?;
    let blob = &bytes[offset..];
    if blob.len() != count * dim * 4 {
        return Err(schema(format!(
            "blob holds {} bytes, expected {} for {count}×{dim} floats",
            blob.len(),
            count * dim * 4
        )));
    }

    let meta_path = sidecar_path(path);
    let meta = std::fs::read_to_string(&meta_path).map_err(|e| CadenceError::io(&meta_path, e))?;
    let mut rows = Vec::with_capacity(count);
    for (idx, raw) in meta.lines().enumerate() {
        if idx == 0 {
            if raw != "subject_id,start_ms,label" {
                return Err(CadenceError::SchemaMismatch {
                    path: meta_path.display().to_string(),
                    message: format!("bad sidecar header {raw:?}"),
                });
            }
            continue;
        }
        if raw.trim().is_empty() {
            continue;
        }
        let bad = || CadenceError::RecordParse {
            file: meta_path.display().to_string(),
            line: idx + 1,
            message: "expected subject_id,start_ms,label".into(),
        };
        let mut fields = raw.split(',');
        let subject_id = fields.next().ok_or_else(bad)?.to_string();
        let start_time_ms: i64 = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
        let label = match fields.next().ok_or_else(bad)? {
            "" => None,
            s => Some(s.to_string()),
        };
        if fields.next().is_some() {
            return Err(bad());
        }
        rows.push((subject_id, start_time_ms, label));
    }
    if rows.len() != count {
        return Err(CadenceError::SchemaMismatch {
            path: meta_path.display().to_string(),
            message: format!("{} sidecar rows for {count} records", rows.len()),
        });
    }

    let records = rows
        .into_iter()
        .enumerate()
        .map(|(i, (subject_id, start_time_ms, label))| {
            let mut vector = Vec::with_capacity(dim);
            for j in 0..dim {
                let at = (i * dim + j) * 4;
                let raw: [u8; 4] = blob[at..at + 4].try_into().expect("length checked");
                vector.push(f32::from_le_bytes(raw));
            }
            EmbeddingRecord { subject_id, start_time_ms, vector, label }
        })
        .collect();
    EmbeddingSeries::new(records)
}

/// Per-step loss CSV; `first_step` is the absolute index of `trace[0]`.
pub fn render_loss_csv(first_step: u64, trace: &[f32]) -> String {
    let mut out = String::from("step,loss\n");
    for (i, loss) in trace.iter().enumerate() {
        let _ = writeln!(out, "{},{loss}", first_step + i as u64);
    }
    out
}

/// Segment table CSV.
pub fn render_segments_csv(segments: &[SalientSegment]) -> String {
    let mut out = String::from("subject_id,start_ms,end_ms,salience\n");
    for seg in segments {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            seg.subject_id, seg.start_ms, seg.end_ms, seg.salience
        );
    }
    out
}

/// Parse a segment table; `origin` names the source in errors.
pub fn parse_segments_csv(text: &str, origin: &str) -> Result<Vec<SalientSegment>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "subject_id,start_ms,end_ms,salience")) => {}
        other => {
            return Err(CadenceError::SchemaMismatch {
                path: origin.into(),
                message: format!("bad header {:?}", other.map(|(_, l)| l)),
            })
        }
    }
    let mut segments = Vec::new();
    for (idx, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        let bad = || CadenceError::RecordParse {
            file: origin.into(),
            line: idx + 1,
            message: "expected subject_id,start_ms,end_ms,salience".into(),
        };
        // Split from the right so subject ids stay free-form.
        let mut fields = raw.rsplitn(4, ',');
        let salience: f64 = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
        let end_ms: i64 = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
        let start_ms: i64 = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
        let subject_id = fields.next().ok_or_else(bad)?.to_string();
        if start_ms >= end_ms {
            return Err(bad());
        }
        segments.push(SalientSegment { subject_id, start_ms, end_ms, salience });
    }
    Ok(segments)
}

/// Label-efficiency report CSV: one row per (n, repeat) accuracy, then the
/// full-training-split repeats with `full` in the n column.
pub fn render_probe_csv(report: &AccuracyReport, full_split: &[f64]) -> String {
    let mut out = String::from("source,n,repeat,accuracy\n");
    let source = report.source.name();
    for cell in &report.cells {
        for (repeat, acc) in cell.accuracies.iter().enumerate() {
            let _ = writeln!(out, "{source},{},{repeat},{acc}", cell.n);
        }
    }
    for (repeat, acc) in full_split.iter().enumerate() {
        let _ = writeln!(out, "{source},full,{repeat},{acc}");
    }
    out
}

fn ratio_field(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => NA_MARKER.into(),
    }
}

/// Segmentation-evaluation report CSV: the overall row, then one row per
/// truth activity. Undefined ratios render as [`NA_MARKER`].
pub fn render_eval_csv(report: &SegEvalReport) -> String {
    let mut out =
        String::from("activity,event_precision,event_recall,window_precision,window_recall\n");
    let mut push = |row: &MetricRow| {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.activity,
            ratio_field(row.event_precision),
            ratio_field(row.event_recall),
            ratio_field(row.window_precision),
            ratio_field(row.window_recall)
        );
    };
    push(&report.overall);
    for row in &report.per_activity {
        push(row);
    }
    out
}

/// Parse a combined labels CSV (`subject_id,activity,start_ms,end_ms`) into
/// per-subject interval lists, preserving first-seen subject order.
pub fn parse_labels_csv(text: &str, origin: &str) -> Result<Vec<(String, Vec<LabeledInterval>)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "subject_id,activity,start_ms,end_ms")) => {}
        other => {
            return Err(CadenceError::SchemaMismatch {
                path: origin.into(),
                message: format!("bad header {:?}", other.map(|(_, l)| l)),
            })
        }
    }
    let mut subjects: Vec<(String, Vec<LabeledInterval>)> = Vec::new();
    for (idx, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        let bad = || CadenceError::RecordParse {
            file: origin.into(),
            line: idx + 1,
            message: "expected subject_id,activity,start_ms,end_ms".into(),
        };
        let fields: Vec<&str> = raw.split(',').collect();
        let [subject_id, activity, start, end] = fields[..] else {
            return Err(bad());
        };
        let start_ms: i64 = start.parse().map_err(|_| bad())?;
        let end_ms: i64 = end.parse().map_err(|_| bad())?;
        if start_ms >= end_ms || activity.is_empty() {
            return Err(bad());
        }
        let interval = LabeledInterval::new(activity, start_ms, end_ms);
        match subjects.iter_mut().find(|(s, _)| s == subject_id) {
            Some((_, ivs)) => ivs.push(interval),
            None => subjects.push((subject_id.to_string(), vec![interval])),
        }
    }
    Ok(subjects)
}

/// Render per-subject interval lists as a combined labels CSV.
pub fn render_labels_csv(subjects: &[(String, Vec<LabeledInterval>)]) -> String {
    let mut out = String::from("subject_id,activity,start_ms,end_ms\n");
    for (subject_id, intervals) in subjects {
        for iv in intervals {
            let _ = writeln!(out, "{subject_id},{},{},{}", iv.activity, iv.start_ms, iv.end_ms);
        }
    }
    out
}
