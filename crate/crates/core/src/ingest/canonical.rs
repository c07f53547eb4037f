//! Canonical on-disk format: per-recording CSV of `t_ms,ax_g,ay_g,az_g`
//! rows with a `.meta` key=value sidecar and a `.labels.csv` interval
//! sidecar. Values are written in g with shortest round-trip formatting, so
//! reading back reproduces them bitwise.

use std::fmt::Write as _;
use std::path::Path;

use super::sorted_files;
use crate::error::{CadenceError, Result};
use crate::signal::{LabeledInterval, Recording};

/// Write one recording and its labels into `dir`.
///
/// Files are named `{subject}__{device}__{start_ms}` with path-unsafe
/// characters replaced, making repeated ingests overwrite deterministically.
pub fn write_canonical(rec: &Recording, intervals: &[LabeledInterval], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CadenceError::io(dir, e))?;
    let base = format!(
        "{}__{}__{}",
        sanitize(&rec.subject_id),
        sanitize(&rec.device_id),
        rec.start_time_ms
    );

    let mut data = String::from("t_ms,ax_g,ay_g,az_g\n");
    for (i, s) in rec.samples.iter().enumerate() {
        let t_ms = rec.start_time_ms + (i as f64 * 1000.0 / rec.sample_rate_hz).round() as i64;
        let _ = writeln!(
            data,
            "{},{},{},{}",
            t_ms,
            s[0] * rec.unit_scale,
            s[1] * rec.unit_scale,
            s[2] * rec.unit_scale
        );
    }
    let data_path = dir.join(format!("{base}.csv"));
    std::fs::write(&data_path, data).map_err(|e| CadenceError::io(&data_path, e))?;

    let meta = format!(
        "subject_id={}\ndevice_id={}\nsample_rate_hz={}\nstart_time_ms={}\n",
        rec.subject_id, rec.device_id, rec.sample_rate_hz, rec.start_time_ms
    );
    let meta_path = dir.join(format!("{base}.meta"));
    std::fs::write(&meta_path, meta).map_err(|e| CadenceError::io(&meta_path, e))?;

    let mut labels = String::from("activity,start_ms,end_ms\n");
    for iv in intervals {
        let _ = writeln!(labels, "{},{},{}", iv.activity, iv.start_ms, iv.end_ms);
    }
    let labels_path = dir.join(format!("{base}.labels.csv"));
    std::fs::write(&labels_path, labels).map_err(|e| CadenceError::io(&labels_path, e))
}

/// Read every recording under `dir`, sorted by file name.
pub fn read_canonical(dir: &Path) -> Result<Vec<(Recording, Vec<LabeledInterval>)>> {
    let files = sorted_files(dir, |name| {
        name.ends_with(".csv") && !name.ends_with(".labels.csv")
    })?;
    if files.is_empty() {
        return Err(CadenceError::UnknownLayout(format!(
            "no canonical .csv files under {}",
            dir.display()
        )));
    }
    files.iter().map(|path| read_one(path)).collect()
}

fn read_one(data_path: &Path) -> Result<(Recording, Vec<LabeledInterval>)> {
    let meta_path = data_path.with_extension("meta");
    let meta = std::fs::read_to_string(&meta_path).map_err(|e| CadenceError::io(&meta_path, e))?;
    let mut subject_id = None;
    let mut device_id = None;
    let mut sample_rate_hz = None;
    let mut start_time_ms = None;
    for line in meta.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CadenceError::SchemaMismatch {
            path: meta_path.display().to_string(),
            message: format!("expected key=value, got {line:?}"),
        })?;
        match key {
            "subject_id" => subject_id = Some(value.to_string()),
            "device_id" => device_id = Some(value.to_string()),
            "sample_rate_hz" => sample_rate_hz = value.parse::<f64>().ok(),
            "start_time_ms" => start_time_ms = value.parse::<i64>().ok(),
            _ => {}
        }
    }
    let schema = |message: String| CadenceError::SchemaMismatch {
        path: meta_path.display().to_string(),
        message,
    };
    let sample_rate_hz =
        sample_rate_hz.ok_or_else(|| schema("missing or bad sample_rate_hz".into()))?;
    if sample_rate_hz <= 0.0 {
        return Err(schema(format!("sample_rate_hz {sample_rate_hz} not positive")));
    }
    let rec_head = (
        subject_id.ok_or_else(|| schema("missing subject_id".into()))?,
        device_id.ok_or_else(|| schema("missing device_id".into()))?,
        start_time_ms.ok_or_else(|| schema("missing or bad start_time_ms".into()))?,
    );

    let text = std::fs::read_to_string(data_path).map_err(|e| CadenceError::io(data_path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("t_ms,ax_g,ay_g,az_g") => {}
        other => {
            return Err(CadenceError::SchemaMismatch {
                path: data_path.display().to_string(),
                message: format!("bad header {other:?}"),
            })
        }
    }
    let mut samples = Vec::new();
    for (idx, raw) in lines.enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let bad = || CadenceError::SchemaMismatch {
            path: data_path.display().to_string(),
            message: format!("bad row at data line {}", idx + 1),
        };
        let mut fields = raw.split(',');
        let _t_ms: i64 = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
        let mut acc = [0.0f64; 3];
        for v in &mut acc {
            *v = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
        }
        samples.push(acc);
    }

    let rec = Recording {
        subject_id: rec_head.0,
        device_id: rec_head.1,
        sample_rate_hz,
        start_time_ms: rec_head.2,
        samples,
        unit_scale: 1.0,
    };

    let labels_path = data_path.with_file_name(format!(
        "{}.labels.csv",
        data_path.file_stem().and_then(|s| s.to_str()).unwrap_or("")
    ));
    let mut intervals = Vec::new();
    if labels_path.is_file() {
        let text =
            std::fs::read_to_string(&labels_path).map_err(|e| CadenceError::io(&labels_path, e))?;
        for (idx, raw) in text.lines().enumerate() {
            if idx == 0 || raw.trim().is_empty() {
                continue;
            }
            let bad = || CadenceError::SchemaMismatch {
                path: labels_path.display().to_string(),
                message: format!("bad label row at line {}", idx + 1),
            };
            // Split from the right so activity names stay free-form.
            let mut fields = raw.rsplitn(3, ',');
            let end_ms: i64 = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
            let start_ms: i64 = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
            let activity = fields.next().ok_or_else(bad)?.to_string();
            if start_ms >= end_ms {
                return Err(bad());
            }
            intervals.push(LabeledInterval { activity, start_ms, end_ms });
        }
    }
    Ok((rec, intervals))
}

fn sanitize(s: &str) -> String {
    let mut out: String = s
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect();
    if out.is_empty() {
        out.push('_');
    }
    out
}
