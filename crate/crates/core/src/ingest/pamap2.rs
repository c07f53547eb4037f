//! PAMAP2 physical-activity monitoring layout: one space-separated `.dat`
//! file per subject (optionally under a `Protocol/` directory), 54 columns at
//! 100 Hz. Column 0 is the timestamp in seconds, column 1 the activity code,
//! and columns 4-6 the hand IMU's ±16 g accelerometer in m/s². Rows whose
//! acceleration fields are NaN are dropped.

use std::path::Path;

use super::{clamp_interval, sorted_files, DatasetDescriptor};
use crate::error::{CadenceError, Result};
use crate::signal::{LabeledInterval, Recording};

pub(super) const SAMPLE_RATE_HZ: f64 = 100.0;
pub(super) const ACC_COLUMNS: [usize; 3] = [4, 5, 6];

pub(super) const ACTIVITY_NAMES: &[(u32, &str)] = &[
    (0, "null"),
    (1, "lying"),
    (2, "sitting"),
    (3, "standing"),
    (4, "walking"),
    (5, "running"),
    (6, "cycling"),
    (7, "nordic_walking"),
    (9, "watching_tv"),
    (10, "computer_work"),
    (11, "car_driving"),
    (12, "ascending_stairs"),
    (13, "descending_stairs"),
    (16, "vacuum_cleaning"),
    (17, "ironing"),
    (18, "folding_laundry"),
    (19, "house_cleaning"),
    (20, "playing_soccer"),
    (24, "rope_jumping"),
];

struct Row {
    line: usize,
    t_s: f64,
    code: u32,
    acc: [f64; 3],
}

pub(super) fn load(
    desc: &DatasetDescriptor,
    root: &Path,
) -> Result<Vec<(Recording, Vec<LabeledInterval>)>> {
    let dir = if root.join("Protocol").is_dir() {
        root.join("Protocol")
    } else {
        root.to_path_buf()
    };
    let files = sorted_files(&dir, |name| name.ends_with(".dat"))?;
    if files.is_empty() {
        return Err(CadenceError::UnknownLayout(format!(
            "no .dat files under {}",
            dir.display()
        )));
    }

    let mut out = Vec::new();
    for path in files {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        let subject = stem.strip_prefix("subject").unwrap_or(stem).to_string();
        let rows = parse_file(desc, &path)?;
        for stream in split_at_gaps(rows, desc.sample_rate_hz) {
            out.push(stream_to_recording(desc, &path, &subject, stream)?);
        }
    }
    Ok(out)
}

fn parse_file(desc: &DatasetDescriptor, path: &Path) -> Result<Vec<Row>> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CadenceError::io(path, e))?;
    let max_col = *desc.acc_columns.iter().max().unwrap();

    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split_ascii_whitespace().collect();
        if fields.len() <= max_col {
            return Err(CadenceError::MissingColumns {
                file: file.clone(),
                expected: max_col + 1,
                found: fields.len(),
            });
        }
        let t_s: f64 = fields[0].parse().map_err(|_| CadenceError::RecordParse {
            file: file.clone(),
            line,
            message: format!("bad timestamp {:?}", fields[0]),
        })?;
        let code: u32 = fields[1].parse().map_err(|_| CadenceError::RecordParse {
            file: file.clone(),
            line,
            message: format!("bad activity code {:?}", fields[1]),
        })?;
        let mut acc = [0.0f64; 3];
        for (k, &col) in desc.acc_columns.iter().enumerate() {
            acc[k] = fields[col].parse().map_err(|_| CadenceError::RecordParse {
                file: file.clone(),
                line,
                message: format!("bad acceleration field {:?}", fields[col]),
            })?;
        }
        if acc.iter().any(|v| v.is_nan()) {
            continue;
        }
        if let Some(prev) = rows.last() {
            let prev: &Row = prev;
            if t_s <= prev.t_s {
                return Err(CadenceError::RecordParse {
                    file: file.clone(),
                    line,
                    message: format!("non-increasing timestamp {t_s}"),
                });
            }
        }
        rows.push(Row { line, t_s, code, acc });
    }
    Ok(rows)
}

fn split_at_gaps(rows: Vec<Row>, rate: f64) -> Vec<Vec<Row>> {
    let gap = 2.0 / rate + 1e-9;
    let mut streams: Vec<Vec<Row>> = Vec::new();
    for row in rows {
        match streams.last_mut() {
            Some(stream) if row.t_s - stream.last().unwrap().t_s <= gap => stream.push(row),
            _ => streams.push(vec![row]),
        }
    }
    streams.retain(|s| s.len() >= 2);
    streams
}

fn stream_to_recording(
    desc: &DatasetDescriptor,
    path: &Path,
    subject: &str,
    rows: Vec<Row>,
) -> Result<(Recording, Vec<LabeledInterval>)> {
    let file = path.display().to_string();
    let period_ms = 1000.0 / desc.sample_rate_hz;
    let to_ms = |t_s: f64| (t_s * 1000.0).round() as i64;

    let rec = Recording {
        subject_id: subject.to_string(),
        device_id: "hand".to_string(),
        sample_rate_hz: desc.sample_rate_hz,
        start_time_ms: to_ms(rows[0].t_s),
        samples: rows.iter().map(|r| r.acc).collect(),
        unit_scale: desc.unit_scale,
    };

    let mut intervals = Vec::new();
    let mut run_start = 0;
    for i in 1..=rows.len() {
        if i == rows.len() || rows[i].code != rows[run_start].code {
            let code = rows[run_start].code;
            let name = desc.activity_names.get(&code).copied().ok_or_else(|| {
                CadenceError::RecordParse {
                    file: file.clone(),
                    line: rows[run_start].line,
                    message: format!("unknown activity code {code}"),
                }
            })?;
            let iv = LabeledInterval {
                activity: name.to_string(),
                start_ms: to_ms(rows[run_start].t_s),
                end_ms: to_ms(rows[i - 1].t_s + period_ms / 1000.0),
            };
            if let Some(iv) = clamp_interval(iv, &rec) {
                intervals.push(iv);
            }
            run_start = i;
        }
    }
    Ok((rec, intervals))
}
