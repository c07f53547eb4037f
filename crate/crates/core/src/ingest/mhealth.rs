//! MHealth layout: one whitespace-separated `mHealth_subject<N>.log` file
//! per subject, 24 columns at 50 Hz with no timestamps. Columns 14-16 carry
//! the right-wrist accelerometer in m/s² and column 23 the activity label.

use std::path::Path;

use super::{clamp_interval, sorted_files, DatasetDescriptor};
use crate::error::{CadenceError, Result};
use crate::signal::{LabeledInterval, Recording};

pub(super) const SAMPLE_RATE_HZ: f64 = 50.0;
pub(super) const ACC_COLUMNS: [usize; 3] = [14, 15, 16];
const LABEL_COLUMN: usize = 23;

pub(super) const ACTIVITY_NAMES: &[(u32, &str)] = &[
    (0, "null"),
    (1, "standing"),
    (2, "sitting"),
    (3, "lying"),
    (4, "walking"),
    (5, "climbing_stairs"),
    (6, "waist_bends_forward"),
    (7, "frontal_elevation_arms"),
    (8, "knees_bending"),
    (9, "cycling"),
    (10, "jogging"),
    (11, "running"),
    (12, "jump_front_back"),
];

pub(super) fn load(
    desc: &DatasetDescriptor,
    root: &Path,
) -> Result<Vec<(Recording, Vec<LabeledInterval>)>> {
    let dir = if root.join("MHEALTHDATASET").is_dir() {
        root.join("MHEALTHDATASET")
    } else {
        root.to_path_buf()
    };
    let files = sorted_files(&dir, |name| {
        name.starts_with("mHealth_") && name.ends_with(".log")
    })?;
    if files.is_empty() {
        return Err(CadenceError::UnknownLayout(format!(
            "no mHealth_*.log files under {}",
            dir.display()
        )));
    }

    let mut out = Vec::new();
    for path in files {
        out.push(parse_file(desc, &path)?);
    }
    Ok(out)
}

fn parse_file(
    desc: &DatasetDescriptor,
    path: &Path,
) -> Result<(Recording, Vec<LabeledInterval>)> {
    let file = path.display().to_string();
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    let subject = stem
        .strip_prefix("mHealth_subject")
        .unwrap_or(stem)
        .to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CadenceError::io(path, e))?;

    let mut samples = Vec::new();
    let mut codes = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split_ascii_whitespace().collect();
        if fields.len() <= LABEL_COLUMN {
            return Err(CadenceError::MissingColumns {
                file: file.clone(),
                expected: LABEL_COLUMN + 1,
                found: fields.len(),
            });
        }
        let mut acc = [0.0f64; 3];
        for (k, &col) in desc.acc_columns.iter().enumerate() {
            acc[k] = fields[col].parse().map_err(|_| CadenceError::RecordParse {
                file: file.clone(),
                line,
                message: format!("bad acceleration field {:?}", fields[col]),
            })?;
        }
        let code: u32 = fields[LABEL_COLUMN]
            .parse()
            .map_err(|_| CadenceError::RecordParse {
                file: file.clone(),
                line,
                message: format!("bad activity label {:?}", fields[LABEL_COLUMN]),
            })?;
        samples.push(acc);
        codes.push((line, code));
    }

    // No timestamps in the layout: sample i sits at i * 1000 / rate ms.
    let to_ms = |i: usize| (i as f64 * 1000.0 / desc.sample_rate_hz).round() as i64;
    let rec = Recording {
        subject_id: subject,
        device_id: "right_wrist".to_string(),
        sample_rate_hz: desc.sample_rate_hz,
        start_time_ms: 0,
        samples,
        unit_scale: desc.unit_scale,
    };

    let mut intervals = Vec::new();
    let mut run_start = 0;
    for i in 1..=codes.len() {
        if i == codes.len() || codes[i].1 != codes[run_start].1 {
            let (line, code) = codes[run_start];
            let name = desc.activity_names.get(&code).copied().ok_or_else(|| {
                CadenceError::RecordParse {
                    file: file.clone(),
                    line,
                    message: format!("unknown activity label {code}"),
                }
            })?;
            let iv = LabeledInterval {
                activity: name.to_string(),
                start_ms: to_ms(run_start),
                end_ms: to_ms(i),
            };
            if let Some(iv) = clamp_interval(iv, &rec) {
                intervals.push(iv);
            }
            run_start = i;
        }
    }
    Ok((rec, intervals))
}
