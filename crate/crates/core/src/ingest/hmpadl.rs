//! HMP ADL layout: one directory per activity, each holding per-session text
//! files named `Accelerometer-<Y>-<M>-<D>-<H>-<Min>-<S>-<activity>-<subject>.txt`
//! with three integer columns in 0..=63 at 32 Hz. Codes map to g through the
//! sensor's documented affine response, -1.5 g + code · 3 g / 63, so emitted
//! recordings already carry unit_scale 1.

use std::path::Path;

use super::{sorted_dirs, sorted_files, DatasetDescriptor};
use crate::error::{CadenceError, Result};
use crate::signal::{LabeledInterval, Recording};

pub(super) const SAMPLE_RATE_HZ: f64 = 32.0;
const CODE_MAX: i64 = 63;

pub(super) fn load(
    desc: &DatasetDescriptor,
    root: &Path,
) -> Result<Vec<(Recording, Vec<LabeledInterval>)>> {
    let dirs = sorted_dirs(root)?;
    let mut out = Vec::new();
    for dir in &dirs {
        let activity = match dir.file_name().and_then(|n| n.to_str()) {
            Some(name) => name.to_ascii_lowercase(),
            None => continue,
        };
        for path in sorted_files(dir, |name| name.ends_with(".txt"))? {
            out.push(parse_file(desc, &path, &activity)?);
        }
    }
    if out.is_empty() {
        return Err(CadenceError::UnknownLayout(format!(
            "no per-activity directories with .txt files under {}",
            root.display()
        )));
    }
    Ok(out)
}

fn parse_file(
    desc: &DatasetDescriptor,
    path: &Path,
    activity: &str,
) -> Result<(Recording, Vec<LabeledInterval>)> {
    let file = path.display().to_string();
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    let (start_time_ms, subject) = parse_stem(stem);
    let text = std::fs::read_to_string(path).map_err(|e| CadenceError::io(path, e))?;

    let mut samples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split_ascii_whitespace().collect();
        if fields.len() < 3 {
            return Err(CadenceError::MissingColumns {
                file: file.clone(),
                expected: 3,
                found: fields.len(),
            });
        }
        let mut acc = [0.0f64; 3];
        for k in 0..3 {
            let code: i64 = fields[k].parse().map_err(|_| CadenceError::RecordParse {
                file: file.clone(),
                line,
                message: format!("bad acceleration code {:?}", fields[k]),
            })?;
            if !(0..=CODE_MAX).contains(&code) {
                return Err(CadenceError::RecordParse {
                    file: file.clone(),
                    line,
                    message: format!("acceleration code {code} outside 0..={CODE_MAX}"),
                });
            }
            acc[k] = -1.5 + code as f64 * 3.0 / CODE_MAX as f64;
        }
        samples.push(acc);
    }

    let rec = Recording {
        subject_id: subject,
        // Stems are unique per session; keeping them as device ids
        // distinguishes simultaneous files from one subject.
        device_id: stem.to_string(),
        sample_rate_hz: desc.sample_rate_hz,
        start_time_ms,
        samples,
        unit_scale: 1.0,
    };
    let mut intervals = Vec::new();
    if rec.end_time_ms() > rec.start_time_ms {
        intervals.push(LabeledInterval {
            activity: activity.to_string(),
            start_ms: rec.start_time_ms,
            end_ms: rec.end_time_ms(),
        });
    }
    Ok((rec, intervals))
}

/// Pull the session timestamp and subject tag out of a file stem like
/// `Accelerometer-2011-04-11-13-28-18-brush_teeth-f1`. Stems that do not
/// follow the convention fall back to time 0 and the stem as subject.
fn parse_stem(stem: &str) -> (i64, String) {
    let tokens: Vec<&str> = stem.split('-').collect();
    if tokens.len() >= 9 {
        let nums: Option<Vec<i64>> = tokens[1..7].iter().map(|t| t.parse().ok()).collect();
        if let Some(n) = nums {
            let ms = epoch_ms(n[0], n[1], n[2], n[3], n[4], n[5]);
            let subject = tokens.last().unwrap().to_string();
            return (ms, subject);
        }
    }
    (0, stem.to_string())
}

/// Civil date-time → epoch milliseconds, valid for years ≥ 1970.
fn epoch_ms(year: i64, month: i64, day: i64, hour: i64, min: i64, sec: i64) -> i64 {
    let y = if month <= 2 { year - 1 } else { year };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let mp = (month + 9) % 12;
    let doy = (153 * mp + 2) / 5 + day - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    let days = era * 146_097 + doe - 719_468;
    (days * 86_400 + hour * 3_600 + min * 60 + sec) * 1000
}
