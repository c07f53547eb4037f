//! Daily and Sports Activities layout: `a<AA>/p<P>/s<SS>.txt` with 19
//! activities × 8 subjects × 60 five-second segments, 45 comma-separated
//! columns at 25 Hz in m/s². Units are ordered torso, right arm, left arm,
//! right leg, left leg with 9 columns each; the wrist streams are the arm
//! accelerometers (columns 9-11 and 18-20). Segments concatenate in filename
//! order, and each activity is placed an hour apart on the synthetic clock so
//! per-subject streams never overlap.

use std::path::Path;

use super::{sorted_dirs, sorted_files, DatasetDescriptor};
use crate::error::{CadenceError, Result};
use crate::signal::{LabeledInterval, Recording};

pub(super) const SAMPLE_RATE_HZ: f64 = 25.0;
pub(super) const RIGHT_ACC_COLUMNS: [usize; 3] = [9, 10, 11];
pub(super) const LEFT_ACC_COLUMNS: [usize; 3] = [18, 19, 20];
const COLUMNS: usize = 45;
const ACTIVITY_SPACING_MS: i64 = 3_600_000;

const ACTIVITY_NAMES: &[&str] = &[
    "sitting",
    "standing",
    "lying_on_back",
    "lying_on_right_side",
    "ascending_stairs",
    "descending_stairs",
    "standing_in_elevator",
    "moving_in_elevator",
    "walking_in_parking_lot",
    "walking_on_treadmill_flat",
    "walking_on_treadmill_inclined",
    "running_on_treadmill",
    "exercising_on_stepper",
    "exercising_on_cross_trainer",
    "cycling_horizontal",
    "cycling_vertical",
    "rowing",
    "jumping",
    "playing_basketball",
];

pub(super) fn load(
    desc: &DatasetDescriptor,
    root: &Path,
) -> Result<Vec<(Recording, Vec<LabeledInterval>)>> {
    let activity_dirs = sorted_dirs(root)?;
    let mut out = Vec::new();
    for adir in &activity_dirs {
        let aname = match adir.file_name().and_then(|n| n.to_str()) {
            Some(n) => n,
            None => continue,
        };
        let index: usize = match aname.strip_prefix('a').and_then(|n| n.parse().ok()) {
            Some(i) if (1..=ACTIVITY_NAMES.len()).contains(&i) => i,
            _ => continue,
        };
        let activity = ACTIVITY_NAMES[index - 1];
        let start_time_ms = (index as i64 - 1) * ACTIVITY_SPACING_MS;

        for pdir in sorted_dirs(adir)? {
            let subject = match pdir.file_name().and_then(|n| n.to_str()) {
                Some(n) if n.starts_with('p') => n.to_string(),
                _ => continue,
            };
            let files = sorted_files(&pdir, |name| name.ends_with(".txt"))?;
            if files.is_empty() {
                continue;
            }
            let mut right = Vec::new();
            let mut left = Vec::new();
            for path in &files {
                parse_segment(path, &mut right, &mut left)?;
            }
            for (device, samples) in [("right_wrist", right), ("left_wrist", left)] {
                let rec = Recording {
                    subject_id: subject.clone(),
                    device_id: device.to_string(),
                    sample_rate_hz: desc.sample_rate_hz,
                    start_time_ms,
                    samples,
                    unit_scale: desc.unit_scale,
                };
                let intervals = vec![LabeledInterval {
                    activity: activity.to_string(),
                    start_ms: rec.start_time_ms,
                    end_ms: rec.end_time_ms(),
                }];
                out.push((rec, intervals));
            }
        }
    }
    if out.is_empty() {
        return Err(CadenceError::UnknownLayout(format!(
            "no a*/p*/s*.txt segment files under {}",
            root.display()
        )));
    }
    Ok(out)
}

fn parse_segment(
    path: &Path,
    right: &mut Vec<[f64; 3]>,
    left: &mut Vec<[f64; 3]>,
) -> Result<()> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CadenceError::io(path, e))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() < COLUMNS {
            return Err(CadenceError::MissingColumns {
                file: file.clone(),
                expected: COLUMNS,
                found: fields.len(),
            });
        }
        let parse3 = |cols: [usize; 3]| -> Result<[f64; 3]> {
            let mut acc = [0.0f64; 3];
            for (k, &col) in cols.iter().enumerate() {
                acc[k] = fields[col].parse().map_err(|_| CadenceError::RecordParse {
                    file: file.clone(),
                    line,
                    message: format!("bad acceleration field {:?}", fields[col]),
                })?;
            }
            Ok(acc)
        };
        right.push(parse3(RIGHT_ACC_COLUMNS)?);
        left.push(parse3(LEFT_ACC_COLUMNS)?);
    }
    Ok(())
}
