//! Dataset adapters: the four public benchmark layouts plus the canonical
//! on-disk format produced by `ingest`.
//!
//! Each adapter reads the wrist-accelerometer columns only, drops or splits
//! malformed regions per the rules documented on the adapter, and emits
//! [`Recording`]s with native units plus `unit_scale` for conversion to g.

mod canonical;
mod dailysports;
mod hmpadl;
mod mhealth;
mod pamap2;

pub use canonical::{read_canonical, write_canonical};

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CadenceError, Result};
use crate::signal::{LabeledInterval, Recording};

/// Conversion from m/s² to g.
pub const MS2_TO_G: f64 = 1.0 / crate::signal::STANDARD_GRAVITY;

/// Supported source layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Pamap2,
    Mhealth,
    Hmpadl,
    DailySports,
    Canonical,
}

impl DatasetKind {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "pamap2" => Some(Self::Pamap2),
            "mhealth" => Some(Self::Mhealth),
            "hmpadl" => Some(Self::Hmpadl),
            "dailysports" => Some(Self::DailySports),
            "canonical" => Some(Self::Canonical),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Pamap2 => "pamap2",
            Self::Mhealth => "mhealth",
            Self::Hmpadl => "hmpadl",
            Self::DailySports => "dailysports",
            Self::Canonical => "canonical",
        }
    }
}

/// Static description of one source dataset: native rate, wrist-accelerometer
/// column indices, unit conversion, and the activity-code map.
///
/// The canonical layout carries rate and naming per file, so its descriptor
/// fields other than `kind` are unused.
#[derive(Debug, Clone)]
pub struct DatasetDescriptor {
    pub kind: DatasetKind,
    pub sample_rate_hz: f64,
    /// 0-indexed acceleration columns within a data row.
    pub acc_columns: [usize; 3],
    /// Multiplier converting native units to g.
    pub unit_scale: f64,
    /// Activity code → name, for layouts that label rows by integer code.
    pub activity_names: BTreeMap<u32, &'static str>,
}

impl DatasetDescriptor {
    pub fn for_kind(kind: DatasetKind) -> Self {
        match kind {
            DatasetKind::Pamap2 => Self {
                kind,
                sample_rate_hz: pamap2::SAMPLE_RATE_HZ,
                acc_columns: pamap2::ACC_COLUMNS,
                unit_scale: MS2_TO_G,
                activity_names: pamap2::ACTIVITY_NAMES.iter().copied().collect(),
            },
            DatasetKind::Mhealth => Self {
                kind,
                sample_rate_hz: mhealth::SAMPLE_RATE_HZ,
                acc_columns: mhealth::ACC_COLUMNS,
                unit_scale: MS2_TO_G,
                activity_names: mhealth::ACTIVITY_NAMES.iter().copied().collect(),
            },
            DatasetKind::Hmpadl => Self {
                kind,
                sample_rate_hz: hmpadl::SAMPLE_RATE_HZ,
                acc_columns: [0, 1, 2],
                // Codes are converted to g inside the parser.
                unit_scale: 1.0,
                activity_names: BTreeMap::new(),
            },
            DatasetKind::DailySports => Self {
                kind,
                sample_rate_hz: dailysports::SAMPLE_RATE_HZ,
                acc_columns: dailysports::RIGHT_ACC_COLUMNS,
                unit_scale: MS2_TO_G,
                activity_names: BTreeMap::new(),
            },
            DatasetKind::Canonical => Self {
                kind,
                sample_rate_hz: 0.0,
                acc_columns: [0, 1, 2],
                unit_scale: 1.0,
                activity_names: BTreeMap::new(),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let [a, b, c] = self.acc_columns;
        if a == b || b == c || a == c {
            return Err(CadenceError::InvalidConfig(
                "acceleration column indices must be distinct".into(),
            ));
        }
        Ok(())
    }
}

/// Parse every recording under `root` according to the descriptor's layout.
///
/// Streams are split at timestamp gaps longer than two native sample periods;
/// layouts without timestamps are gap-free by construction.
pub fn load_dataset(
    descriptor: &DatasetDescriptor,
    root: &Path,
) -> Result<Vec<(Recording, Vec<LabeledInterval>)>> {
    descriptor.validate()?;
    if !root.is_dir() {
        return Err(CadenceError::UnknownLayout(format!(
            "{} is not a directory",
            root.display()
        )));
    }
    match descriptor.kind {
        DatasetKind::Pamap2 => pamap2::load(descriptor, root),
        DatasetKind::Mhealth => mhealth::load(descriptor, root),
        DatasetKind::Hmpadl => hmpadl::load(descriptor, root),
        DatasetKind::DailySports => dailysports::load(descriptor, root),
        DatasetKind::Canonical => canonical::read_canonical(root),
    }
}

/// Sorted listing of regular files under `dir` whose name passes `keep`.
fn sorted_files(dir: &Path, keep: impl Fn(&str) -> bool) -> Result<Vec<std::path::PathBuf>> {
    let mut files = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| CadenceError::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| CadenceError::io(dir, e))?;
        let path = entry.path();
        let name = match path.file_name().and_then(|n| n.to_str()) {
            Some(n) => n.to_string(),
            None => continue,
        };
        if path.is_file() && keep(&name) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Sorted listing of subdirectories of `dir`.
fn sorted_dirs(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut dirs = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| CadenceError::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| CadenceError::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

/// Clamp an interval to its recording's time span, dropping it if empty.
fn clamp_interval(iv: LabeledInterval, rec: &Recording) -> Option<LabeledInterval> {
    let start = iv.start_ms.max(rec.start_time_ms);
    let end = iv.end_ms.min(rec.end_time_ms());
    (start < end).then_some(LabeledInterval {
        activity: iv.activity,
        start_ms: start,
        end_ms: end,
    })
}
