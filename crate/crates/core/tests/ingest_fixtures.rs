//! Layout-fixture tests for the four dataset adapters. The fixtures under
//! `tests/fixtures/` are synthetic files mimicking each archive's directory
//! structure and row format (see `generate.py` there).

use std::path::PathBuf;

use cadence_core::ingest::{load_dataset, read_canonical, write_canonical, DatasetDescriptor, DatasetKind};
use cadence_core::{CadenceError, LabeledInterval, Recording};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn load(kind: DatasetKind, name: &str) -> Vec<(Recording, Vec<LabeledInterval>)> {
    let desc = DatasetDescriptor::for_kind(kind);
    load_dataset(&desc, &fixture(name)).unwrap()
}

fn assert_intervals_within_span(recs: &[(Recording, Vec<LabeledInterval>)]) {
    for (rec, intervals) in recs {
        for iv in intervals {
            assert!(iv.start_ms < iv.end_ms);
            assert!(iv.start_ms >= rec.start_time_ms, "{iv:?} before {}", rec.start_time_ms);
            assert!(iv.end_ms <= rec.end_time_ms(), "{iv:?} past {}", rec.end_time_ms());
        }
    }
}

#[test]
fn pamap2_fixture_parses_with_gap_split_and_nan_drop() {
    let recs = load(DatasetKind::Pamap2, "pamap2");
    // subject101 splits at the planted timestamp gap; subject102 is contiguous.
    assert_eq!(recs.len(), 3);
    let subjects: Vec<&str> = recs.iter().map(|(r, _)| r.subject_id.as_str()).collect();
    assert_eq!(subjects, vec!["101", "101", "102"]);
    for (rec, _) in &recs {
        assert_eq!(rec.sample_rate_hz, 100.0);
        assert_eq!(rec.device_id, "hand");
    }
    // 3 NaN rows dropped: 2 before the gap, 1 after.
    assert_eq!(recs[0].0.samples.len(), 398);
    assert_eq!(recs[1].0.samples.len(), 199);
    assert_eq!(recs[2].0.samples.len(), 300);
    assert_eq!(recs[0].0.start_time_ms, 8380);

    let names: Vec<&str> = recs[0].1.iter().map(|iv| iv.activity.as_str()).collect();
    assert_eq!(names, vec!["null", "walking", "running"]);
    assert_eq!(recs[1].1.len(), 1);
    assert_eq!(recs[1].1[0].activity, "running");
    assert_eq!(recs[2].1[0].activity, "sitting");
    assert_intervals_within_span(&recs);

    // Values are m/s²-scale; unit_scale brings them to g.
    let max_abs = recs[0]
        .0
        .samples
        .iter()
        .flat_map(|s| s.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(max_abs > 5.0 && max_abs < 20.0);
    assert!((recs[0].0.unit_scale - 1.0 / 9.80665).abs() < 1e-15);
}

#[test]
fn mhealth_fixture_parses_labels_by_index() {
    let recs = load(DatasetKind::Mhealth, "mhealth");
    assert_eq!(recs.len(), 2);
    let (rec1, iv1) = &recs[0];
    assert_eq!(rec1.subject_id, "1");
    assert_eq!(rec1.sample_rate_hz, 50.0);
    assert_eq!(rec1.samples.len(), 500);
    assert_eq!(
        iv1.iter()
            .map(|iv| (iv.activity.as_str(), iv.start_ms, iv.end_ms))
            .collect::<Vec<_>>(),
        vec![("null", 0, 2000), ("walking", 2000, 7000), ("running", 7000, 10_000)]
    );
    let (rec2, iv2) = &recs[1];
    assert_eq!(rec2.subject_id, "2");
    assert_eq!(rec2.samples.len(), 300);
    assert_eq!(iv2.len(), 1);
    assert_eq!(iv2[0].activity, "sitting");
    assert_intervals_within_span(&recs);
}

#[test]
fn hmpadl_fixture_converts_codes_to_g() {
    let recs = load(DatasetKind::Hmpadl, "hmpadl");
    assert_eq!(recs.len(), 3);
    let (rec, ivs) = &recs[0];
    assert_eq!(rec.subject_id, "f1");
    assert_eq!(rec.sample_rate_hz, 32.0);
    assert_eq!(rec.samples.len(), 160);
    assert_eq!(rec.unit_scale, 1.0);
    assert_eq!(rec.start_time_ms, 1_302_528_498_000);
    assert_eq!(ivs[0].activity, "brush_teeth");
    for s in &rec.samples {
        for v in s {
            assert!((-1.5..=1.5).contains(v));
        }
    }
    assert_eq!(recs[1].0.start_time_ms, 1_306_752_060_000);
    assert_eq!(recs[1].0.samples.len(), 256);
    assert_eq!(recs[2].0.subject_id, "m1");
    assert_eq!(recs[1].1[0].activity, "walk");
    assert_intervals_within_span(&recs);
}

#[test]
fn dailysports_fixture_concatenates_segments_per_wrist() {
    let recs = load(DatasetKind::DailySports, "dailysports");
    assert_eq!(recs.len(), 6);
    let summary: Vec<(&str, &str, usize, i64, &str)> = recs
        .iter()
        .map(|(r, ivs)| {
            (
                r.subject_id.as_str(),
                r.device_id.as_str(),
                r.samples.len(),
                r.start_time_ms,
                ivs[0].activity.as_str(),
            )
        })
        .collect();
    assert_eq!(
        summary,
        vec![
            ("p1", "right_wrist", 250, 0, "sitting"),
            ("p1", "left_wrist", 250, 0, "sitting"),
            ("p2", "right_wrist", 125, 0, "sitting"),
            ("p2", "left_wrist", 125, 0, "sitting"),
            ("p1", "right_wrist", 125, 3_600_000, "standing"),
            ("p1", "left_wrist", 125, 3_600_000, "standing"),
        ]
    );
    for (rec, _) in &recs {
        assert_eq!(rec.sample_rate_hz, 25.0);
    }
    assert_intervals_within_span(&recs);
}

#[test]
fn parsing_is_deterministic() {
    let a = load(DatasetKind::Pamap2, "pamap2");
    let b = load(DatasetKind::Pamap2, "pamap2");
    assert_eq!(a, b);
}

#[test]
fn malformed_row_reports_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("subject900.dat");
    let mut rows = String::new();
    for i in 0..5 {
        let t = 1.0 + i as f64 * 0.01;
        let acc = if i == 3 { "oops" } else { "0.1" };
        rows.push_str(&format!(
            "{t:.2} 1 NaN 30.0 {acc} 0.2 9.8 {}\n",
            vec!["0.0"; 47].join(" ")
        ));
    }
    std::fs::write(&path, rows).unwrap();
    let desc = DatasetDescriptor::for_kind(DatasetKind::Pamap2);
    match load_dataset(&desc, dir.path()) {
        Err(CadenceError::RecordParse { file, line, .. }) => {
            assert!(file.ends_with("subject900.dat"));
            assert_eq!(line, 4);
        }
        other => panic!("expected RecordParse, got {other:?}"),
    }
}

#[test]
fn missing_layout_is_unknown_layout() {
    let dir = tempfile::tempdir().unwrap();
    let desc = DatasetDescriptor::for_kind(DatasetKind::Mhealth);
    assert!(matches!(
        load_dataset(&desc, dir.path()),
        Err(CadenceError::UnknownLayout(_))
    ));
}

#[test]
fn parsed_recordings_round_trip_through_canonical() {
    let recs = load(DatasetKind::Pamap2, "pamap2");
    let dir = tempfile::tempdir().unwrap();
    for (rec, ivs) in &recs {
        write_canonical(rec, ivs, dir.path()).unwrap();
    }
    let back = read_canonical(dir.path()).unwrap();
    assert_eq!(back.len(), recs.len());
    for (rec, ivs) in &recs {
        let key = rec.start_time_ms;
        let (got, got_ivs) = back
            .iter()
            .find(|(r, _)| r.start_time_ms == key && r.subject_id == rec.subject_id)
            .unwrap();
        assert_eq!(got.samples.len(), rec.samples.len());
        assert_eq!(got_ivs, ivs);
        for (a, b) in rec.samples.iter().zip(&got.samples) {
            for k in 0..3 {
                assert_eq!(b[k], a[k] * rec.unit_scale);
            }
        }
    }
}
