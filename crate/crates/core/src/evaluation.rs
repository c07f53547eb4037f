//! Event- and window-level precision/recall for salient-activity
//! segmentation against labeled intervals, plus the salient filter that
//! keeps only windows inside predicted segments.
//!
//! A predicted segment is *pure* when every moment of it carries one single
//! non-null activity: spanning two activities, touching `"null"`, or
//! covering unlabeled time all break purity. Event recall asks how many
//! non-null labeled events are touched by at least one segment (counted
//! once, however many segments touch them). Window-level versions weigh the
//! same questions by duration instead of by count. All interval arithmetic
//! is exact in integer milliseconds, so the metrics are invariant to
//! rescaling the time unit.

use std::collections::BTreeMap;

use crate::probe::EmbeddingSeries;
use crate::segmentation::SalientSegment;
use crate::signal::{LabeledInterval, Window, WINDOW_MS};

/// One row of a segmentation-evaluation report. Undefined ratios (zero
/// denominator) are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub activity: String,
    pub event_precision: Option<f64>,
    pub event_recall: Option<f64>,
    pub window_precision: Option<f64>,
    pub window_recall: Option<f64>,
}

/// Overall and per-activity precision/recall. Per-activity rows cover every
/// non-null activity present in the truth, sorted by name.
#[derive(Debug, Clone, PartialEq)]
pub struct SegEvalReport {
    pub overall: MetricRow,
    pub per_activity: Vec<MetricRow>,
}

const NULL_ACTIVITY: &str = "null";

fn overlap_ms(a0: i64, a1: i64, b0: i64, b1: i64) -> i64 {
    (a1.min(b1) - a0.max(b0)).max(0)
}

fn ratio(num: i64, den: i64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// How a predicted segment relates to the labeled truth: per-activity
/// overlap durations, with unlabeled time folded into `"null"`.
struct SegmentVerdict {
    duration_ms: i64,
    pure: bool,
    /// Majority activity; ties break to the lexicographically smaller name.
    attributed: String,
}

fn judge_segment(seg: &SalientSegment, truth: &[LabeledInterval]) -> SegmentVerdict {
    let duration_ms = seg.end_ms - seg.start_ms;
    let mut shares: BTreeMap<&str, i64> = BTreeMap::new();
    let mut labeled_ms = 0;
    for iv in truth {
        let ov = overlap_ms(seg.start_ms, seg.end_ms, iv.start_ms, iv.end_ms);
        if ov > 0 {
            *shares.entry(iv.activity.as_str()).or_insert(0) += ov;
            labeled_ms += ov;
        }
    }
    if labeled_ms < duration_ms {
        *shares.entry(NULL_ACTIVITY).or_insert(0) += duration_ms - labeled_ms;
    }
    let pure = shares.len() == 1
        && shares.keys().next().is_some_and(|a| *a != NULL_ACTIVITY);
    let attributed = shares
        .iter()
        .max_by_key(|(name, ms)| (**ms, std::cmp::Reverse(*name)))
        .map(|(name, _)| name.to_string())
        .expect("a segment always has at least a null share");
    SegmentVerdict { duration_ms, pure, attributed }
}

/// Event-level metrics for one subject's timeline: precision is the
/// fraction of predicted segments that are pure; recall is the fraction of
/// non-null labeled events overlapped by at least one segment. `None` where
/// the denominator is empty.
pub fn event_metrics(
    pred: &[SalientSegment],
    truth: &[LabeledInterval],
) -> (Option<f64>, Option<f64>) {
    let pure = pred
        .iter()
        .filter(|seg| judge_segment(seg, truth).pure)
        .count();
    let events: Vec<&LabeledInterval> =
        truth.iter().filter(|iv| iv.activity != NULL_ACTIVITY).collect();
    let hit = events
        .iter()
        .filter(|iv| {
            pred.iter()
                .any(|s| overlap_ms(s.start_ms, s.end_ms, iv.start_ms, iv.end_ms) > 0)
        })
        .count();
    (
        ratio(pure as i64, pred.len() as i64),
        ratio(hit as i64, events.len() as i64),
    )
}

/// Window-level metrics for one subject's timeline: precision is the share
/// of predicted duration lying in pure segments; recall is the share of
/// non-null labeled duration overlapped by predictions.
pub fn window_metrics(
    pred: &[SalientSegment],
    truth: &[LabeledInterval],
) -> (Option<f64>, Option<f64>) {
    let mut pred_ms = 0;
    let mut pure_ms = 0;
    for seg in pred {
        let verdict = judge_segment(seg, truth);
        pred_ms += verdict.duration_ms;
        if verdict.pure {
            pure_ms += verdict.duration_ms;
        }
    }
    let mut truth_ms = 0;
    let mut covered_ms = 0;
    for iv in truth.iter().filter(|iv| iv.activity != NULL_ACTIVITY) {
        truth_ms += iv.end_ms - iv.start_ms;
        covered_ms += covered_within(iv, pred);
    }
    (ratio(pure_ms, pred_ms), ratio(covered_ms, truth_ms))
}

/// Total time within `iv` overlapped by any segment, counting overlapping
/// segment regions once.
fn covered_within(iv: &LabeledInterval, pred: &[SalientSegment]) -> i64 {
    let mut spans: Vec<(i64, i64)> = pred
        .iter()
        .filter_map(|s| {
            let lo = s.start_ms.max(iv.start_ms);
            let hi = s.end_ms.min(iv.end_ms);
            (hi > lo).then_some((lo, hi))
        })
        .collect();
    spans.sort_unstable();
    let mut total = 0;
    let mut reach = i64::MIN;
    for (lo, hi) in spans {
        let lo = lo.max(reach);
        if hi > lo {
            total += hi - lo;
            reach = hi;
        }
    }
    total
}

/// Build the full report over many subjects. `truth` pairs each subject
/// with its labeled intervals; predictions are matched by `subject_id`.
/// Overall ratios aggregate counts and durations across subjects, never
/// averages of per-subject ratios.
pub fn seg_eval_report(
    pred: &[SalientSegment],
    truth: &[(String, Vec<LabeledInterval>)],
) -> SegEvalReport {
    struct Tally {
        pure_segments: i64,
        segments: i64,
        hit_events: i64,
        events: i64,
        pure_ms: i64,
        pred_ms: i64,
        covered_ms: i64,
        truth_ms: i64,
    }
    impl Tally {
        fn new() -> Self {
            Tally {
                pure_segments: 0,
                segments: 0,
                hit_events: 0,
                events: 0,
                pure_ms: 0,
                pred_ms: 0,
                covered_ms: 0,
                truth_ms: 0,
            }
        }
        fn row(&self, activity: &str) -> MetricRow {
            MetricRow {
                activity: activity.to_string(),
                event_precision: ratio(self.pure_segments, self.segments),
                event_recall: ratio(self.hit_events, self.events),
                window_precision: ratio(self.pure_ms, self.pred_ms),
                window_recall: ratio(self.covered_ms, self.truth_ms),
            }
        }
    }

    // Merge duplicate subject entries, and give subjects that appear only
    // in the predictions an empty truth so their segments still count
    // (impure) toward the overall row.
    let mut by_subject: BTreeMap<&str, Vec<LabeledInterval>> = BTreeMap::new();
    for (subject, intervals) in truth {
        by_subject
            .entry(subject.as_str())
            .or_default()
            .extend(intervals.iter().cloned());
    }
    for s in pred {
        by_subject.entry(s.subject_id.as_str()).or_default();
    }

    let mut overall = Tally::new();
    let mut by_activity: BTreeMap<String, Tally> = BTreeMap::new();
    for (subject, intervals) in &by_subject {
        for iv in intervals.iter().filter(|iv| iv.activity != NULL_ACTIVITY) {
            by_activity.entry(iv.activity.clone()).or_insert_with(Tally::new);
        }
        let subject_pred: Vec<SalientSegment> = pred
            .iter()
            .filter(|s| s.subject_id == **subject)
            .cloned()
            .collect();

        for seg in &subject_pred {
            let verdict = judge_segment(seg, intervals);
            overall.segments += 1;
            overall.pred_ms += verdict.duration_ms;
            if verdict.pure {
                overall.pure_segments += 1;
                overall.pure_ms += verdict.duration_ms;
            }
            if verdict.attributed != NULL_ACTIVITY {
                let t = by_activity
                    .entry(verdict.attributed.clone())
                    .or_insert_with(Tally::new);
                t.segments += 1;
                t.pred_ms += verdict.duration_ms;
                if verdict.pure {
                    t.pure_segments += 1;
                    t.pure_ms += verdict.duration_ms;
                }
            }
        }
        for iv in intervals.iter().filter(|iv| iv.activity != NULL_ACTIVITY) {
            let hit = subject_pred
                .iter()
                .any(|s| overlap_ms(s.start_ms, s.end_ms, iv.start_ms, iv.end_ms) > 0);
            let covered = covered_within(iv, &subject_pred);
            let t = by_activity.get_mut(&iv.activity).expect("row created above");
            for tally in [&mut overall, t] {
                tally.events += 1;
                tally.truth_ms += iv.end_ms - iv.start_ms;
                tally.covered_ms += covered;
                if hit {
                    tally.hit_events += 1;
                }
            }
        }
    }

    SegEvalReport {
        overall: overall.row("overall"),
        per_activity: by_activity
            .iter()
            .map(|(activity, tally)| tally.row(activity))
            .collect(),
    }
}

/// Keep exactly the windows lying fully inside one of the (disjoint)
/// segments of the same subject, preserving input order.
pub fn salient_filter(windows: &[Window], segments: &[SalientSegment]) -> Vec<Window> {
    windows
        .iter()
        .filter(|w| window_inside(&w.subject_id, w.start_time_ms, segments))
        .cloned()
        .collect()
}

/// The same containment filter over an embedding series.
pub fn salient_filter_series(
    series: &EmbeddingSeries,
    segments: &[SalientSegment],
) -> EmbeddingSeries {
    let records = series
        .records()
        .iter()
        .filter(|r| window_inside(&r.subject_id, r.start_time_ms, segments))
        .cloned()
        .collect();
    EmbeddingSeries::new(records).expect("filtering preserves series validity")
}

fn window_inside(subject: &str, start_ms: i64, segments: &[SalientSegment]) -> bool {
    segments.iter().any(|s| {
        s.subject_id == subject && s.start_ms <= start_ms && start_ms + WINDOW_MS <= s.end_ms
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn seg(subject: &str, start_ms: i64, end_ms: i64) -> SalientSegment {
        SalientSegment { subject_id: subject.into(), start_ms, end_ms, salience: 1.0 }
    }

    fn hand_case() -> (Vec<SalientSegment>, Vec<LabeledInterval>) {
        let truth = vec![
            LabeledInterval::new("A", 0, 100),
            LabeledInterval::new("null", 100, 200),
            LabeledInterval::new("B", 200, 300),
        ];
        let pred = vec![seg("s1", 0, 100), seg("s1", 180, 280)];
        (pred, truth)
    }

    #[test]
    fn perfect_predictions_score_one_everywhere() {
        let truth = vec![
            LabeledInterval::new("walk", 0, 60_000),
            LabeledInterval::new("null", 60_000, 90_000),
            LabeledInterval::new("run", 90_000, 150_000),
        ];
        let pred = vec![seg("s1", 0, 60_000), seg("s1", 90_000, 150_000)];
        assert_eq!(event_metrics(&pred, &truth), (Some(1.0), Some(1.0)));
        assert_eq!(window_metrics(&pred, &truth), (Some(1.0), Some(1.0)));
    }

    #[test]
    fn null_spanning_segment_halves_event_precision() {
        let (pred, truth) = hand_case();
        let (precision, recall) = event_metrics(&pred, &truth);
        assert_eq!(precision, Some(0.5));
        assert_eq!(recall, Some(1.0));
    }

    #[test]
    fn hand_case_window_metrics_match_duration_counting() {
        let (pred, truth) = hand_case();
        let (precision, recall) = window_metrics(&pred, &truth);
        assert_eq!(precision, Some(0.5));
        assert_eq!(recall, Some(0.9));
    }

    #[test]
    fn empty_predictions_leave_precision_undefined() {
        let (_, truth) = hand_case();
        let (ep, er) = event_metrics(&[], &truth);
        assert_eq!((ep, er), (None, Some(0.0)));
        let (wp, wr) = window_metrics(&[], &truth);
        assert_eq!((wp, wr), (None, Some(0.0)));
    }

    #[test]
    fn truth_without_events_leaves_recall_undefined() {
        let pred = vec![seg("s1", 0, 50)];
        let all_null = vec![LabeledInterval::new("null", 0, 100)];
        assert_eq!(event_metrics(&pred, &all_null), (Some(0.0), None));
        assert_eq!(window_metrics(&pred, &all_null), (Some(0.0), None));
        assert_eq!(event_metrics(&pred, &[]), (Some(0.0), None));
    }

    #[test]
    fn uncovered_time_counts_as_null_for_purity() {
        // Truth labels only [0, 80); the segment runs to 100, so its tail
        // is unlabeled and the segment is impure.
        let truth = vec![LabeledInterval::new("A", 0, 80)];
        let pred = vec![seg("s1", 0, 100)];
        let (precision, _) = event_metrics(&pred, &truth);
        assert_eq!(precision, Some(0.0));
    }

    #[test]
    fn an_event_touched_by_many_segments_is_recalled_once() {
        let truth = vec![LabeledInterval::new("A", 0, 100), LabeledInterval::new("B", 100, 200)];
        let pred = vec![seg("s1", 0, 40), seg("s1", 50, 90), seg("s1", 95, 105)];
        let (_, recall) = event_metrics(&pred, &truth);
        assert_eq!(recall, Some(1.0));
        // Covered A time: [0,40) + [50,90) + [95,100) = 85; covered B time:
        // [100,105) = 5; recall = 90/200.
        let (_, window_recall) = window_metrics(&pred, &truth);
        assert_eq!(window_recall, Some(0.45));
    }

    #[test]
    fn metrics_ignore_input_ordering() {
        let (mut pred, mut truth) = hand_case();
        let base_event = event_metrics(&pred, &truth);
        let base_window = window_metrics(&pred, &truth);
        pred.reverse();
        truth.reverse();
        assert_eq!(event_metrics(&pred, &truth), base_event);
        assert_eq!(window_metrics(&pred, &truth), base_window);
    }

    #[test]
    fn doubling_the_time_unit_changes_nothing() {
        let (pred, truth) = hand_case();
        let pred2: Vec<SalientSegment> = pred
            .iter()
            .map(|s| seg(&s.subject_id, s.start_ms * 2, s.end_ms * 2))
            .collect();
        let truth2: Vec<LabeledInterval> = truth
            .iter()
            .map(|iv| LabeledInterval::new(&iv.activity, iv.start_ms * 2, iv.end_ms * 2))
            .collect();
        assert_eq!(event_metrics(&pred, &truth), event_metrics(&pred2, &truth2));
        assert_eq!(window_metrics(&pred, &truth), window_metrics(&pred2, &truth2));
    }

    /// Millisecond-grid oracle: paint every ms cell with its activity (or
    /// null), then count cells and segments directly.
    fn grid_metrics(
        pred: &[SalientSegment],
        truth: &[LabeledInterval],
        horizon: usize,
    ) -> ((Option<f64>, Option<f64>), (Option<f64>, Option<f64>)) {
        let mut cells: Vec<Option<&str>> = vec![None; horizon];
        for iv in truth {
            for cell in cells[iv.start_ms as usize..iv.end_ms as usize].iter_mut() {
                *cell = Some(iv.activity.as_str());
            }
        }
        let pure = |s: &SalientSegment| {
            let mut names: Vec<&str> = cells[s.start_ms as usize..s.end_ms as usize]
                .iter()
                .map(|c| c.unwrap_or(NULL_ACTIVITY))
                .collect();
            names.dedup();
            names.len() == 1 && names[0] != NULL_ACTIVITY
        };
        let pure_count = pred.iter().filter(|s| pure(s)).count();
        let events: Vec<&LabeledInterval> =
            truth.iter().filter(|iv| iv.activity != NULL_ACTIVITY).collect();
        let hit = events
            .iter()
            .filter(|iv| {
                (iv.start_ms..iv.end_ms).any(|t| {
                    pred.iter().any(|s| s.start_ms <= t && t < s.end_ms)
                })
            })
            .count();
        let event = (
            ratio(pure_count as i64, pred.len() as i64),
            ratio(hit as i64, events.len() as i64),
        );

        let mut pred_cells = 0i64;
        let mut pure_cells = 0i64;
        for s in pred {
            pred_cells += s.end_ms - s.start_ms;
            if pure(s) {
                pure_cells += s.end_ms - s.start_ms;
            }
        }
        let mut truth_cells = 0i64;
        let mut covered_cells = 0i64;
        for iv in &events {
            for t in iv.start_ms..iv.end_ms {
                truth_cells += 1;
                if pred.iter().any(|s| s.start_ms <= t && t < s.end_ms) {
                    covered_cells += 1;
                }
            }
        }
        let window = (ratio(pure_cells, pred_cells), ratio(covered_cells, truth_cells));
        (event, window)
    }

    #[test]
    fn random_cases_match_the_cell_enumeration_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..200 {
            let horizon = 300usize;
            let mut truth = Vec::new();
            let mut at = 0i64;
            while at < horizon as i64 - 10 {
                let len = rng.gen_range(10..60);
                let end = (at + len).min(horizon as i64);
                let name = ["A", "B", "C", "null"][rng.gen_range(0..4)];
                truth.push(LabeledInterval::new(name, at, end));
                at = end + rng.gen_range(0..20);
            }
            let pred: Vec<SalientSegment> = (0..rng.gen_range(0..6))
                .map(|_| {
                    let start = rng.gen_range(0..(horizon as i64 - 20));
                    let end = rng.gen_range(start + 5..=(start + 80).min(horizon as i64));
                    seg("s1", start, end)
                })
                .collect();
            // Overlapping random segments would double-count durations; the
            // real pipeline guarantees disjoint segments, so enforce that.
            let mut disjoint: Vec<SalientSegment> = Vec::new();
            for s in pred {
                if !disjoint
                    .iter()
                    .any(|d| overlap_ms(d.start_ms, d.end_ms, s.start_ms, s.end_ms) > 0)
                {
                    disjoint.push(s);
                }
            }
            let (oracle_event, oracle_window) = grid_metrics(&disjoint, &truth, horizon);
            assert_eq!(event_metrics(&disjoint, &truth), oracle_event);
            let (wp, wr) = window_metrics(&disjoint, &truth);
            assert_eq!(wp, oracle_window.0);
            match (wr, oracle_window.1) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
                (a, b) => assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn report_attributes_segments_to_their_majority_activity() {
        let (pred, truth) = hand_case();
        let report = seg_eval_report(&pred, &[("s1".to_string(), truth)]);

        assert_eq!(report.overall.event_precision, Some(0.5));
        assert_eq!(report.overall.event_recall, Some(1.0));
        assert_eq!(report.overall.window_precision, Some(0.5));
        assert_eq!(report.overall.window_recall, Some(0.9));

        let names: Vec<&str> =
            report.per_activity.iter().map(|r| r.activity.as_str()).collect();
        assert_eq!(names, vec!["A", "B"]);

        let a = &report.per_activity[0];
        assert_eq!(a.event_precision, Some(1.0));
        assert_eq!(a.event_recall, Some(1.0));
        assert_eq!(a.window_precision, Some(1.0));
        assert_eq!(a.window_recall, Some(1.0));

        // [180,280) overlaps null by 20 ms and B by 80 ms, so it belongs to
        // B's row: impure, but it does recall B's event and 80 of its 100.
        let b = &report.per_activity[1];
        assert_eq!(b.event_precision, Some(0.0));
        assert_eq!(b.event_recall, Some(1.0));
        assert_eq!(b.window_precision, Some(0.0));
        assert_eq!(b.window_recall, Some(0.8));
    }

    #[test]
    fn report_covers_every_present_activity_even_without_segments() {
        let truth = vec![
            LabeledInterval::new("walk", 0, 100),
            LabeledInterval::new("swim", 100, 200),
        ];
        let pred = vec![seg("s1", 0, 100)];
        let report = seg_eval_report(&pred, &[("s1".to_string(), truth)]);
        let swim = report
            .per_activity
            .iter()
            .find(|r| r.activity == "swim")
            .expect("swim row present");
        assert_eq!(swim.event_precision, None);
        assert_eq!(swim.event_recall, Some(0.0));
        assert_eq!(swim.window_recall, Some(0.0));
    }

    #[test]
    fn report_keeps_subjects_apart() {
        // Identical clocks, different subjects: s1's segment must not
        // recall s2's event.
        let truth = vec![
            ("s1".to_string(), vec![LabeledInterval::new("A", 0, 100)]),
            ("s2".to_string(), vec![LabeledInterval::new("A", 0, 100)]),
        ];
        let pred = vec![seg("s1", 0, 100)];
        let report = seg_eval_report(&pred, &truth);
        assert_eq!(report.overall.event_recall, Some(0.5));
        assert_eq!(report.overall.event_precision, Some(1.0));
        assert_eq!(report.overall.window_recall, Some(0.5));
    }

    #[test]
    fn segments_for_subjects_without_truth_count_as_impure() {
        let truth = vec![("s1".to_string(), vec![LabeledInterval::new("A", 0, 100)])];
        let pred = vec![seg("s1", 0, 100), seg("ghost", 0, 100)];
        let report = seg_eval_report(&pred, &truth);
        assert_eq!(report.overall.event_precision, Some(0.5));
        assert_eq!(report.overall.window_precision, Some(0.5));
        assert_eq!(report.overall.event_recall, Some(1.0));
    }

    #[test]
    fn all_values_stay_within_the_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..50 {
            let truth: Vec<LabeledInterval> = (0..rng.gen_range(1..5))
                .map(|i| {
                    let start = i * 100;
                    LabeledInterval::new(
                        ["A", "B", "null"][rng.gen_range(0..3)],
                        start,
                        start + rng.gen_range(10..100),
                    )
                })
                .collect();
            let mut pred = Vec::new();
            let mut at = 0;
            for _ in 0..rng.gen_range(0..4) {
                let start = at + rng.gen_range(0..50);
                let end = start + rng.gen_range(30..120);
                pred.push(seg("s1", start, end));
                at = end;
            }
            let report = seg_eval_report(&pred, &[("s1".to_string(), truth)]);
            let mut rows = vec![&report.overall];
            rows.extend(report.per_activity.iter());
            for row in rows {
                for v in [
                    row.event_precision,
                    row.event_recall,
                    row.window_precision,
                    row.window_recall,
                ]
                .into_iter()
                .flatten()
                {
                    assert!((0.0..=1.0).contains(&v), "{row:?}");
                }
            }
        }
    }

    fn grid_windows(count: usize) -> Vec<Window> {
        (0..count)
            .map(|i| Window {
                subject_id: "s1".into(),
                start_time_ms: i as i64 * WINDOW_MS,
                data: vec![[0.0, 0.0, 1.0]; 4],
                label: None,
            })
            .collect()
    }

    #[test]
    fn filter_keeps_exactly_the_windows_inside_segments() {
        let windows = grid_windows(30);
        let segments = vec![
            seg("s1", 5 * WINDOW_MS, 15 * WINDOW_MS),
            seg("s1", 20 * WINDOW_MS, 25 * WINDOW_MS),
        ];
        let kept = salient_filter(&windows, &segments);
        assert_eq!(kept.len(), 15);
        let indices: Vec<i64> = kept.iter().map(|w| w.start_time_ms / WINDOW_MS).collect();
        let expected: Vec<i64> = (5..15).chain(20..25).collect();
        assert_eq!(indices, expected);
    }

    #[test]
    fn filter_respects_partial_overlap_and_subjects() {
        let mut windows = grid_windows(4);
        windows[3].subject_id = "s2".into();
        // Window 1 pokes 1 ms past the segment end; window 3 matches the
        // span but belongs to another subject.
        let segments = vec![seg("s1", 0, 2 * WINDOW_MS - 1), seg("s1", 3 * WINDOW_MS, 4 * WINDOW_MS)];
        let kept = salient_filter(&windows, &segments);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].start_time_ms, 0);
    }

    #[test]
    fn empty_segments_drop_everything_and_full_cover_keeps_everything() {
        let windows = grid_windows(10);
        assert!(salient_filter(&windows, &[]).is_empty());
        let all = vec![seg("s1", 0, 10 * WINDOW_MS)];
        let kept = salient_filter(&windows, &all);
        assert_eq!(kept.len(), 10);
        assert_eq!(kept, windows);
    }

    #[test]
    fn series_filter_applies_the_same_rule() {
        use crate::probe::EmbeddingRecord;
        let records: Vec<EmbeddingRecord> = (0..10)
            .map(|i| EmbeddingRecord {
                subject_id: "s1".into(),
                start_time_ms: i as i64 * WINDOW_MS,
                vector: vec![i as f32, 1.0],
                label: Some("walk".into()),
            })
            .collect();
        let series = EmbeddingSeries::new(records).unwrap();
        let segments = vec![seg("s1", 2 * WINDOW_MS, 6 * WINDOW_MS)];
        let kept = salient_filter_series(&series, &segments);
        assert_eq!(kept.len(), 4);
        assert_eq!(kept.records()[0].vector[0], 2.0);
        assert_eq!(kept.records()[3].vector[0], 5.0);
    }
}
