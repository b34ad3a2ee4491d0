use pace_core::expression::{LaughEvent, LaughSource};
use pace_core::io::{read_au_csv, timeline_from_json, timeline_to_json, write_au_csv};
use pace_core::{validate_timeline, AuFrame, AuSeries, Cause, PlaybackState, PunchlineSegment, SpeedCommand, Timeline};
use proptest::prelude::*;

fn arb_timeline() -> impl Strategy<Value = Timeline> {
    (prop::collection::vec((0.0f64..10.0, 0.001f64..5.0), 0..10), 0.0f64..10.0).prop_map(|(segs, tail)| {
        let mut t = 0.0;
        let segments: Vec<PunchlineSegment> = segs
            .into_iter()
            .map(|(gap, len)| {
                let start = t + gap;
                t = start + len;
                PunchlineSegment { start, end: t }
            })
            .collect();
        Timeline { media_duration: t + tail + 0.001, segments }
    })
}

fn roundtrip<T: serde::Serialize + serde::de::DeserializeOwned + PartialEq + std::fmt::Debug>(v: &T) -> Result<(), TestCaseError> {
    let back: T = serde_json::from_str(&serde_json::to_string(v).unwrap()).unwrap();
    prop_assert_eq!(&back, v);
    Ok(())
}

proptest! {
    #[test]
    fn validation_is_idempotent(tl in arb_timeline()) {
        let once = validate_timeline(tl.clone()).unwrap();
        prop_assert_eq!(&once, &tl);
        prop_assert_eq!(validate_timeline(once.clone()).unwrap(), once);
    }

    #[test]
    fn overlapping_segments_rejected(tl in arb_timeline(), i in any::<prop::sample::Index>()) {
        prop_assume!(tl.segments.len() >= 2);
        let mut bad = tl.clone();
        let k = i.index(bad.segments.len() - 1);
        bad.segments[k].end = bad.segments[k + 1].start + 1e-3;
        bad.segments[k + 1].end = bad.segments[k + 1].end.max(bad.segments[k].end + 1e-3);
        prop_assert!(validate_timeline(bad).is_err());
    }

    #[test]
    fn timeline_json_roundtrip(tl in arb_timeline()) {
        prop_assert_eq!(timeline_from_json(&timeline_to_json(&tl)).unwrap(), tl.clone());
        roundtrip(&tl)?;
    }

    #[test]
    fn core_types_roundtrip(t in 0.0f64..1e4, v in 0.0f64..5.0, rate in prop::sample::select(vec![0.6, 0.7, 0.8, 0.9, 1.0]), laughed in any::<bool>(), seen in any::<u32>(), marker in any::<bool>()) {
        roundtrip(&AuFrame::new(t, v))?;
        roundtrip(&PlaybackState { rate, punchlines_seen: seen })?;
        roundtrip(&SpeedCommand { t, rate, cause: Cause::from_laughed(laughed) })?;
        let ev = if marker {
            LaughEvent::marker(t)
        } else {
            LaughEvent { start: t, end: t + 0.5, peak_au14: v, source: LaughSource::Au }
        };
        roundtrip(&ev)?;
    }

    #[test]
    fn au_csv_roundtrip(values in prop::collection::vec(0.0f64..5.0, 0..200)) {
        let series = AuSeries::new(values.iter().enumerate().map(|(i, &v)| AuFrame::new(i as f64 * 0.033, v)).collect()).unwrap();
        let (back, warnings) = read_au_csv(&write_au_csv(&series)).unwrap();
        prop_assert!(warnings.is_empty());
        prop_assert_eq!(back, series);
    }
}

#[test]
fn timeline_examples() {
    let seg = |a, b| PunchlineSegment { start: a, end: b };
    let ok = Timeline { media_duration: 10.0, segments: vec![seg(2.0, 4.0), seg(6.0, 7.0)] };
    assert_eq!(validate_timeline(ok.clone()).unwrap(), ok);
    assert!(validate_timeline(Timeline { media_duration: 10.0, segments: vec![seg(2.0, 4.0), seg(3.0, 5.0)] }).is_err());
    assert!(validate_timeline(Timeline { media_duration: 10.0, segments: vec![seg(9.0, 11.0)] }).is_err());
    assert!(validate_timeline(Timeline { media_duration: 10.0, segments: vec![] }).is_ok());
}

#[test]
fn marker_peak_serializes_as_null() {
    let v = serde_json::to_value(LaughEvent::marker(3.0)).unwrap();
    assert!(v["peak_au14"].is_null());
    assert_eq!(v["source"], "marker");
}
