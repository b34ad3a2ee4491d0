use pace_core::expression::{
    decide_punchline_response, detect_laugh_events, Baseline, LaughEvent, LaughParams, LaughSource,
};
use pace_core::{AuFrame, AuSeries, PunchlineSegment, Timeline};
use proptest::prelude::*;

fn series(values: &[f64]) -> AuSeries {
    let mut s = AuSeries::new(values.iter().enumerate().map(|(i, &v)| AuFrame::new(i as f64 / 30.0, v)).collect()).unwrap();
    s.sample_rate_hint = Some(30.0);
    s
}

/// Time covered by events.
fn covered(events: &[LaughEvent]) -> f64 {
    events.iter().map(|e| e.end - e.start).sum()
}

/// Segments and events on a quarter-second grid so shifts are exact.
fn arb_case() -> impl Strategy<Value = (Timeline, Vec<LaughEvent>)> {
    (
        prop::collection::vec((1u32..40, 1u32..16), 0..8),
        prop::collection::vec((0u32..400, 0u32..8), 0..10),
    )
        .prop_map(|(segs, evs)| {
            let mut t = 0.0;
            let segments: Vec<PunchlineSegment> = segs
                .into_iter()
                .map(|(gap, len)| {
                    let start = t + gap as f64 * 0.25;
                    t = start + len as f64 * 0.25;
                    PunchlineSegment { start, end: t }
                })
                .collect();
            let mut events: Vec<LaughEvent> = evs
                .into_iter()
                .map(|(s, len)| LaughEvent {
                    start: s as f64 * 0.25,
                    end: (s + len) as f64 * 0.25,
                    peak_au14: 1.0 + s as f64 / 100.0,
                    source: LaughSource::Au,
                })
                .collect();
            events.sort_by(|a, b| a.start.total_cmp(&b.start));
            (Timeline { media_duration: t + 5.0, segments }, events)
        })
}

proptest! {
    #[test]
    fn held_time_shrinks_as_threshold_rises(values in prop::collection::vec(0.0f64..3.0, 1..300), k in 0.5f64..4.0, dk in 0.0f64..3.0) {
        let s = series(&values);
        let base = Baseline { mu: 0.5, sigma: 0.3 };
        let lo = LaughParams { k_sigma: k, ..LaughParams::default() };
        let hi = LaughParams { k_sigma: k + dk, ..lo };
        prop_assert!(covered(&detect_laugh_events(&s, &base, &hi)) <= covered(&detect_laugh_events(&s, &base, &lo)) + 1e-9);
    }

    #[test]
    fn event_count_monotone_for_single_peaks(rise in 1usize..60, fall in 1usize..60, peak in 0.6f64..3.0, k in 0.5f64..4.0, dk in 0.0f64..3.0) {
        // One unimodal excursion cannot split as the threshold rises.
        let mut values = vec![0.0; 20];
        values.extend((1..=rise).map(|i| peak * i as f64 / rise as f64));
        values.extend((1..=fall).rev().map(|i| peak * (i - 1) as f64 / fall as f64));
        values.extend(vec![0.0; 20]);
        let s = series(&values);
        let base = Baseline { mu: 0.2, sigma: 0.1 };
        let lo = LaughParams { k_sigma: k, ..LaughParams::default() };
        let hi = LaughParams { k_sigma: k + dk, ..lo };
        prop_assert!(detect_laugh_events(&s, &base, &hi).len() <= detect_laugh_events(&s, &base, &lo).len());
    }

    #[test]
    fn one_response_per_segment_in_order((tl, events) in arb_case()) {
        let out = decide_punchline_response(&tl, &events, &LaughParams::default());
        prop_assert_eq!(out.len(), tl.segments.len());
        for (r, s) in out.iter().zip(&tl.segments) {
            prop_assert_eq!(r.segment, *s);
            prop_assert_eq!(r.laughed, r.evidence.is_some());
        }
    }

    #[test]
    fn responses_are_translation_invariant((tl, events) in arb_case(), shift in -40i32..40) {
        let dt = shift as f64 * 0.25;
        let moved = Timeline {
            media_duration: tl.media_duration + dt,
            segments: tl.segments.iter().map(|s| s.shifted(dt)).collect(),
        };
        let moved_events: Vec<LaughEvent> = events.iter().map(|e| e.shifted(dt)).collect();
        let p = LaughParams::default();
        let a: Vec<bool> = decide_punchline_response(&tl, &events, &p).iter().map(|r| r.laughed).collect();
        let b: Vec<bool> = decide_punchline_response(&moved, &moved_events, &p).iter().map(|r| r.laughed).collect();
        prop_assert_eq!(a, b);
    }
}

/// Raising the threshold can split one run into two qualifying runs, so the
/// count alone is not monotone in k_sigma.
#[test]
fn higher_threshold_can_split_a_run() {
    let mut values = vec![0.0; 10];
    values.extend(vec![3.0; 10]);
    values.extend(vec![1.5; 3]);
    values.extend(vec![3.0; 10]);
    values.extend(vec![0.0; 10]);
    let s = series(&values);
    let base = Baseline { mu: 0.0, sigma: 0.1 };
    let low = LaughParams { k_sigma: 10.0, ..LaughParams::default() };
    let high = LaughParams { k_sigma: 20.0, ..LaughParams::default() };
    assert_eq!(detect_laugh_events(&s, &base, &low).len(), 1);
    assert_eq!(detect_laugh_events(&s, &base, &high).len(), 2);
}

#[test]
fn window_examples() {
    let tl = Timeline { media_duration: 10.0, segments: vec![PunchlineSegment { start: 2.0, end: 3.0 }] };
    let ev = |a, b| LaughEvent { start: a, end: b, peak_au14: 2.0, source: LaughSource::Au };
    let p = LaughParams::default();
    assert!(decide_punchline_response(&tl, &[ev(2.4, 2.9)], &p)[0].laughed);
    assert!(!decide_punchline_response(&tl, &[ev(4.5, 4.8)], &p)[0].laughed);
    assert!(!decide_punchline_response(&tl, &[], &p)[0].laughed);
    assert!(decide_punchline_response(&tl, &[LaughEvent::marker(3.9)], &p)[0].laughed);
}

#[test]
fn excursion_examples() {
    let base = Baseline { mu: 0.3, sigma: 0.1 };
    let p = LaughParams::default();
    let bump = |frames: usize| {
        let mut v = vec![0.3; 60];
        v.extend(vec![0.8; frames]);
        v.extend(vec![0.3; 60]);
        detect_laugh_events(&series(&v), &base, &p)
    };
    let long = bump(12);
    assert_eq!(long.len(), 1);
    assert!((long[0].start - 2.0).abs() < 1e-9 && (long[0].end - 2.4).abs() < 1e-9);
    assert_eq!(long[0].peak_au14, 0.8);
    assert!(bump(3).is_empty());
}
