//! Did the viewer laugh at a punchline? Decided from AU14 (the cheek-dimpler
//! action unit) relative to a per-viewer resting baseline.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{AuSeries, PunchlineSegment, Timeline};

/// Lower bound on the baseline spread, in AU intensity units.
pub const SIGMA_FLOOR: f64 = 0.05;
/// Default length of the resting-face calibration period, in seconds.
pub const CALIBRATION_DURATION: f64 = 30.0;
/// A response window with less than this fraction of its frames present counts as dropout.
pub const MIN_WINDOW_COVERAGE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub mu: f64,
    pub sigma: f64,
}

impl Baseline {
    pub fn threshold(&self, params: &LaughParams) -> f64 {
        self.mu + params.k_sigma * self.sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaughParams {
    pub k_sigma: f64,
    pub min_hold: f64,
    pub lead: f64,
    pub lag: f64,
}

impl Default for LaughParams {
    fn default() -> Self {
        Self {
            k_sigma: 3.0,
            min_hold: 0.2,
            lead: 0.5,
            lag: 1.0,
        }
    }
}

impl LaughParams {
    pub fn validate(&self) -> Result<(), ExpressionError> {
        if self.k_sigma > 0.0 && self.min_hold > 0.0 && self.lead >= 0.0 && self.lag >= 0.0 {
            Ok(())
        } else {
            Err(ExpressionError::InvalidParams(*self))
        }
    }

    /// The `[start - lead, end + lag]` window in which a laugh counts for `seg`.
    pub fn window(&self, seg: &PunchlineSegment) -> (f64, f64) {
        (seg.start - self.lead, seg.end + self.lag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaughSource {
    Au,
    Marker,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaughEvent {
    pub start: f64,
    pub end: f64,
    /// Peak AU14 over the run. Manual markers carry +inf (serialized as null)
    /// so they outrank any AU evidence.
    #[serde(with = "peak_serde")]
    pub peak_au14: f64,
    pub source: LaughSource,
}

impl LaughEvent {
    /// A zero-length event from a manual laugh button press.
    pub fn marker(t: f64) -> Self {
        Self {
            start: t,
            end: t,
            peak_au14: f64::INFINITY,
            source: LaughSource::Marker,
        }
    }

    pub fn overlaps(&self, lo: f64, hi: f64) -> bool {
        self.start <= hi && self.end >= lo
    }

    pub fn shifted(&self, dt: f64) -> Self {
        Self {
            start: self.start + dt,
            end: self.end + dt,
            ..*self
        }
    }
}

mod peak_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PunchlineResponse {
    pub segment: PunchlineSegment,
    pub laughed: bool,
    pub evidence: Option<LaughEvent>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpressionError {
    #[error("calibration needs {needed} s of AU data, series covers {available} s")]
    InsufficientData { needed: f64, available: f64 },
    #[error("invalid laugh parameters {0:?}")]
    InvalidParams(LaughParams),
}

fn span(series: &AuSeries) -> f64 {
    match (series.frames.first(), series.frames.last()) {
        (Some(a), Some(b)) => b.t - a.t + series.frame_period().unwrap_or(0.0),
        _ => 0.0,
    }
}

/// Mean and population SD of AU14 over the first `duration` seconds of the
/// series, with the SD floored at [`SIGMA_FLOOR`].
pub fn calibrate_baseline(series: &AuSeries, duration: f64) -> Result<Baseline, ExpressionError> {
    let available = span(series);
    if series.is_empty() || available + 1e-9 < duration {
        return Err(ExpressionError::InsufficientData {
            needed: duration,
            available,
        });
    }
    let t0 = series.frames[0].t;
    let values: Vec<f64> = series
        .frames
        .iter()
        .take_while(|f| f.t < t0 + duration)
        .map(|f| f.au14)
        .collect();
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n;
    Ok(Baseline {
        mu,
        sigma: var.sqrt().max(SIGMA_FLOOR),
    })
}

/// Maximal runs of frames above `mu + k_sigma * sigma` lasting at least `min_hold`.
pub fn detect_laugh_events(series: &AuSeries, baseline: &Baseline, params: &LaughParams) -> Vec<LaughEvent> {
    let threshold = baseline.threshold(params);
    let period = series.frame_period().unwrap_or(0.0);
    let mut events = Vec::new();
    let mut run: Option<(usize, f64)> = None;
    let frames = &series.frames;
    let close = |first: usize, last: usize, peak: f64, events: &mut Vec<LaughEvent>| {
        let start = frames[first].t;
        let end = frames[last].t + period;
        if end - start + 1e-9 >= params.min_hold && end > start {
            events.push(LaughEvent {
                start,
                end,
                peak_au14: peak,
                source: LaughSource::Au,
            });
        }
    };
    for (i, f) in frames.iter().enumerate() {
        match (run, f.au14 > threshold) {
            (None, true) => run = Some((i, f.au14)),
            (Some((s, peak)), true) => run = Some((s, peak.max(f.au14))),
            (Some((s, peak)), false) => {
                close(s, i - 1, peak, &mut events);
                run = None;
            }
            (None, false) => {}
        }
    }
    if let Some((s, peak)) = run {
        close(s, frames.len() - 1, peak, &mut events);
    }
    events
}

/// One response per punchline, in timeline order. A punchline counts as laughed
/// at when any event touches its window; the strongest such event is kept.
pub fn decide_punchline_response(
    timeline: &Timeline,
    events: &[LaughEvent],
    params: &LaughParams,
) -> Vec<PunchlineResponse> {
    timeline
        .segments
        .iter()
        .map(|seg| {
            let (lo, hi) = params.window(seg);
            let evidence = events
                .iter()
                .filter(|e| e.overlaps(lo, hi))
                .max_by(|a, b| a.peak_au14.total_cmp(&b.peak_au14))
                .copied();
            PunchlineResponse {
                segment: *seg,
                laughed: evidence.is_some(),
                evidence,
            }
        })
        .collect()
}

/// Fraction of the expected AU frames present in `[lo, hi]`, using the
/// series' nominal frame period. Zero when the period is unknown.
pub fn window_coverage(series: &AuSeries, lo: f64, hi: f64) -> f64 {
    let Some(period) = series.frame_period() else {
        return 0.0;
    };
    if hi <= lo {
        return 1.0;
    }
    let expected = (hi - lo) / period;
    (series.range(lo, hi).len() as f64 / expected).min(1.0)
}

/// AU14 samples inside each punchline's response window, split by whether the
/// viewer followed the story at that punchline.
pub fn split_window_samples(
    series: &AuSeries,
    timeline: &Timeline,
    understood: &[bool],
    params: &LaughParams,
) -> (Vec<f64>, Vec<f64>) {
    let mut yes = Vec::new();
    let mut no = Vec::new();
    for (seg, &u) in timeline.segments.iter().zip(understood) {
        let (lo, hi) = params.window(seg);
        let target = if u { &mut yes } else { &mut no };
        target.extend(series.range(lo, hi).iter().map(|f| f.au14));
    }
    (yes, no)
}
