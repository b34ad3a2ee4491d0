use super::{DetectorConfig, FeatureSeries, LaughtrackError, FLATNESS_WEIGHT, RMS_WEIGHT};
use crate::types::{validate_timeline, PunchlineSegment, Timeline};

/// Nearest-rank percentile of an unsorted slice.
fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

/// Per-frame laugh score: weighted sum of RMS (normalized by the 95th
/// percentile RMS of the series) and spectral flatness.
pub(crate) fn frame_scores(features: &FeatureSeries) -> Vec<f64> {
    let rms: Vec<f64> = features.frames.iter().map(|f| f.rms).collect();
    let norm = percentile(&rms, 0.95);
    features
        .frames
        .iter()
        .map(|f| {
            let nrms = if norm > 0.0 { f.rms / norm } else { 0.0 };
            RMS_WEIGHT * nrms + FLATNESS_WEIGHT * f.flatness
        })
        .collect()
}

/// Hysteresis gate over frame scores; returns inclusive frame index ranges.
fn hysteresis(scores: &[f64], on: f64, off: f64) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        match open {
            None if s >= on => open = Some(i),
            Some(start) if s < off => {
                runs.push((start, i - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        runs.push((start, scores.len() - 1));
    }
    runs
}

pub fn detect_punchlines(
    features: &FeatureSeries,
    cfg: &DetectorConfig,
    media_duration: f64,
) -> Result<Timeline, LaughtrackError> {
    cfg.validate()?;
    if features.frames.is_empty() {
        return Err(LaughtrackError::NoFeatures);
    }
    let scores = frame_scores(features);
    let half_hop = features.hop / 2.0;
    let raw: Vec<PunchlineSegment> = hysteresis(&scores, cfg.on_threshold, cfg.off_threshold)
        .into_iter()
        .filter_map(|(a, b)| {
            let start = (features.frame_center(a) - half_hop).max(0.0);
            let end = (features.frame_center(b) + half_hop).min(media_duration);
            (start < end).then_some(PunchlineSegment { start, end })
        })
        .collect();
    let segments = merge_segments(&raw, cfg.merge_gap, cfg.min_duration)?;
    Ok(validate_timeline(Timeline {
        media_duration,
        segments,
    })?)
}

/// Unions neighbours closer than `merge_gap`, then drops anything shorter than
/// `min_duration`.
pub fn merge_segments(
    segments: &[PunchlineSegment],
    merge_gap: f64,
    min_duration: f64,
) -> Result<Vec<PunchlineSegment>, LaughtrackError> {
    for (i, w) in segments.windows(2).enumerate() {
        if w[1].start < w[0].end {
            return Err(LaughtrackError::UnsortedSegments(i + 1));
        }
    }
    let mut merged: Vec<PunchlineSegment> = Vec::with_capacity(segments.len());
    for seg in segments {
        match merged.last_mut() {
            Some(cur) if seg.start - cur.end < merge_gap => cur.end = cur.end.max(seg.end),
            _ => merged.push(*seg),
        }
    }
    merged.retain(|s| s.duration() >= min_duration);
    Ok(merged)
}
