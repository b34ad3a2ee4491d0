//! Domain types shared across the engine.
//!
//! Media time (seconds into the video at 1.0x) is the universal clock.
//! Wall time only shows up on [`SessionEvent`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound of the AU intensity scale used by common facial-analysis exports.
pub const AU_MAX: f64 = 5.0;

/// One facial Action-Unit sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuFrame {
    pub t: f64,
    pub au14: f64,
    /// Other AU codes (e.g. `"au06"`), carried through but unused by the controller.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aux: BTreeMap<String, f64>,
}

impl AuFrame {
    pub fn new(t: f64, au14: f64) -> Self {
        Self {
            t,
            au14,
            aux: BTreeMap::new(),
        }
    }

    /// Clamps `au14` into `[0, AU_MAX]`. Returns true when the value was changed.
    pub fn clamp_intensity(&mut self) -> bool {
        let clamped = self.au14.clamp(0.0, AU_MAX);
        let changed = clamped != self.au14;
        self.au14 = clamped;
        changed
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if !self.t.is_finite() || self.t < 0.0 {
            return Err(CoreError::BadTime(self.t));
        }
        if !(0.0..=AU_MAX).contains(&self.au14) {
            return Err(CoreError::IntensityOutOfRange(self.au14));
        }
        Ok(())
    }
}

/// Ordered AU14 trace for one viewer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuSeries {
    pub frames: Vec<AuFrame>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_rate_hint: Option<f64>,
}

impl AuSeries {
    /// Builds a series, checking that every frame is valid and times strictly increase.
    pub fn new(frames: Vec<AuFrame>) -> Result<Self, CoreError> {
        let series = Self {
            frames,
            sample_rate_hint: None,
        };
        series.validate()?;
        Ok(series)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        for frame in &self.frames {
            frame.validate()?;
        }
        for (i, pair) in self.frames.windows(2).enumerate() {
            if pair[1].t <= pair[0].t {
                return Err(CoreError::NonMonotonicFrames {
                    index: i + 1,
                    prev: pair[0].t,
                    t: pair[1].t,
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn last_t(&self) -> Option<f64> {
        self.frames.last().map(|f| f.t)
    }

    /// Appends a frame if it keeps the series strictly increasing.
    pub fn push(&mut self, frame: AuFrame) -> Result<(), CoreError> {
        frame.validate()?;
        if let Some(prev) = self.last_t() {
            if frame.t <= prev {
                return Err(CoreError::NonMonotonicFrames {
                    index: self.frames.len(),
                    prev,
                    t: frame.t,
                });
            }
        }
        self.frames.push(frame);
        Ok(())
    }

    /// Nominal frame period: `1 / sample_rate_hint` when given, else the median
    /// inter-frame interval. `None` for fewer than two frames without a hint.
    pub fn frame_period(&self) -> Option<f64> {
        if let Some(hz) = self.sample_rate_hint.filter(|hz| *hz > 0.0) {
            return Some(1.0 / hz);
        }
        if self.frames.len() < 2 {
            return None;
        }
        let mut gaps: Vec<f64> = self.frames.windows(2).map(|w| w[1].t - w[0].t).collect();
        gaps.sort_by(f64::total_cmp);
        Some(gaps[gaps.len() / 2])
    }

    /// Frames with `lo <= t <= hi`.
    pub fn range(&self, lo: f64, hi: f64) -> &[AuFrame] {
        let a = self.frames.partition_point(|f| f.t < lo);
        let b = self.frames.partition_point(|f| f.t <= hi);
        &self.frames[a..b.max(a)]
    }
}

/// A laugh-track interval in media time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PunchlineSegment {
    pub start: f64,
    pub end: f64,
}

impl PunchlineSegment {
    pub fn new(start: f64, end: f64) -> Result<Self, CoreError> {
        let seg = Self { start, end };
        seg.validate()?;
        Ok(seg)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if !self.start.is_finite() || !self.end.is_finite() || self.start < 0.0 || self.start >= self.end {
            return Err(CoreError::BadSegment(*self));
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn shifted(&self, dt: f64) -> Self {
        Self {
            start: self.start + dt,
            end: self.end + dt,
        }
    }
}

impl fmt::Display for PunchlineSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.start, self.end)
    }
}

/// The punchline scenes of one video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    pub media_duration: f64,
    pub segments: Vec<PunchlineSegment>,
}

impl Timeline {
    pub fn new(media_duration: f64, segments: Vec<PunchlineSegment>) -> Result<Self, CoreError> {
        validate_timeline(Self {
            media_duration,
            segments,
        })
    }

    pub fn total_punchline_time(&self) -> f64 {
        self.segments.iter().map(PunchlineSegment::duration).sum()
    }
}

/// Returns the timeline unchanged iff it is sorted, non-overlapping and in bounds.
pub fn validate_timeline(timeline: Timeline) -> Result<Timeline, CoreError> {
    let d = timeline.media_duration;
    if !d.is_finite() || d < 0.0 {
        return Err(CoreError::BadDuration(d));
    }
    for (i, seg) in timeline.segments.iter().enumerate() {
        seg.validate()?;
        if i > 0 {
            let prev = timeline.segments[i - 1];
            if seg.start < prev.start {
                return Err(CoreError::Unsorted { index: i });
            }
            if seg.start < prev.end {
                return Err(CoreError::Overlap {
                    first: prev,
                    second: *seg,
                });
            }
        }
        if seg.end > d {
            return Err(CoreError::OutOfBounds {
                segment: *seg,
                media_duration: d,
            });
        }
    }
    Ok(timeline)
}

/// Rounds to 9 decimals so grid arithmetic lands on the same double as the literal.
pub(crate) fn snap(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// Why a speed command was issued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cause {
    Laugh,
    NoLaugh,
    Init,
}

impl Cause {
    pub fn from_laughed(laughed: bool) -> Self {
        if laughed {
            Cause::Laugh
        } else {
            Cause::NoLaugh
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Cause::Laugh => "laugh",
            Cause::NoLaugh => "no_laugh",
            Cause::Init => "init",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaybackState {
    pub rate: f64,
    pub punchlines_seen: u32,
}

impl PlaybackState {
    pub fn new(rate: f64) -> Self {
        Self {
            rate,
            punchlines_seen: 0,
        }
    }
}

/// A directive to change the playback rate at media time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedCommand {
    pub t: f64,
    pub rate: f64,
    pub cause: Cause,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("segments {first} and {second} overlap")]
    Overlap {
        first: PunchlineSegment,
        second: PunchlineSegment,
    },
    #[error("segment {segment} ends after media duration {media_duration}")]
    OutOfBounds {
        segment: PunchlineSegment,
        media_duration: f64,
    },
    #[error("segment {index} starts before its predecessor")]
    Unsorted { index: usize },
    #[error("invalid segment {0}: need 0 <= start < end")]
    BadSegment(PunchlineSegment),
    #[error("invalid media duration {0}")]
    BadDuration(f64),
    #[error("invalid media time {0}")]
    BadTime(f64),
    #[error("AU intensity {0} outside [0, 5]")]
    IntensityOutOfRange(f64),
    #[error("frame {index} at t={t} does not follow t={prev}")]
    NonMonotonicFrames { index: usize, prev: f64, t: f64 },
}
