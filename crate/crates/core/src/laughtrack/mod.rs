//! Laugh-track (punchline) segmentation from a soundtrack.
//!
//! A heuristic stands in for a learned laughter detector: laugh tracks are
//! loud, broadband bursts, so each frame is scored from its normalized RMS
//! energy and spectral flatness, and a hysteresis gate turns scores into
//! segments.

mod detect;
mod features;
mod wav;

pub use detect::{detect_punchlines, merge_segments};
pub use features::{extract_features, spectral_flatness, FeatureFrame, FeatureSeries};
pub use wav::{decode_wav, encode_wav, encode_wav_channels};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::CoreError;

/// Mono audio in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl AudioBuffer {
    pub fn new(sample_rate: u32, samples: Vec<f64>) -> Result<Self, LaughtrackError> {
        if sample_rate == 0 {
            return Err(LaughtrackError::InvalidAudio("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(LaughtrackError::InvalidAudio(format!("sample {i} is not finite")));
        }
        Ok(Self { sample_rate, samples })
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            sample_rate: self.sample_rate,
            samples: self.samples.iter().map(|s| s * gain).collect(),
        }
    }
}

/// Score weights for the energy and flatness terms.
pub const RMS_WEIGHT: f64 = 0.5;
pub const FLATNESS_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub frame_len: f64,
    pub hop: f64,
    pub on_threshold: f64,
    pub off_threshold: f64,
    pub min_duration: f64,
    pub merge_gap: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            frame_len: 0.050,
            hop: 0.010,
            on_threshold: 0.6,
            off_threshold: 0.4,
            min_duration: 0.5,
            merge_gap: 0.4,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), LaughtrackError> {
        let ok = self.hop > 0.0
            && self.hop <= self.frame_len
            && self.off_threshold <= self.on_threshold
            && self.min_duration > 0.0
            && self.merge_gap >= 0.0
            && [self.frame_len, self.hop, self.on_threshold, self.off_threshold, self.min_duration, self.merge_gap]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(LaughtrackError::InvalidConfig(format!("{self:?}")))
        }
    }

    /// Frame and hop lengths in samples at `sample_rate`.
    pub fn frame_samples(&self, sample_rate: u32) -> (usize, usize) {
        let sr = sample_rate as f64;
        let frame = ((self.frame_len * sr).round() as usize).max(1);
        let hop = ((self.hop * sr).round() as usize).clamp(1, frame);
        (frame, hop)
    }
}

#[derive(Debug, Error)]
pub enum LaughtrackError {
    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),
    #[error("truncated WAV file: {0}")]
    Truncated(&'static str),
    #[error("invalid audio: {0}")]
    InvalidAudio(String),
    #[error("invalid detector config: {0}")]
    InvalidConfig(String),
    #[error("audio has {samples} samples, shorter than one {frame}-sample frame")]
    TooShort { samples: usize, frame: usize },
    #[error("feature series is empty")]
    NoFeatures,
    #[error("segments are not sorted and disjoint at index {0}")]
    UnsortedSegments(usize),
    #[error(transparent)]
    Timeline(#[from] CoreError),
}
