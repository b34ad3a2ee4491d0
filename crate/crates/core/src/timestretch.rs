//! Pitch-preserving rate change by WSOLA (waveform-similarity overlap-add).
//!
//! Output grains are laid down every synthesis hop; each grain is read from the
//! input at `k * rate * hop`, nudged within the search radius to the offset whose
//! head best matches the previous grain's tail.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laughtrack::AudioBuffer;

pub const MIN_RATE: f64 = 0.6;
pub const MAX_RATE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WsolaParams {
    /// Grain length in seconds.
    pub window: f64,
    /// Fraction of a grain shared with its neighbour.
    pub overlap: f64,
    pub search_radius: f64,
}

impl Default for WsolaParams {
    fn default() -> Self {
        Self {
            window: 0.050,
            overlap: 0.5,
            search_radius: 0.010,
        }
    }
}

impl WsolaParams {
    pub fn validate(&self) -> Result<(), StretchError> {
        if self.window > 0.0
            && self.overlap > 0.0
            && self.overlap < 1.0
            && self.search_radius >= 0.0
            && self.search_radius < self.window
        {
            Ok(())
        } else {
            Err(StretchError::InvalidParams(*self))
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum StretchError {
    #[error("rate {0} outside [{MIN_RATE}, {MAX_RATE}]")]
    RateOutOfRange(f64),
    #[error("audio of {samples} samples is shorter than one {window}-sample window")]
    TooShort { samples: usize, window: usize },
    #[error("invalid WSOLA parameters {0:?}")]
    InvalidParams(WsolaParams),
}

/// Time-stretches `audio` so it plays `1 / rate` times as long, within the
/// controller's range of rates.
pub fn stretch(audio: &AudioBuffer, rate: f64, params: &WsolaParams) -> Result<AudioBuffer, StretchError> {
    if !(MIN_RATE..=MAX_RATE).contains(&rate) {
        return Err(StretchError::RateOutOfRange(rate));
    }
    stretch_unbounded(audio, rate, params)
}

/// Same as [`stretch`] but accepts any rate in (0, 4], including speed-ups.
pub fn stretch_unbounded(audio: &AudioBuffer, rate: f64, params: &WsolaParams) -> Result<AudioBuffer, StretchError> {
    params.validate()?;
    if !(rate > 0.0 && rate <= 4.0) {
        return Err(StretchError::RateOutOfRange(rate));
    }
    let sr = audio.sample_rate as f64;
    let n = ((params.window * sr).round() as usize).max(2);
    let x = &audio.samples;
    if x.len() <= n {
        return Err(StretchError::TooShort {
            samples: x.len(),
            window: n,
        });
    }
    let hop = ((n as f64 * (1.0 - params.overlap)).round() as usize).clamp(1, n - 1);
    let overlap = n - hop;
    let radius = (params.search_radius * sr).round() as usize;
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect();

    let out_len = (x.len() as f64 / rate).round() as usize;
    let grains = if out_len <= n { 1 } else { (out_len - n).div_ceil(hop) + 1 };
    let last_start = x.len() - n;
    let buf_len = (grains - 1) * hop + n;
    let mut y = vec![0.0; buf_len];
    let mut wsum = vec![0.0; buf_len];

    let mut prev: Option<usize> = None;
    for k in 0..grains {
        let nominal = ((k * hop) as f64 * rate).round() as usize;
        let pos = match prev {
            None => nominal.min(last_start),
            Some(p) => best_offset(x, p + hop, nominal, radius, overlap, last_start),
        };
        let base = k * hop;
        for i in 0..n {
            y[base + i] += window[i] * x[pos + i];
            wsum[base + i] += window[i];
        }
        prev = Some(pos);
    }

    let samples = y
        .iter()
        .zip(&wsum)
        .take(out_len)
        .map(|(v, w)| if *w > 1e-9 { (v / w).clamp(-1.0, 1.0) } else { 0.0 })
        .collect();
    Ok(AudioBuffer {
        sample_rate: audio.sample_rate,
        samples,
    })
}

/// Picks the grain start within `nominal ± radius` whose first `overlap` samples
/// correlate best with the previous grain's tail (`x[tail..tail + overlap]`).
fn best_offset(x: &[f64], tail: usize, nominal: usize, radius: usize, overlap: usize, last_start: usize) -> usize {
    let lo = nominal.saturating_sub(radius).min(last_start);
    let hi = (nominal + radius).min(last_start);
    if tail + overlap > x.len() {
        return nominal.min(last_start);
    }
    let template = &x[tail..tail + overlap];
    let t_energy: f64 = template.iter().map(|v| v * v).sum();
    let mut best = nominal.min(last_start);
    let mut best_score = f64::NEG_INFINITY;
    for cand in lo..=hi {
        let seg = &x[cand..cand + overlap];
        let mut dot = 0.0;
        let mut energy = 0.0;
        for (a, b) in template.iter().zip(seg) {
            dot += a * b;
            energy += b * b;
        }
        let denom = (t_energy * energy).sqrt();
        let score = if denom > 1e-12 { dot / denom } else { 0.0 };
        if score > best_score {
            best_score = score;
            best = cand;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, sr: u32, n: usize) -> AudioBuffer {
        AudioBuffer {
            sample_rate: sr,
            samples: (0..n).map(|i| 0.8 * (2.0 * PI * freq * i as f64 / sr as f64).sin()).collect(),
        }
    }

    #[test]
    fn identity_rate_keeps_duration() {
        let a = sine(300.0, 8000, 8000);
        let out = stretch(&a, 1.0, &WsolaParams::default()).unwrap();
        assert!((out.samples.len() as f64 - 8000.0).abs() <= 160.0);
        assert_eq!(out.sample_rate, 8000);
    }

    #[test]
    fn slowdown_duration_arithmetic() {
        let a = sine(300.0, 8000, 8000);
        let out = stretch(&a, 0.8, &WsolaParams::default()).unwrap();
        let len = out.samples.len() as f64;
        assert!((len - 10000.0).abs() / 10000.0 <= 0.02, "len {len}");
    }

    #[test]
    fn rejects_out_of_range_rates() {
        let a = sine(300.0, 8000, 8000);
        assert_eq!(
            stretch(&a, 0.5, &WsolaParams::default()),
            Err(StretchError::RateOutOfRange(0.5))
        );
        assert_eq!(
            stretch(&a, 1.3, &WsolaParams::default()),
            Err(StretchError::RateOutOfRange(1.3))
        );
        let fast = stretch_unbounded(&a, 1.3, &WsolaParams::default()).unwrap();
        assert!((fast.samples.len() as f64 - 8000.0 / 1.3).abs() < 0.02 * 8000.0);
    }

    #[test]
    fn rejects_short_audio() {
        let a = sine(300.0, 8000, 100);
        assert!(matches!(
            stretch(&a, 0.8, &WsolaParams::default()),
            Err(StretchError::TooShort { samples: 100, window: 400 })
        ));
    }

    #[test]
    fn invalid_params() {
        let a = sine(300.0, 8000, 8000);
        let p = WsolaParams {
            window: 0.01,
            overlap: 0.5,
            search_radius: 0.02,
        };
        assert!(matches!(stretch(&a, 0.8, &p), Err(StretchError::InvalidParams(_))));
    }

    #[test]
    fn output_never_exceeds_unit_amplitude() {
        let a = AudioBuffer {
            sample_rate: 8000,
            samples: (0..8000).map(|i| if i % 7 < 3 { 1.0 } else { -1.0 }).collect(),
        };
        for rate in [0.6, 0.7, 0.8, 0.9, 1.0] {
            let out = stretch(&a, rate, &WsolaParams::default()).unwrap();
            assert!(out.samples.iter().all(|s| s.abs() <= 1.0));
        }
    }
}
