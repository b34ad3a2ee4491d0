//! Deterministic synthetic material: laugh-track test audio, a labelled AU14
//! fixture, and the nine-clip demo timeline.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::laughtrack::AudioBuffer;
use crate::types::{AuFrame, AuSeries, PunchlineSegment, Timeline};

/// Tone background with uniform white-noise bursts laid over `[start, end)` of each
/// burst. The sum is clipped to [-1, 1].
pub fn tone_with_bursts(
    sample_rate: u32,
    duration: f64,
    tone_hz: f64,
    tone_amp: f64,
    bursts: &[(f64, f64)],
    burst_amp: f64,
    seed: u64,
) -> AudioBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sr = sample_rate as f64;
    let n = (duration * sr).round() as usize;
    let mut samples: Vec<f64> = (0..n)
        .map(|i| tone_amp * (2.0 * PI * tone_hz * i as f64 / sr).sin())
        .collect();
    for &(a, b) in bursts {
        let lo = ((a * sr).round() as usize).min(n);
        let hi = ((b * sr).round() as usize).min(n);
        for s in &mut samples[lo..hi] {
            *s += rng.random_range(-burst_amp..=burst_amp);
        }
    }
    for s in &mut samples {
        *s = s.clamp(-1.0, 1.0);
    }
    AudioBuffer { sample_rate, samples }
}

/// One file of the detection corpus: audio plus the burst times it was built from.
pub struct BurstClip {
    pub audio: AudioBuffer,
    pub truth: Vec<PunchlineSegment>,
}

/// Random laugh-track-like clip: a 440 Hz tone at 0.1 with noise bursts at 0.5.
/// Bursts last 0.8–3 s and are separated by at least 1.5 s of tone.
pub fn burst_clip(sample_rate: u32, duration: f64, seed: u64) -> BurstClip {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut truth = Vec::new();
    let mut t = rng.random_range(1.5..4.0);
    loop {
        let len = rng.random_range(0.8..3.0);
        let start = (t * 100.0_f64).round() / 100.0;
        let end = ((t + len) * 100.0_f64).round() / 100.0;
        if end > duration - 1.0 {
            break;
        }
        truth.push(PunchlineSegment { start, end });
        t = end + rng.random_range(1.5..8.0);
    }
    let bursts: Vec<(f64, f64)> = truth.iter().map(|s| (s.start, s.end)).collect();
    let audio = tone_with_bursts(sample_rate, duration, 440.0, 0.1, &bursts, 0.5, seed.wrapping_add(1));
    BurstClip { audio, truth }
}

/// Clip lengths of the demo video, in seconds; nine clips of 60–90 s totalling 600 s.
pub const DEMO_CLIP_LENGTHS: [f64; 9] = [62.0, 70.0, 65.0, 68.0, 60.0, 72.0, 64.0, 66.0, 73.0];

/// Nine clips, one 2.5 s punchline per clip placed 70% of the way in.
pub fn demo_timeline() -> Timeline {
    let mut start = 0.0;
    let mut segments = Vec::new();
    for len in DEMO_CLIP_LENGTHS {
        let s = start + (0.7 * len).round();
        segments.push(PunchlineSegment { start: s, end: s + 2.5 });
        start += len;
    }
    Timeline {
        media_duration: start,
        segments,
    }
}

/// A labelled AU14 recording for checking the smile/comprehension relation.
pub struct AuFixture {
    pub series: AuSeries,
    pub timeline: Timeline,
    /// Per punchline: did the viewer follow the story there.
    pub understood: Vec<bool>,
}

/// 30 fps AU14 trace over `timeline`. Resting AU14 hovers around 0.3; inside
/// understood punchlines it rises by about 0.6, with noise on both.
pub fn au_fixture(timeline: &Timeline, understood: &[bool], seed: u64) -> AuFixture {
    assert_eq!(timeline.segments.len(), understood.len());
    let fps = 30.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::<f64>::new(0.0, 0.12).expect("valid sd");
    let n = (timeline.media_duration * fps).floor() as usize;
    let mut frames = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / fps;
        let lift = timeline
            .segments
            .iter()
            .zip(understood)
            .find(|(s, _)| t >= s.start && t <= s.end + 0.5)
            .map_or(0.0, |(_, &u)| if u { 0.6 } else { 0.0 });
        let au14: f64 = (0.3 + lift + noise.sample(&mut rng)).clamp(0.0, 5.0);
        frames.push(AuFrame::new((t * 1e6).round() / 1e6, (au14 * 1e4).round() / 1e4));
    }
    let mut series = AuSeries::new(frames).expect("fixture frames are ordered");
    series.sample_rate_hint = Some(fps);
    AuFixture {
        series,
        timeline: timeline.clone(),
        understood: understood.to_vec(),
    }
}

/// Labels used by the bundled fixture: five understood, four missed.
pub const FIXTURE_LABELS: [bool; 9] = [true, false, true, true, false, true, false, true, false];

pub const FIXTURE_SEED: u64 = 2024;
