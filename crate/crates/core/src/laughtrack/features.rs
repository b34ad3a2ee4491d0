use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{AudioBuffer, DetectorConfig, LaughtrackError};

/// Added to every magnitude so the log in the geometric mean stays finite.
const MAG_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureFrame {
    pub rms: f64,
    pub flatness: f64,
    pub zcr: u32,
}

/// Short-time features, one frame per hop. Frame `i` covers
/// `[i * hop, i * hop + frame_len)` seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSeries {
    pub hop: f64,
    pub frame_len: f64,
    pub frames: Vec<FeatureFrame>,
}

impl FeatureSeries {
    pub fn frame_center(&self, i: usize) -> f64 {
        i as f64 * self.hop + self.frame_len / 2.0
    }
}

fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// Geometric over arithmetic mean of `mags`, in [0, 1]. All-zero input gives 0.
pub fn spectral_flatness(mags: &[f64]) -> f64 {
    if mags.is_empty() {
        return 0.0;
    }
    let n = mags.len() as f64;
    let arith = mags.iter().map(|m| m + MAG_EPS).sum::<f64>() / n;
    if arith <= 2.0 * MAG_EPS {
        return 0.0;
    }
    let geo = (mags.iter().map(|m| (m + MAG_EPS).ln()).sum::<f64>() / n).exp();
    (geo / arith).clamp(0.0, 1.0)
}

pub fn extract_features(audio: &AudioBuffer, cfg: &DetectorConfig) -> Result<FeatureSeries, LaughtrackError> {
    cfg.validate()?;
    let (frame, hop) = cfg.frame_samples(audio.sample_rate);
    if audio.samples.len() < frame {
        return Err(LaughtrackError::TooShort {
            samples: audio.samples.len(),
            frame,
        });
    }
    let n_frames = 1 + (audio.samples.len() - frame) / hop;
    let nfft = frame.next_power_of_two();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(nfft);
    let window = hann(frame);
    let mut buf = vec![Complex::new(0.0, 0.0); nfft];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut mags = vec![0.0; nfft / 2];

    let sr = audio.sample_rate as f64;
    let mut frames = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let x = &audio.samples[i * hop..i * hop + frame];
        let rms = (x.iter().map(|s| s * s).sum::<f64>() / frame as f64).sqrt();
        let zcr = x.windows(2).filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0)).count() as u32;

        for (slot, (s, w)) in buf.iter_mut().zip(x.iter().zip(&window)) {
            *slot = Complex::new(s * w, 0.0);
        }
        for slot in &mut buf[frame..] {
            *slot = Complex::new(0.0, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        // Bins 1..=nfft/2: DC excluded, Nyquist kept.
        for (m, c) in mags.iter_mut().zip(&buf[1..=nfft / 2]) {
            *m = c.norm();
        }
        frames.push(FeatureFrame {
            rms,
            flatness: spectral_flatness(&mags),
            zcr,
        });
    }
    Ok(FeatureSeries {
        hop: hop as f64 / sr,
        frame_len: frame as f64 / sr,
        frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct O(n^2) DFT flatness of one frame, independent of rustfft.
    fn dft_flatness(x: &[f64]) -> f64 {
        let n = x.len().next_power_of_two();
        let w = hann(x.len());
        let mags: Vec<f64> = (1..=n / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (j, s) in x.iter().enumerate() {
                    let ang = -2.0 * PI * (k * j) as f64 / n as f64;
                    re += s * w[j] * ang.cos();
                    im += s * w[j] * ang.sin();
                }
                (re * re + im * im).sqrt()
            })
            .collect();
        spectral_flatness(&mags)
    }

    fn sine(freq: f64, sr: u32, secs: f64, amp: f64) -> AudioBuffer {
        let n = (sr as f64 * secs) as usize;
        AudioBuffer {
            sample_rate: sr,
            samples: (0..n).map(|i| amp * (2.0 * PI * freq * i as f64 / sr as f64).sin()).collect(),
        }
    }

    #[test]
    fn silence_has_zero_rms() {
        let audio = AudioBuffer {
            sample_rate: 16000,
            samples: vec![0.0; 16000],
        };
        let fs = extract_features(&audio, &DetectorConfig::default()).unwrap();
        assert_eq!(fs.frames.len(), 1 + (16000 - 800) / 160);
        assert!(fs.frames.iter().all(|f| f.rms == 0.0 && f.flatness == 0.0 && f.zcr == 0));
    }

    #[test]
    fn sine_is_tonal() {
        let audio = sine(440.0, 16000, 1.0, 1.0);
        let cfg = DetectorConfig::default();
        let fs = extract_features(&audio, &cfg).unwrap();
        let (frame, hop) = cfg.frame_samples(16000);
        // Oracle on one frame.
        let oracle = dft_flatness(&audio.samples[10 * hop..10 * hop + frame]);
        assert!(oracle < 0.1, "oracle flatness {oracle}");
        assert!((fs.frames[10].flatness - oracle).abs() < 1e-9);
        for f in &fs.frames[1..fs.frames.len() - 1] {
            assert!(f.flatness < 0.1, "flatness {}", f.flatness);
            assert!((f.rms - 1.0 / 2f64.sqrt()).abs() < 0.01);
        }
    }

    #[test]
    fn white_noise_is_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let normal = rand_distr::StandardNormal;
        let samples: Vec<f64> = (0..16000).map(|_| rng.sample::<f64, _>(normal)).collect();
        let audio = AudioBuffer {
            sample_rate: 16000,
            samples,
        };
        let cfg = DetectorConfig::default();
        let fs = extract_features(&audio, &cfg).unwrap();
        let mut flat: Vec<f64> = fs.frames.iter().map(|f| f.flatness).collect();
        flat.sort_by(f64::total_cmp);
        let median = flat[flat.len() / 2];
        assert!(median > 0.5, "median flatness {median}");
        let (frame, _) = cfg.frame_samples(16000);
        let oracle = dft_flatness(&audio.samples[..frame]);
        assert!((fs.frames[0].flatness - oracle).abs() < 1e-9);
    }

    #[test]
    fn zero_crossings_of_a_square_wave() {
        let samples: Vec<f64> = (0..800).map(|i| if (i / 10) % 2 == 0 { 0.5 } else { -0.5 }).collect();
        let audio = AudioBuffer {
            sample_rate: 16000,
            samples,
        };
        let fs = extract_features(&audio, &DetectorConfig::default()).unwrap();
        assert_eq!(fs.frames.len(), 1);
        assert_eq!(fs.frames[0].zcr, 79);
    }

    #[test]
    fn too_short() {
        let audio = AudioBuffer {
            sample_rate: 16000,
            samples: vec![0.0; 100],
        };
        assert!(matches!(
            extract_features(&audio, &DetectorConfig::default()),
            Err(LaughtrackError::TooShort { samples: 100, frame: 800 })
        ));
    }
}
