//! Minimal RIFF/WAVE PCM16 reader and writer.

use super::{AudioBuffer, LaughtrackError};

const WAVE_FORMAT_PCM: u16 = 0x0001;
const WAVE_FORMAT_EXTENSIBLE: u16 = 0xFFFE;

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

struct Fmt {
    channels: u16,
    sample_rate: u32,
    bits: u16,
}

/// Decodes a PCM16 mono or stereo WAV. Stereo is averaged per sample and
/// values are scaled by 1/32768.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer, LaughtrackError> {
    if bytes.len() < 12 {
        return Err(LaughtrackError::Truncated("RIFF header"));
    }
    if &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(LaughtrackError::UnsupportedFormat("not a RIFF/WAVE file".into()));
    }

    let mut fmt: Option<Fmt> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                if size < 16 || body + 16 > bytes.len() {
                    return Err(LaughtrackError::Truncated("fmt chunk"));
                }
                let mut tag = u16_at(bytes, body);
                if tag == WAVE_FORMAT_EXTENSIBLE {
                    if size < 40 || body + 26 > bytes.len() {
                        return Err(LaughtrackError::Truncated("extensible fmt chunk"));
                    }
                    // First two bytes of the sub-format GUID carry the format tag.
                    tag = u16_at(bytes, body + 24);
                }
                if tag != WAVE_FORMAT_PCM {
                    return Err(LaughtrackError::UnsupportedFormat(format!("format tag {tag:#06x} is not PCM")));
                }
                fmt = Some(Fmt {
                    channels: u16_at(bytes, body + 2),
                    sample_rate: u32_at(bytes, body + 4),
                    bits: u16_at(bytes, body + 14),
                });
            }
            b"data" => {
                let fmt = fmt.ok_or(LaughtrackError::UnsupportedFormat("data chunk before fmt chunk".into()))?;
                if fmt.bits != 16 {
                    return Err(LaughtrackError::UnsupportedFormat(format!("{}-bit samples", fmt.bits)));
                }
                if fmt.channels != 1 && fmt.channels != 2 {
                    return Err(LaughtrackError::UnsupportedFormat(format!("{} channels", fmt.channels)));
                }
                if fmt.sample_rate == 0 {
                    return Err(LaughtrackError::UnsupportedFormat("sample rate 0".into()));
                }
                if body + size > bytes.len() {
                    return Err(LaughtrackError::Truncated("data chunk"));
                }
                let ch = fmt.channels as usize;
                let frame_bytes = 2 * ch;
                let data = &bytes[body..body + size - size % frame_bytes];
                let samples = data
                    .chunks_exact(frame_bytes)
                    .map(|fr| {
                        let sum: f64 = fr
                            .chunks_exact(2)
                            .map(|s| i16::from_le_bytes([s[0], s[1]]) as f64 / 32768.0)
                            .sum();
                        sum / ch as f64
                    })
                    .collect();
                return Ok(AudioBuffer {
                    sample_rate: fmt.sample_rate,
                    samples,
                });
            }
            _ => {}
        }
        pos = body + size + (size & 1);
    }
    Err(LaughtrackError::Truncated("missing data chunk"))
}

/// Encodes mono PCM16. Samples are clipped to [-1, 1].
pub fn encode_wav(audio: &AudioBuffer) -> Vec<u8> {
    encode_wav_channels(audio.sample_rate, &[&audio.samples])
}

/// Interleaves equally long channels into a PCM16 WAV.
pub fn encode_wav_channels(sample_rate: u32, channels: &[&[f64]]) -> Vec<u8> {
    let ch = channels.len().max(1);
    let frames = channels.first().map_or(0, |c| c.len());
    let data_len = frames * ch * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&WAVE_FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&(ch as u16).to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * ch as u32 * 2).to_le_bytes());
    out.extend_from_slice(&((ch * 2) as u16).to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for i in 0..frames {
        for c in channels {
            let s = (c[i].clamp(-1.0, 1.0) * 32767.0).round() as i16;
            out.extend_from_slice(&s.to_le_bytes());
        }
    }
    out
}
