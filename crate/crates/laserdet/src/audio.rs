//! Audio loading, validation and normalization.
//!
//! Clips are held as mono `f64` samples in [-1, 1]; the canonical pipeline
//! rate is 16 kHz and every front-end assumes it.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};

/// Canonical pipeline sample rate.
pub const CANONICAL_RATE_HZ: u32 = 16_000;

/// Mono PCM clip. Immutable after construction; cheap to share read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyAudio);
        }
        if sample_rate_hz == 0 {
            return Err(Error::CorruptHeader("sample rate is zero".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(AudioBuffer {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Slice [start, end) in samples as a new buffer.
    pub fn segment(&self, start: usize, end: usize) -> Result<AudioBuffer> {
        if start >= end || end > self.samples.len() {
            return Err(Error::EmptyAudio);
        }
        AudioBuffer::new(self.samples[start..end].to_vec(), self.sample_rate_hz)
    }

    /// Rescales so the peak magnitude equals `peak` (no-op on silence).
    pub fn peak_normalized(&self, peak: f64) -> AudioBuffer {
        let max = self.samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        if max == 0.0 {
            return self.clone();
        }
        let g = peak / max;
        AudioBuffer {
            samples: self.samples.iter().map(|s| s * g).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }
}

// --- RIFF/WAVE PCM ---

fn read_u32(b: &[u8], at: usize) -> Option<u32> {
    b.get(at..at + 4).map(|s| u32::from_le_bytes(s.try_into().unwrap()))
}

fn read_u16(b: &[u8], at: usize) -> Option<u16> {
    b.get(at..at + 2).map(|s| u16::from_le_bytes(s.try_into().unwrap()))
}

/// Parses RIFF/WAVE PCM bytes into a mono buffer.
///
/// Accepts 8/16/24/32-bit integer and 32-bit float PCM, 1 or 2 channels.
/// Stereo is mixed to mono by channel averaging; integer samples are rescaled
/// to [-1, 1] by the type's max magnitude. Never panics on malformed input.
pub fn parse_wav(bytes: &[u8]) -> Result<AudioBuffer> {
    if bytes.len() < 12 {
        return Err(Error::CorruptHeader("file shorter than RIFF header".into()));
    }
    if &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::CorruptHeader("missing RIFF/WAVE magic".into()));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // (format, channels, rate, bits)
    let mut data: Option<&[u8]> = None;
    let mut pos = 12usize;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = read_u32(bytes, pos + 4).unwrap() as usize;
        let body_start = pos + 8;
        // chunk sizes can lie; never read past the buffer
        let body_end = body_start.saturating_add(size).min(bytes.len());
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(Error::CorruptHeader("fmt chunk too small".into()));
                }
                let format = read_u16(body, 0).unwrap();
                let channels = read_u16(body, 2).unwrap();
                let rate = read_u32(body, 4).unwrap();
                let bits = read_u16(body, 14).unwrap();
                fmt = Some((format, channels, rate, bits));
            }
            b"data" => {
                data = Some(body);
            }
            _ => {}
        }
        // chunks are word-aligned
        pos = body_start.saturating_add(size + (size & 1));
        if size == 0 && id != b"data" && id != b"fmt " {
            // avoid spinning on a zero-size unknown chunk
            pos = pos.max(body_start + 2);
        }
    }

    let (format, channels, rate, bits) =
        fmt.ok_or_else(|| Error::CorruptHeader("missing fmt chunk".into()))?;
    let data = data.ok_or_else(|| Error::CorruptHeader("missing data chunk".into()))?;

    if channels == 0 || channels > 2 {
        return Err(Error::UnsupportedFormat(format!("{channels} channels")));
    }
    if rate == 0 {
        return Err(Error::CorruptHeader("sample rate is zero".into()));
    }
    let decode: fn(&[u8]) -> f64 = match (format, bits) {
        (1, 8) => |b| (b[0] as f64 - 128.0) / 128.0,
        (1, 16) => |b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0,
        (1, 24) => |b| {
            let v = ((b[2] as i32) << 24 | (b[1] as i32) << 16 | (b[0] as i32) << 8) >> 8;
            v as f64 / 8_388_608.0
        },
        (1, 32) => |b| i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64 / 2_147_483_648.0,
        (3, 32) => |b| (f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64).clamp(-1.0, 1.0),
        (f, b) => {
            return Err(Error::UnsupportedFormat(format!(
                "format code {f} at {b} bits per sample"
            )))
        }
    };
    let bytes_per = bits as usize / 8;
    let stride = bytes_per * channels as usize;
    if stride == 0 {
        return Err(Error::CorruptHeader("zero-width sample".into()));
    }
    let n_frames = data.len() / stride;
    if n_frames == 0 {
        return Err(Error::EmptyAudio);
    }

    let mut samples = Vec::with_capacity(n_frames);
    for f in 0..n_frames {
        let base = f * stride;
        let mut acc = 0.0;
        for c in 0..channels as usize {
            acc += decode(&data[base + c * bytes_per..base + (c + 1) * bytes_per]);
        }
        samples.push(acc / channels as f64);
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::UnsupportedFormat("non-finite float samples".into()));
    }
    AudioBuffer::new(samples, rate)
}

/// Loads a WAV file from disk.
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path.to_path_buf())
        } else {
            Error::io(format!("reading {}", path.display()), e)
        }
    })?;
    parse_wav(&bytes)
}

/// Serializes as 16-bit PCM little-endian mono.
///
/// Quantization divides the i16 range so that a buffer that came from
/// `load_wav` of a 16-bit file round-trips bit-exactly.
pub fn wav_bytes(buf: &AudioBuffer) -> Vec<u8> {
    let n = buf.samples.len();
    let data_len = n * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(u32::try_from(36 + data_len).unwrap_or(u32::MAX)).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&buf.sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&buf.sample_rate_hz.saturating_mul(2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(u32::try_from(data_len).unwrap_or(u32::MAX)).to_le_bytes());
    for &s in &buf.samples {
        let q = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    out
}

pub fn write_wav(path: impl AsRef<Path>, buf: &AudioBuffer) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, wav_bytes(buf))
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Windowed-sinc sample-rate conversion. Identity (bit-exact) when the rates
/// already match; duration is preserved within one sample period.
pub fn resample(buf: &AudioBuffer, target_hz: u32) -> Result<AudioBuffer> {
    if target_hz == 0 {
        return Err(Error::CorruptHeader("target rate is zero".into()));
    }
    if buf.samples.is_empty() {
        return Err(Error::EmptyAudio);
    }
    if target_hz == buf.sample_rate_hz {
        return Ok(buf.clone());
    }

    let src = buf.sample_rate_hz as f64;
    let dst = target_hz as f64;
    let n_in = buf.samples.len();
    let n_out = (n_in as f64 * dst / src).ceil() as usize;

    // anti-alias cutoff slightly inside the narrower Nyquist band
    let cutoff = 0.475 * (dst / src).min(1.0); // cycles per input sample
    const RADIUS: isize = 48;
    let sinc = |x: f64| {
        if x.abs() < 1e-12 {
            1.0
        } else {
            (PI * x).sin() / (PI * x)
        }
    };

    let x = &buf.samples;
    let samples: Vec<f64> = (0..n_out)
        .map(|t| {
            let center = t as f64 * src / dst;
            let base = center.floor() as isize;
            let mut acc = 0.0;
            let mut norm = 0.0;
            for k in (base - RADIUS + 1)..=(base + RADIUS) {
                let u = k as f64 - center;
                let w = 0.5 + 0.5 * (PI * u / RADIUS as f64).cos(); // Hann taper
                let tap = 2.0 * cutoff * sinc(2.0 * cutoff * u) * w;
                norm += tap;
                if k >= 0 && (k as usize) < n_in {
                    acc += x[k as usize] * tap;
                }
            }
            if norm.abs() > 1e-12 {
                acc / norm
            } else {
                acc
            }
        })
        .collect();

    AudioBuffer::new(samples, target_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp;

    fn tone(freq: f64, rate: u32, seconds: f64) -> AudioBuffer {
        let n = (rate as f64 * seconds) as usize;
        AudioBuffer::new(
            (0..n)
                .map(|t| 0.5 * (2.0 * PI * freq * t as f64 / rate as f64).sin())
                .collect(),
            rate,
        )
        .unwrap()
    }

    fn dft_peak_hz(buf: &AudioBuffer) -> f64 {
        let n = buf.len().next_power_of_two();
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        re[..buf.len()].copy_from_slice(buf.samples());
        dsp::fft_in_place(&mut re, &mut im);
        let peak = (1..n / 2)
            .max_by(|&a, &b| {
                let pa = re[a] * re[a] + im[a] * im[a];
                let pb = re[b] * re[b] + im[b] * im[b];
                pa.partial_cmp(&pb).unwrap()
            })
            .unwrap();
        peak as f64 * buf.sample_rate_hz() as f64 / n as f64
    }

    #[test]
    fn sixteen_bit_scaling() {
        let mut bytes = wav_bytes(&AudioBuffer::new(vec![0.0, 0.5, -1.0], 16000).unwrap());
        // overwrite data section with the exact reference samples
        let data = bytes.len() - 6;
        for (i, v) in [0i16, 16384, -32768].iter().enumerate() {
            bytes[data + 2 * i..data + 2 * i + 2].copy_from_slice(&v.to_le_bytes());
        }
        let buf = parse_wav(&bytes).unwrap();
        assert_eq!(buf.samples(), &[0.0, 0.5, -1.0]);
    }

    #[test]
    fn stereo_averages_channels() {
        // hand-build a 2-channel 16-bit file with one frame {0.2, 0.4}
        let mut out = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&(36u32 + 4).to_le_bytes());
        out.extend_from_slice(b"WAVEfmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&2u16.to_le_bytes());
        out.extend_from_slice(&16000u32.to_le_bytes());
        out.extend_from_slice(&64000u32.to_le_bytes());
        out.extend_from_slice(&4u16.to_le_bytes());
        out.extend_from_slice(&16u16.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&4u32.to_le_bytes());
        let l = (0.2f64 * 32768.0).round() as i16;
        let r = (0.4f64 * 32768.0).round() as i16;
        out.extend_from_slice(&l.to_le_bytes());
        out.extend_from_slice(&r.to_le_bytes());
        let buf = parse_wav(&out).unwrap();
        assert_eq!(buf.len(), 1);
        assert!((buf.samples()[0] - 0.3).abs() < 1e-4);
    }

    #[test]
    fn zero_length_data_is_empty_audio() {
        let mut bytes = wav_bytes(&AudioBuffer::new(vec![0.1], 16000).unwrap());
        let len = bytes.len();
        bytes[len - 6..len - 2].copy_from_slice(&0u32.to_le_bytes()); // data size = 0
        bytes.truncate(len - 2);
        assert!(matches!(parse_wav(&bytes), Err(Error::EmptyAudio)));
    }

    fn header(format: u16, channels: u16, rate: u32, bits: u16, data_len: u32) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&(36 + data_len).to_le_bytes());
        out.extend_from_slice(b"WAVEfmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&format.to_le_bytes());
        out.extend_from_slice(&channels.to_le_bytes());
        out.extend_from_slice(&rate.to_le_bytes());
        out.extend_from_slice(&(rate * channels as u32 * bits as u32 / 8).to_le_bytes());
        out.extend_from_slice(&(channels * bits / 8).to_le_bytes());
        out.extend_from_slice(&bits.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&data_len.to_le_bytes());
        out
    }

    #[test]
    fn twenty_four_bit_decode() {
        let mut bytes = header(1, 1, 16000, 24, 9);
        // 0x400000 = +0.5, 0x800000 (sign bit) = -1.0, 0 = 0.0
        bytes.extend_from_slice(&[0x00, 0x00, 0x40]);
        bytes.extend_from_slice(&[0x00, 0x00, 0x80]);
        bytes.extend_from_slice(&[0x00, 0x00, 0x00]);
        let buf = parse_wav(&bytes).unwrap();
        assert_eq!(buf.samples(), &[0.5, -1.0, 0.0]);
    }

    #[test]
    fn thirty_two_bit_int_decode() {
        let mut bytes = header(1, 1, 8000, 32, 8);
        bytes.extend_from_slice(&i32::MIN.to_le_bytes());
        bytes.extend_from_slice(&(i32::MAX / 2).to_le_bytes());
        let buf = parse_wav(&bytes).unwrap();
        assert_eq!(buf.samples()[0], -1.0);
        assert!((buf.samples()[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn float_decode_clamps_out_of_range() {
        let mut bytes = header(3, 1, 16000, 32, 12);
        bytes.extend_from_slice(&1.5f32.to_le_bytes());
        bytes.extend_from_slice(&(-2.0f32).to_le_bytes());
        bytes.extend_from_slice(&0.25f32.to_le_bytes());
        let buf = parse_wav(&bytes).unwrap();
        assert_eq!(buf.samples()[0], 1.0);
        assert_eq!(buf.samples()[1], -1.0);
        assert_eq!(buf.samples()[2], 0.25);
    }

    #[test]
    fn rejects_garbage_and_unsupported() {
        assert!(matches!(parse_wav(b"RIFX"), Err(Error::CorruptHeader(_))));
        assert!(matches!(
            parse_wav(&[0u8; 64]),
            Err(Error::CorruptHeader(_))
        ));
        // format code 2 (ADPCM) is compressed
        let mut bytes = wav_bytes(&AudioBuffer::new(vec![0.1, 0.2], 16000).unwrap());
        bytes[20] = 2;
        assert!(matches!(parse_wav(&bytes), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn load_missing_file_is_not_found() {
        assert!(matches!(
            load_wav("/nonexistent/clip.wav"),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn write_load_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.wav");
        let buf = tone(440.0, 16000, 0.1);
        write_wav(&p, &buf).unwrap();
        let first = load_wav(&p).unwrap();
        write_wav(&p, &first).unwrap();
        let second = load_wav(&p).unwrap();
        assert_eq!(first.samples(), second.samples());
        assert_eq!(first.sample_rate_hz(), 16000);
    }

    #[test]
    fn resample_identity_when_rates_match() {
        let buf = tone(1000.0, 16000, 0.25);
        let out = resample(&buf, 16000).unwrap();
        assert_eq!(out, buf);
    }

    #[test]
    fn resample_preserves_tone_frequency() {
        let buf = tone(1000.0, 44100, 1.0);
        let out = resample(&buf, 16000).unwrap();
        let bin = out.sample_rate_hz() as f64 / out.len() as f64;
        assert!((dft_peak_hz(&out) - 1000.0).abs() <= bin + 1e-9);
    }

    #[test]
    fn resample_upsampling_preserves_tone_and_amplitude() {
        let buf = tone(1000.0, 16000, 1.0);
        let out = resample(&buf, 44100).unwrap();
        assert_eq!(out.len(), 44100);
        let bin = 44100.0 / out.len() as f64;
        assert!((dft_peak_hz(&out) - 1000.0).abs() <= bin + 1e-9);
        // interior RMS must match the source tone's 0.5/sqrt(2)
        let mid = &out.samples()[4410..39690];
        let rms = (mid.iter().map(|v| v * v).sum::<f64>() / mid.len() as f64).sqrt();
        assert!((rms - 0.5 / std::f64::consts::SQRT_2).abs() < 0.01, "rms {rms}");
    }

    #[test]
    fn resample_length_arithmetic() {
        let buf = AudioBuffer::new(vec![0.1; 1000], 48000).unwrap();
        let out = resample(&buf, 16000).unwrap();
        assert!(out.len() == 333 || out.len() == 334);
    }
}
