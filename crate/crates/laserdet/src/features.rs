//! Per-clip feature front-ends: the proposed DWT-subband moment features and
//! the MFCC / LFCC / CQCC cepstral baselines, plus Welch spectrum export.

use std::f64::consts::PI;

use crate::audio::AudioBuffer;
use crate::dsp;
use crate::dwt::{dwt_multilevel, WaveletSpec};
use crate::error::{Error, Result};
use crate::stats::moments;

pub const LOG_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Dwt,
    Mfcc,
    Lfcc,
    Cqcc,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Dwt => "dwt",
            Scheme::Mfcc => "mfcc",
            Scheme::Lfcc => "lfcc",
            Scheme::Cqcc => "cqcc",
        }
    }

    pub const ALL: [Scheme; 4] = [Scheme::Dwt, Scheme::Mfcc, Scheme::Lfcc, Scheme::Cqcc];
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dwt" => Ok(Scheme::Dwt),
            "mfcc" => Ok(Scheme::Mfcc),
            "lfcc" => Ok(Scheme::Lfcc),
            "cqcc" => Ok(Scheme::Cqcc),
            other => Err(format!("unknown feature scheme {other:?}")),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Fixed-length per-clip feature vector tagged with its front-end.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub scheme: Scheme,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Frame-level cepstra: one row per frame.
pub type FrameMatrix = Vec<Vec<f64>>;

/// Cepstral front-end parameters (ASVspoof-style conventions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CepstralConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub fft_size: usize,
    pub n_filters: usize,
    pub n_coeffs: usize,
    pub cqt_bins_per_octave: usize,
    pub cqt_octaves: usize,
    /// Uniform resampling period of the CQT log-frequency axis.
    pub cqcc_resample_period: usize,
}

impl Default for CepstralConfig {
    fn default() -> Self {
        CepstralConfig {
            frame_ms: 25.0,
            hop_ms: 10.0,
            fft_size: 512,
            n_filters: 26,
            n_coeffs: 20,
            cqt_bins_per_octave: 96,
            cqt_octaves: 9,
            cqcc_resample_period: 16,
        }
    }
}

impl CepstralConfig {
    pub fn validate(&self, sample_rate_hz: u32) -> Result<()> {
        let hop = self.hop_samples(sample_rate_hz);
        if !(self.frame_ms > self.hop_ms && self.hop_ms > 0.0) || hop == 0 {
            return Err(Error::DegenerateData(
                "frame_ms must exceed hop_ms and both must be positive".into(),
            ));
        }
        if self.n_coeffs > self.n_filters || self.n_coeffs == 0 {
            return Err(Error::DegenerateData(
                "need 0 < n_coeffs <= n_filters".into(),
            ));
        }
        if self.cqt_bins_per_octave == 0 || self.cqt_octaves == 0 || self.cqcc_resample_period == 0
        {
            return Err(Error::DegenerateData("CQT parameters must be positive".into()));
        }
        Ok(())
    }

    /// The FFT constraint applies only to the filterbank front-ends; the CQT
    /// evaluates its kernels directly.
    fn validate_fft(&self, sample_rate_hz: u32) -> Result<()> {
        let frame = self.frame_samples(sample_rate_hz);
        if !self.fft_size.is_power_of_two() || self.fft_size < frame {
            return Err(Error::DegenerateData(format!(
                "fft_size {} must be a power of two >= frame length {}",
                self.fft_size, frame
            )));
        }
        Ok(())
    }

    pub fn frame_samples(&self, rate: u32) -> usize {
        (self.frame_ms * rate as f64 / 1000.0).round() as usize
    }

    pub fn hop_samples(&self, rate: u32) -> usize {
        (self.hop_ms * rate as f64 / 1000.0).round() as usize
    }
}

// --- DWT moment features ---

/// Concatenates (variance, skew, kurtosis) of CA_n, CD_n, ..., CD_1 into a
/// 3(n+1)-dimensional vector. Clips shorter than 2^n are decomposed at the
/// clamped level and zero-padded to the configured dimension, so the feature
/// dimension never varies.
pub fn dwt_moment_features(buf: &AudioBuffer, spec: &WaveletSpec) -> Result<FeatureVector> {
    let dec = dwt_multilevel(buf.samples(), spec)?;
    let want_dim = 3 * (spec.level + 1);
    let mut values = Vec::with_capacity(want_dim);
    for band in dec.subbands() {
        let m = moments(band)?;
        values.push(m.variance);
        values.push(m.skew);
        values.push(m.kurtosis);
    }
    values.resize(want_dim, 0.0);
    Ok(FeatureVector {
        scheme: Scheme::Dwt,
        values,
    })
}

// --- framing ---

fn frames_of(buf: &AudioBuffer, cfg: &CepstralConfig) -> Result<Vec<usize>> {
    let frame = cfg.frame_samples(buf.sample_rate_hz());
    let hop = cfg.hop_samples(buf.sample_rate_hz());
    if buf.len() < frame {
        return Err(Error::ClipTooShort {
            need: frame,
            got: buf.len(),
        });
    }
    Ok((0..=(buf.len() - frame) / hop).map(|k| k * hop).collect())
}

// --- triangular filterbanks ---

fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Filter edge frequencies (n_filters + 2 points spanning 0..Nyquist).
pub fn filterbank_edges_hz(scheme: Scheme, cfg: &CepstralConfig, rate: u32) -> Vec<f64> {
    let nyq = rate as f64 / 2.0;
    let n_pts = cfg.n_filters + 2;
    match scheme {
        Scheme::Mfcc => {
            let hi = hz_to_mel(nyq);
            (0..n_pts)
                .map(|i| mel_to_hz(hi * i as f64 / (n_pts - 1) as f64))
                .collect()
        }
        Scheme::Lfcc => (0..n_pts)
            .map(|i| nyq * i as f64 / (n_pts - 1) as f64)
            .collect(),
        _ => panic!("filterbank only defined for MFCC/LFCC"),
    }
}

/// Sparse (bin, weight) lists for each triangular filter.
fn triangular_filters(
    edges_hz: &[f64],
    fft_size: usize,
    rate: u32,
) -> Vec<Vec<(usize, f64)>> {
    let bin_hz = rate as f64 / fft_size as f64;
    let n_bins = fft_size / 2 + 1;
    let n_filters = edges_hz.len() - 2;
    (0..n_filters)
        .map(|f| {
            let (lo, center, hi) = (edges_hz[f], edges_hz[f + 1], edges_hz[f + 2]);
            let mut taps = Vec::new();
            let first = (lo / bin_hz).ceil() as usize;
            let last = ((hi / bin_hz).floor() as usize).min(n_bins - 1);
            for bin in first..=last {
                let freq = bin as f64 * bin_hz;
                let w = if freq <= center {
                    if center > lo {
                        (freq - lo) / (center - lo)
                    } else {
                        1.0
                    }
                } else if hi > center {
                    (hi - freq) / (hi - center)
                } else {
                    1.0
                };
                if w > 0.0 {
                    taps.push((bin, w));
                }
            }
            taps
        })
        .collect()
}

fn cepstra_via_filterbank(
    buf: &AudioBuffer,
    cfg: &CepstralConfig,
    scheme: Scheme,
) -> Result<FrameMatrix> {
    cfg.validate(buf.sample_rate_hz())?;
    cfg.validate_fft(buf.sample_rate_hz())?;
    let starts = frames_of(buf, cfg)?;
    let frame_len = cfg.frame_samples(buf.sample_rate_hz());
    let window = dsp::hamming(frame_len);
    let edges = filterbank_edges_hz(scheme, cfg, buf.sample_rate_hz());
    let filters = triangular_filters(&edges, cfg.fft_size, buf.sample_rate_hz());

    let x = buf.samples();
    let rows = starts
        .iter()
        .map(|&s| {
            let frame: Vec<f64> = x[s..s + frame_len]
                .iter()
                .zip(&window)
                .map(|(v, w)| v * w)
                .collect();
            let power = dsp::power_spectrum(&frame, cfg.fft_size);
            let log_energies: Vec<f64> = filters
                .iter()
                .map(|taps| {
                    let e: f64 = taps.iter().map(|&(b, w)| power[b] * w).sum();
                    e.max(LOG_FLOOR).ln()
                })
                .collect();
            dsp::dct2_orthonormal(&log_energies, cfg.n_coeffs)
        })
        .collect();
    Ok(rows)
}

/// Mel-frequency cepstral coefficients, one row per 25 ms frame.
pub fn mfcc(buf: &AudioBuffer, cfg: &CepstralConfig) -> Result<FrameMatrix> {
    cepstra_via_filterbank(buf, cfg, Scheme::Mfcc)
}

/// Linear-frequency cepstral coefficients; same shape as `mfcc`.
pub fn lfcc(buf: &AudioBuffer, cfg: &CepstralConfig) -> Result<FrameMatrix> {
    cepstra_via_filterbank(buf, cfg, Scheme::Lfcc)
}

// --- constant-Q transform ---

/// Geometric CQT center frequencies: f_min * 2^(k/B) with
/// f_min = Nyquist / 2^octaves, k = 0 .. octaves*B - 1.
pub fn cqt_center_frequencies(cfg: &CepstralConfig, rate: u32) -> Vec<f64> {
    let f_min = rate as f64 / 2.0 / 2f64.powi(cfg.cqt_octaves as i32);
    let n_bins = cfg.cqt_octaves * cfg.cqt_bins_per_octave;
    (0..n_bins)
        .map(|k| f_min * 2f64.powf(k as f64 / cfg.cqt_bins_per_octave as f64))
        .collect()
}

/// Constant-Q magnitudes at one analysis center via direct windowed complex
/// kernels. Kernels reaching past the clip see zeros. Both the oscillator
/// and the Hann window advance by phasor recurrence; the periodic Hann's
/// normalization sum over its full period is exactly N/2.
fn cqt_magnitudes_at(
    x: &[f64],
    center: usize,
    freqs: &[f64],
    q_factor: f64,
    rate: u32,
) -> Vec<f64> {
    let fs = rate as f64;
    freqs
        .iter()
        .map(|&f| {
            let n_k = (q_factor * fs / f).ceil() as usize;
            let half = (n_k / 2) as isize;
            let w_sum = n_k as f64 / 2.0;
            let lo = (center as isize - half).max(0) as usize;
            let hi = ((center as isize - half) + n_k as isize).min(x.len() as isize) as usize;
            if lo >= hi {
                return 0.0;
            }
            let start_off = (lo as isize - (center as isize - half)) as f64;

            let omega = 2.0 * PI * f / fs;
            let mut ph_re = (omega * (lo as f64 - center as f64)).cos();
            let mut ph_im = -(omega * (lo as f64 - center as f64)).sin();
            let (dr, di) = (omega.cos(), -omega.sin());

            let wstep = 2.0 * PI / n_k as f64;
            let mut wc = (wstep * start_off).cos();
            let mut ws = (wstep * start_off).sin();
            let (wdr, wdi) = (wstep.cos(), wstep.sin());

            let mut re = 0.0;
            let mut im = 0.0;
            for &v in &x[lo..hi] {
                let vw = v * (0.5 - 0.5 * wc);
                re += vw * ph_re;
                im += vw * ph_im;
                let nr = ph_re * dr - ph_im * di;
                ph_im = ph_re * di + ph_im * dr;
                ph_re = nr;
                let nw = wc * wdr - ws * wdi;
                ws = wc * wdi + ws * wdr;
                wc = nw;
            }
            2.0 * (re * re + im * im).sqrt() / w_sum
        })
        .collect()
}

/// Constant-Q cepstral coefficients: CQT log power on the geometric axis,
/// cubic-spline resampled to a uniform axis (step f_min / d), then DCT-II.
pub fn cqcc(buf: &AudioBuffer, cfg: &CepstralConfig) -> Result<FrameMatrix> {
    cfg.validate(buf.sample_rate_hz())?;
    let starts = frames_of(buf, cfg)?;
    let frame_len = cfg.frame_samples(buf.sample_rate_hz());
    let freqs = cqt_center_frequencies(cfg, buf.sample_rate_hz());
    let q_factor = 1.0 / (2f64.powf(1.0 / cfg.cqt_bins_per_octave as f64) - 1.0);

    let f_min = freqs[0];
    let f_max = *freqs.last().unwrap();
    let step = f_min / cfg.cqcc_resample_period as f64;
    let n_lin = ((f_max - f_min) / step).floor() as usize + 1;

    let rows = starts
        .iter()
        .map(|&s| {
            let center = s + frame_len / 2;
            let mags = cqt_magnitudes_at(
                buf.samples(),
                center,
                &freqs,
                q_factor,
                buf.sample_rate_hz(),
            );
            let log_power: Vec<f64> =
                mags.iter().map(|m| (m * m).max(LOG_FLOOR).ln()).collect();
            let spline = dsp::CubicSpline::fit(&freqs, &log_power);
            let uniform: Vec<f64> = (0..n_lin)
                .map(|j| spline.eval(f_min + j as f64 * step))
                .collect();
            dsp::dct2_orthonormal(&uniform, cfg.n_coeffs)
        })
        .collect();
    Ok(rows)
}

// --- clip-level aggregation ---

/// Per-coefficient mean and population standard deviation across frames,
/// concatenated: dim = 2 * n_coeffs.
pub fn aggregate_frames(frames: &FrameMatrix, scheme: Scheme) -> Result<FeatureVector> {
    if frames.is_empty() {
        return Err(Error::EmptyFrames);
    }
    let dim = frames[0].len();
    let n = frames.len() as f64;
    let mut mean = vec![0.0; dim];
    for row in frames {
        debug_assert_eq!(row.len(), dim);
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut std = vec![0.0; dim];
    for row in frames {
        for ((s, v), m) in std.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    std.iter_mut().for_each(|s| *s = (*s / n).sqrt());
    let mut values = mean;
    values.extend(std);
    Ok(FeatureVector { scheme, values })
}

/// Full clip-level featurization for any scheme.
pub fn featurize(
    buf: &AudioBuffer,
    scheme: Scheme,
    wavelet: &WaveletSpec,
    cepstral: &CepstralConfig,
) -> Result<FeatureVector> {
    match scheme {
        Scheme::Dwt => dwt_moment_features(buf, wavelet),
        Scheme::Mfcc => aggregate_frames(&mfcc(buf, cepstral)?, scheme),
        Scheme::Lfcc => aggregate_frames(&lfcc(buf, cepstral)?, scheme),
        Scheme::Cqcc => aggregate_frames(&cqcc(buf, cepstral)?, scheme),
    }
}

/// Welch-averaged magnitude spectrum in dB over 0..Nyquist.
pub fn log_spectrum(buf: &AudioBuffer) -> Result<Vec<(f64, f64)>> {
    if buf.is_empty() {
        return Err(Error::EmptyAudio);
    }
    Ok(dsp::welch_psd(buf.samples(), buf.sample_rate_hz(), 1024)
        .into_iter()
        .map(|(f, p)| (f, 10.0 * (p + 1e-20).log10()))
        .collect())
}

/// Mean level over a frequency band of a `log_spectrum` result, in dB.
pub fn band_mean_db(spectrum: &[(f64, f64)], low_hz: f64, high_hz: f64) -> f64 {
    let vals: Vec<f64> = spectrum
        .iter()
        .filter(|(f, _)| *f >= low_hz && *f < high_hz)
        .map(|(_, db)| *db)
        .collect();
    vals.iter().sum::<f64>() / vals.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::seeded_rng;
    use crate::dwt::WaveletFamily;
    use rand::Rng;

    fn tone(freq: f64, seconds: f64) -> AudioBuffer {
        let n = (16000.0 * seconds) as usize;
        AudioBuffer::new(
            (0..n)
                .map(|t| 0.5 * (2.0 * PI * freq * t as f64 / 16000.0).sin())
                .collect(),
            16000,
        )
        .unwrap()
    }

    fn noise(seed: u64, n: usize) -> AudioBuffer {
        let mut rng = seeded_rng(seed);
        AudioBuffer::new(
            (0..n).map(|_| rng.random::<f64>() * 1.6 - 0.8).collect(),
            16000,
        )
        .unwrap()
    }

    #[test]
    fn dwt_feature_dimension_is_3n_plus_3() {
        let spec = WaveletSpec::default();
        let fv = dwt_moment_features(&noise(1, 16000), &spec).unwrap();
        assert_eq!(fv.dim(), 18);
        assert_eq!(fv.scheme, Scheme::Dwt);
    }

    #[test]
    fn constant_clip_gives_zero_vector() {
        let buf = AudioBuffer::new(vec![0.25; 4096], 16000).unwrap();
        let fv = dwt_moment_features(&buf, &WaveletSpec::default()).unwrap();
        assert!(fv.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dwt_features_match_compositional_oracle() {
        let spec = WaveletSpec {
            family: WaveletFamily::Haar,
            level: 2,
            ..Default::default()
        };
        let buf = noise(8, 4000);
        let fv = dwt_moment_features(&buf, &spec).unwrap();
        let dec = dwt_multilevel(buf.samples(), &spec).unwrap();
        let mut expect = Vec::new();
        for band in dec.subbands() {
            let m = moments(band).unwrap();
            expect.extend([m.variance, m.skew, m.kurtosis]);
        }
        assert_eq!(fv.values, expect);
    }

    #[test]
    fn short_clip_pads_to_constant_dimension() {
        let spec = WaveletSpec::default(); // level 5 wants 32+ samples
        let buf = noise(2, 20);
        let fv = dwt_moment_features(&buf, &spec).unwrap();
        assert_eq!(fv.dim(), 18);
        // clamped to level 4 -> 15 real entries + 3 zeros
        assert_eq!(&fv.values[15..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn amplitude_scaling_touches_only_variance_entries() {
        let spec = WaveletSpec::default();
        let buf = noise(3, 8192);
        let scaled = AudioBuffer::new(
            buf.samples().iter().map(|v| v * 0.5).collect(),
            16000,
        )
        .unwrap();
        let a = dwt_moment_features(&buf, &spec).unwrap();
        let b = dwt_moment_features(&scaled, &spec).unwrap();
        for i in 0..a.dim() {
            if i % 3 == 0 {
                assert!((b.values[i] - 0.25 * a.values[i]).abs() < 1e-9 * a.values[i].abs());
            } else {
                assert!((a.values[i] - b.values[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mfcc_frame_count_for_one_second() {
        let rows = mfcc(&tone(1000.0, 1.0), &CepstralConfig::default()).unwrap();
        assert_eq!(rows.len(), 98); // floor((16000-400)/160) + 1
        assert_eq!(rows[0].len(), 20);
    }

    #[test]
    fn mfcc_peak_filter_tracks_tone() {
        let cfg = CepstralConfig::default();
        let buf = tone(1000.0, 1.0);
        // recompute filter energies directly to locate the peak filter
        let edges = filterbank_edges_hz(Scheme::Mfcc, &cfg, 16000);
        let filters = triangular_filters(&edges, cfg.fft_size, 16000);
        let frame_len = cfg.frame_samples(16000);
        let window = dsp::hamming(frame_len);
        let mut mean_log = vec![0.0; cfg.n_filters];
        let starts = frames_of(&buf, &cfg).unwrap();
        for &s in &starts {
            let frame: Vec<f64> = buf.samples()[s..s + frame_len]
                .iter()
                .zip(&window)
                .map(|(v, w)| v * w)
                .collect();
            let p = dsp::power_spectrum(&frame, cfg.fft_size);
            for (acc, taps) in mean_log.iter_mut().zip(&filters) {
                let e: f64 = taps.iter().map(|&(b, w)| p[b] * w).sum();
                *acc += e.max(LOG_FLOOR).ln();
            }
        }
        let peak = mean_log
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let nearest = edges[1..=cfg.n_filters]
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - 1000.0)
                    .abs()
                    .partial_cmp(&(b.1 - 1000.0).abs())
                    .unwrap()
            })
            .unwrap()
            .0;
        assert_eq!(peak, nearest);
    }

    #[test]
    fn silence_yields_floored_energies_and_zero_higher_coeffs() {
        let cfg = CepstralConfig::default();
        let buf = AudioBuffer::new(vec![0.0; 16000], 16000).unwrap();
        let rows = mfcc(&buf, &cfg).unwrap();
        for row in &rows {
            assert!(row.iter().all(|v| v.is_finite()));
            // log energies all equal log(floor) -> DCT coefficients 1.. vanish
            for &c in &row[1..] {
                assert!(c.abs() < 1e-9);
            }
        }
        // every front-end is energy-floored: silence never yields NaN/-inf
        for row in lfcc(&buf, &cfg).unwrap() {
            assert!(row.iter().all(|v| v.is_finite()));
        }
        let coarse = CepstralConfig {
            frame_ms: 500.0,
            hop_ms: 250.0,
            ..cfg
        };
        for row in cqcc(&buf, &coarse).unwrap() {
            assert!(row.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn lfcc_centers_equally_spaced_and_shape_matches_mfcc() {
        let cfg = CepstralConfig::default();
        let edges = filterbank_edges_hz(Scheme::Lfcc, &cfg, 16000);
        let centers = &edges[1..=cfg.n_filters];
        let gap = centers[1] - centers[0];
        for w in centers.windows(2) {
            assert!((w[1] - w[0] - gap).abs() < 1e-9);
        }
        let buf = tone(1000.0, 0.5);
        let a = mfcc(&buf, &cfg).unwrap();
        let b = lfcc(&buf, &cfg).unwrap();
        assert_eq!(a.len(), b.len());
        assert_eq!(a[0].len(), b[0].len());
    }

    #[test]
    fn lfcc_peak_filter_near_one_khz() {
        let cfg = CepstralConfig::default();
        let buf = tone(1000.0, 0.5);
        let edges = filterbank_edges_hz(Scheme::Lfcc, &cfg, 16000);
        let filters = triangular_filters(&edges, cfg.fft_size, 16000);
        let frame_len = cfg.frame_samples(16000);
        let window = dsp::hamming(frame_len);
        let frame: Vec<f64> = buf.samples()[..frame_len]
            .iter()
            .zip(&window)
            .map(|(v, w)| v * w)
            .collect();
        let p = dsp::power_spectrum(&frame, cfg.fft_size);
        let peak = filters
            .iter()
            .map(|taps| taps.iter().map(|&(b, w)| p[b] * w).sum::<f64>())
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap()
            .0;
        // filter i (0-based) has its center at (i+1) * 8000/27, so the tone
        // sits between the filters either side of 1000/(8000/27) ~ 3.375
        let expect = 1000.0 / (8000.0 / (cfg.n_filters + 1) as f64) - 1.0;
        assert!(
            (peak as f64 - expect).abs() <= 1.0,
            "peak {peak}, expect within 1 of {expect}"
        );
    }

    #[test]
    fn cqt_centers_are_geometric() {
        let cfg = CepstralConfig::default();
        let freqs = cqt_center_frequencies(&cfg, 16000);
        assert_eq!(freqs.len(), cfg.cqt_octaves * cfg.cqt_bins_per_octave);
        assert!((freqs[0] - 8000.0 / 512.0).abs() < 1e-9);
        let ratio = 2f64.powf(1.0 / cfg.cqt_bins_per_octave as f64);
        for w in freqs.windows(2) {
            assert!((w[1] / w[0] - ratio).abs() < 1e-9);
        }
    }

    #[test]
    fn cqt_tone_peaks_at_its_bin() {
        let cfg = CepstralConfig::default();
        let freqs = cqt_center_frequencies(&cfg, 16000);
        let q = 1.0 / (2f64.powf(1.0 / cfg.cqt_bins_per_octave as f64) - 1.0);
        // a bin near 1 kHz
        let k = freqs
            .iter()
            .position(|&f| f > 1000.0)
            .unwrap();
        let buf = tone(freqs[k], 1.0);
        let mags = cqt_magnitudes_at(buf.samples(), 8000, &freqs, q, 16000);
        let peak = mags
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(peak, k);
        // amplitude-normalized magnitude should be close to the tone amplitude
        assert!((mags[k] - 0.5).abs() < 0.05, "mag {}", mags[k]);
    }

    #[test]
    fn cqcc_row_dimension() {
        let cfg = CepstralConfig {
            hop_ms: 200.0,
            frame_ms: 400.0,
            fft_size: 8192,
            ..Default::default()
        };
        let rows = cqcc(&tone(440.0, 1.0), &cfg).unwrap();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.len() == 20));
    }

    #[test]
    fn aggregate_single_frame_and_pairs() {
        let one = vec![vec![1.0, 2.0, 3.0]];
        let fv = aggregate_frames(&one, Scheme::Mfcc).unwrap();
        assert_eq!(fv.values, vec![1.0, 2.0, 3.0, 0.0, 0.0, 0.0]);

        let same = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        let fv = aggregate_frames(&same, Scheme::Mfcc).unwrap();
        assert_eq!(&fv.values[2..], &[0.0, 0.0]);

        let pair = vec![vec![0.0], vec![2.0]];
        let fv = aggregate_frames(&pair, Scheme::Mfcc).unwrap();
        assert_eq!(fv.values, vec![1.0, 1.0]);

        assert!(matches!(
            aggregate_frames(&Vec::new(), Scheme::Mfcc),
            Err(Error::EmptyFrames)
        ));
    }

    #[test]
    fn clip_too_short_for_one_frame() {
        let buf = AudioBuffer::new(vec![0.1; 100], 16000).unwrap();
        assert!(matches!(
            mfcc(&buf, &CepstralConfig::default()),
            Err(Error::ClipTooShort { .. })
        ));
    }

    #[test]
    fn log_spectrum_peak_tracks_tone() {
        let spec = log_spectrum(&tone(1000.0, 1.0)).unwrap();
        let peak = spec
            .iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let bin = 16000.0 / 1024.0;
        assert!((peak.0 - 1000.0).abs() <= bin + 1e-9);
    }

    #[test]
    fn white_noise_spectrum_is_flat_above_100hz() {
        let spec = log_spectrum(&noise(77, 64000)).unwrap();
        let vals: Vec<f64> = spec
            .iter()
            .filter(|(f, _)| *f > 100.0)
            .map(|(_, db)| *db)
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        for v in vals {
            assert!((v - mean).abs() < 3.0, "deviation {} dB", (v - mean).abs());
        }
    }

    #[test]
    fn featurize_is_deterministic() {
        let buf = noise(5, 16000);
        let w = WaveletSpec::default();
        let c = CepstralConfig::default();
        for scheme in [Scheme::Dwt, Scheme::Mfcc, Scheme::Lfcc] {
            let a = featurize(&buf, scheme, &w, &c).unwrap();
            let b = featurize(&buf, scheme, &w, &c).unwrap();
            assert_eq!(a, b);
        }
    }
}
