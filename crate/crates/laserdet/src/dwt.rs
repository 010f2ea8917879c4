//! Multilevel discrete wavelet transform filter bank and its inverse.
//!
//! An n-level decomposition splits a clip into n+1 octave subbands: one
//! approximation array `CA_n` (lowest band) and detail arrays `CD_n..CD_1`
//! (coarsest to finest). At 16 kHz with n = 5 the bands are
//! CA_5: 0-250 Hz, CD_5: 250-500, CD_4: 500-1000, CD_3: 1-2 kHz,
//! CD_2: 2-4 kHz, CD_1: 4-8 kHz.

use crate::error::{Error, Result};

/// Haar analysis low-pass filter.
const HAAR_LO: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

/// Daubechies-4 (8-tap, 4 vanishing moments) analysis low-pass filter.
const DB4_LO: [f64; 8] = [
    0.230_377_813_308_855_23,
    0.714_846_570_552_541_5,
    0.630_880_767_929_590_4,
    -0.027_983_769_416_983_85,
    -0.187_034_811_718_881_14,
    0.030_841_381_835_986_965,
    0.032_883_011_666_982_945,
    -0.010_597_401_784_997_278,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WaveletFamily {
    Haar,
    #[default]
    Db4,
}

impl WaveletFamily {
    /// Analysis low-pass taps.
    pub fn lowpass(&self) -> &'static [f64] {
        match self {
            WaveletFamily::Haar => &HAAR_LO,
            WaveletFamily::Db4 => &DB4_LO,
        }
    }

    /// Quadrature mirror high-pass: `g[i] = (-1)^i h[L-1-i]`.
    pub fn highpass(&self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|i| if i % 2 == 0 { h[l - 1 - i] } else { -h[l - 1 - i] })
            .collect()
    }

    pub fn filter_len(&self) -> usize {
        self.lowpass().len()
    }

    pub fn name(&self) -> &'static str {
        match self {
            WaveletFamily::Haar => "haar",
            WaveletFamily::Db4 => "db4",
        }
    }
}

impl std::str::FromStr for WaveletFamily {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "haar" => Ok(WaveletFamily::Haar),
            "db4" | "daubechies4" | "daubechies-4" => Ok(WaveletFamily::Db4),
            other => Err(format!("unknown wavelet family {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Half-sample reflection; the default for feature extraction.
    #[default]
    Symmetric,
    /// Zeros outside the signal; makes the transform exactly energy-preserving.
    ZeroPad,
}

impl std::str::FromStr for Boundary {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "symmetric" | "sym" => Ok(Boundary::Symmetric),
            "zero" | "zero-pad" | "zeropad" => Ok(Boundary::ZeroPad),
            other => Err(format!("unknown boundary mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletSpec {
    pub family: WaveletFamily,
    /// Decomposition level n (>= 1).
    pub level: usize,
    pub boundary: Boundary,
    /// Clamp the level to floor(log2(len)) for short clips instead of failing.
    pub clamp_level: bool,
}

impl Default for WaveletSpec {
    fn default() -> Self {
        WaveletSpec {
            family: WaveletFamily::Db4,
            level: 5,
            boundary: Boundary::Symmetric,
            clamp_level: true,
        }
    }
}

/// Output of `dwt_multilevel`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    /// Approximation coefficients CA_n.
    pub approx: Vec<f64>,
    /// Detail coefficients ordered [CD_n, ..., CD_1].
    pub details: Vec<Vec<f64>>,
    pub spec: WaveletSpec,
    /// Length of the analyzed signal.
    pub input_len: usize,
}

impl WaveletDecomposition {
    /// Effective decomposition level (equals `spec.level` unless clamped).
    pub fn level(&self) -> usize {
        self.details.len()
    }

    pub fn was_clamped(&self) -> bool {
        self.details.len() < self.spec.level
    }

    /// Subbands in feature order: CA_n first, then CD_n .. CD_1.
    pub fn subbands(&self) -> impl Iterator<Item = &[f64]> {
        std::iter::once(self.approx.as_slice()).chain(self.details.iter().map(|d| d.as_slice()))
    }

    pub fn total_energy(&self) -> f64 {
        self.subbands()
            .map(|b| b.iter().map(|c| c * c).sum::<f64>())
            .sum()
    }
}

/// Half-sample symmetric reflection of an arbitrary index into [0, n).
fn reflect(mut idx: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    idx = idx.rem_euclid(period);
    if idx < n as isize {
        idx as usize
    } else {
        (period - 1 - idx) as usize
    }
}

#[inline]
fn sample_at(x: &[f64], idx: isize, boundary: Boundary) -> f64 {
    if idx >= 0 && (idx as usize) < x.len() {
        x[idx as usize]
    } else {
        match boundary {
            Boundary::ZeroPad => 0.0,
            Boundary::Symmetric => x[reflect(idx, x.len())],
        }
    }
}

/// Coefficient count of one analysis level for input length `n`.
fn level_len(n: usize, filter_len: usize) -> usize {
    (n + filter_len - 1) / 2
}

/// Single analysis step: correlate with the low/high filters at even lags,
/// keeping every lag whose support overlaps the signal.
fn analyze_level(x: &[f64], lo: &[f64], hi: &[f64], boundary: Boundary) -> (Vec<f64>, Vec<f64>) {
    let l = lo.len();
    let m = level_len(x.len(), l);
    let mut approx = Vec::with_capacity(m);
    let mut detail = Vec::with_capacity(m);
    for k in 0..m {
        let start = 2 * k as isize - (l as isize - 2);
        let mut a = 0.0;
        let mut d = 0.0;
        if start >= 0 && start as usize + l <= x.len() {
            // interior: no boundary handling needed
            let seg = &x[start as usize..start as usize + l];
            for i in 0..l {
                a += seg[i] * lo[i];
                d += seg[i] * hi[i];
            }
        } else {
            for i in 0..l {
                let v = sample_at(x, start + i as isize, boundary);
                a += v * lo[i];
                d += v * hi[i];
            }
        }
        approx.push(a);
        detail.push(d);
    }
    (approx, detail)
}

/// Single synthesis step (adjoint of the analysis), cropped to `n_out`.
fn synthesize_level(approx: &[f64], detail: &[f64], lo: &[f64], hi: &[f64], n_out: usize) -> Vec<f64> {
    let l = lo.len();
    let m = approx.len();
    let mut buf = vec![0.0; 2 * (m.max(1) - 1) + l];
    for k in 0..m {
        let (a, d) = (approx[k], detail[k]);
        for i in 0..l {
            buf[2 * k + i] += a * lo[i] + d * hi[i];
        }
    }
    let offset = l - 2;
    (0..n_out).map(|t| buf.get(t + offset).copied().unwrap_or(0.0)).collect()
}

/// Cascades `spec.level` analysis steps, feeding the approximation forward.
///
/// Clips shorter than 2^n clamp the level to floor(log2(len)) when
/// `spec.clamp_level` is set; `WaveletDecomposition::was_clamped` reports it.
pub fn dwt_multilevel(samples: &[f64], spec: &WaveletSpec) -> Result<WaveletDecomposition> {
    if spec.level == 0 {
        return Err(Error::InvalidLevel);
    }
    if samples.len() < 2 {
        return Err(Error::SignalTooShort {
            len: samples.len(),
            level: spec.level,
        });
    }
    let max_level = samples.len().ilog2() as usize;
    let level = if spec.level >= usize::BITS as usize || samples.len() < (1usize << spec.level) {
        if !spec.clamp_level {
            return Err(Error::SignalTooShort {
                len: samples.len(),
                level: spec.level,
            });
        }
        max_level
    } else {
        spec.level
    };

    let lo = spec.family.lowpass();
    let hi = spec.family.highpass();
    let mut details_fine_first = Vec::with_capacity(level);
    let mut current = samples.to_vec();
    for _ in 0..level {
        let (a, d) = analyze_level(&current, lo, &hi, spec.boundary);
        details_fine_first.push(d);
        current = a;
    }
    details_fine_first.reverse(); // now [CD_n, ..., CD_1]
    Ok(WaveletDecomposition {
        approx: current,
        details: details_fine_first,
        spec: *spec,
        input_len: samples.len(),
    })
}

/// Inverse transform reconstructing a signal of `original_len` samples.
pub fn idwt_multilevel(dec: &WaveletDecomposition, original_len: usize) -> Result<Vec<f64>> {
    let n = dec.details.len();
    if n == 0 {
        return Err(Error::InconsistentShapes("no detail arrays".into()));
    }
    let flen = dec.spec.family.filter_len();

    // expected per-level lengths from the original length
    let mut lens = Vec::with_capacity(n + 1);
    lens.push(original_len);
    for j in 0..n {
        lens.push(level_len(lens[j], flen));
    }
    if dec.approx.len() != lens[n] {
        return Err(Error::InconsistentShapes(format!(
            "approx has {} coefficients, expected {}",
            dec.approx.len(),
            lens[n]
        )));
    }
    for (j, d) in dec.details.iter().enumerate() {
        let expect = lens[n - j];
        if d.len() != expect {
            return Err(Error::InconsistentShapes(format!(
                "detail level {} has {} coefficients, expected {}",
                n - j,
                d.len(),
                expect
            )));
        }
    }

    let lo = dec.spec.family.lowpass();
    let hi = dec.spec.family.highpass();
    let mut current = dec.approx.clone();
    for (j, detail) in dec.details.iter().enumerate() {
        let n_out = lens[n - j - 1];
        current = synthesize_level(&current, detail, lo, &hi, n_out);
    }
    Ok(current)
}
