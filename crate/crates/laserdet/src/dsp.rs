//! Shared signal-processing primitives: FFT, windows, DCT, IIR/FIR filters,
//! Welch spectra, spline interpolation and seeded Gaussian noise.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// In-place radix-2 Cooley-Tukey FFT. `re.len()` must be a power of two.
pub fn fft_in_place(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    debug_assert!(n.is_power_of_two());
    debug_assert_eq!(n, im.len());

    // bit-reversal permutation
    let mut j = 0usize;
    for i in 0..n {
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
        let mut m = n >> 1;
        while m >= 1 && j & m != 0 {
            j ^= m;
            m >>= 1;
        }
        j |= m;
    }

    let mut len = 2;
    while len <= n {
        let ang = -2.0 * PI / len as f64;
        let (wr, wi) = (ang.cos(), ang.sin());
        let mut start = 0;
        while start < n {
            let (mut cr, mut ci) = (1.0f64, 0.0f64);
            for k in 0..len / 2 {
                let (ur, ui) = (re[start + k], im[start + k]);
                let (vr, vi) = (
                    re[start + k + len / 2] * cr - im[start + k + len / 2] * ci,
                    re[start + k + len / 2] * ci + im[start + k + len / 2] * cr,
                );
                re[start + k] = ur + vr;
                im[start + k] = ui + vi;
                re[start + k + len / 2] = ur - vr;
                im[start + k + len / 2] = ui - vi;
                let ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
            start += len;
        }
        len <<= 1;
    }
}

/// One-sided power spectrum |X_k|^2 for k = 0..=n/2 of a real frame,
/// zero-padded to `fft_size` (power of two, >= frame length).
pub fn power_spectrum(frame: &[f64], fft_size: usize) -> Vec<f64> {
    debug_assert!(fft_size.is_power_of_two() && fft_size >= frame.len());
    let mut re = vec![0.0; fft_size];
    let mut im = vec![0.0; fft_size];
    re[..frame.len()].copy_from_slice(frame);
    fft_in_place(&mut re, &mut im);
    (0..=fft_size / 2)
        .map(|k| re[k] * re[k] + im[k] * im[k])
        .collect()
}

pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

pub fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// Orthonormal DCT-II of `input`, truncated to the first `n_out` coefficients.
pub fn dct2_orthonormal(input: &[f64], n_out: usize) -> Vec<f64> {
    let n = input.len();
    debug_assert!(n_out <= n && n > 0);
    let mut out = Vec::with_capacity(n_out);
    for k in 0..n_out {
        let mut sum = 0.0;
        for (i, &v) in input.iter().enumerate() {
            sum += v * (PI * k as f64 * (i as f64 + 0.5) / n as f64).cos();
        }
        let scale = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        out.push(sum * scale);
    }
    out
}

/// Second-order IIR section in direct form II transposed.
#[derive(Debug, Clone, Copy)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    fn process(&self, x: &[f64]) -> Vec<f64> {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        x.iter()
            .map(|&xi| {
                let y = self.b0 * xi + s1;
                s1 = self.b1 * xi - self.a1 * y + s2;
                s2 = self.b2 * xi - self.a2 * y;
                y
            })
            .collect()
    }
}

/// Even-order Butterworth filter as a cascade of biquads (bilinear transform).
#[derive(Debug, Clone)]
pub struct Butterworth {
    sections: Vec<Biquad>,
}

impl Butterworth {
    /// `order` must be even and >= 2; `cutoff_hz` in (0, fs/2).
    pub fn lowpass(order: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Self {
        Self::design(order, cutoff_hz, sample_rate_hz, false)
    }

    pub fn highpass(order: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Self {
        Self::design(order, cutoff_hz, sample_rate_hz, true)
    }

    fn design(order: usize, cutoff_hz: f64, fs: f64, high: bool) -> Self {
        assert!(order >= 2 && order.is_multiple_of(2), "order must be even");
        assert!(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0);
        // prewarped analog cutoff
        let wc = (PI * cutoff_hz / fs).tan();
        let sections = (0..order / 2)
            .map(|k| {
                let q = 1.0 / (2.0 * ((2 * k + 1) as f64 * PI / (2.0 * order as f64)).sin());
                let (wc2, a0) = (wc * wc, 1.0 + wc / q + wc * wc);
                if !high {
                    Biquad {
                        b0: wc2 / a0,
                        b1: 2.0 * wc2 / a0,
                        b2: wc2 / a0,
                        a1: 2.0 * (wc2 - 1.0) / a0,
                        a2: (1.0 - wc / q + wc2) / a0,
                    }
                } else {
                    Biquad {
                        b0: 1.0 / a0,
                        b1: -2.0 / a0,
                        b2: 1.0 / a0,
                        a1: 2.0 * (wc2 - 1.0) / a0,
                        a2: (1.0 - wc / q + wc2) / a0,
                    }
                }
            })
            .collect();
        Butterworth { sections }
    }

    /// Filters from zero initial state (deterministic).
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for s in &self.sections {
            y = s.process(&y);
        }
        y
    }
}

/// Linear-phase windowed-sinc band-pass FIR design (Blackman window).
/// `low_hz == 0` degenerates to a low-pass; `high_hz == fs/2` to a high-pass.
pub fn fir_bandpass(taps: usize, low_hz: f64, high_hz: f64, fs: f64) -> Vec<f64> {
    assert!(taps % 2 == 1, "taps must be odd for a symmetric kernel");
    let mid = (taps / 2) as isize;
    let (fl, fh) = (low_hz / fs, high_hz / fs);
    let sinc = |x: f64| {
        if x.abs() < 1e-12 {
            1.0
        } else {
            (PI * x).sin() / (PI * x)
        }
    };
    (0..taps as isize)
        .map(|i| {
            let m = (i - mid) as f64;
            let ideal = 2.0 * fh * sinc(2.0 * fh * m) - 2.0 * fl * sinc(2.0 * fl * m);
            let w = 0.42 - 0.5 * (2.0 * PI * i as f64 / (taps - 1) as f64).cos()
                + 0.08 * (4.0 * PI * i as f64 / (taps - 1) as f64).cos();
            ideal * w
        })
        .collect()
}

/// Convolution returning a signal aligned with the input (the kernel's group
/// delay of (len-1)/2 is compensated; kernel length must be odd).
pub fn convolve_same(x: &[f64], kernel: &[f64]) -> Vec<f64> {
    let half = (kernel.len() / 2) as isize;
    (0..x.len() as isize)
        .map(|t| {
            let mut acc = 0.0;
            for (j, &k) in kernel.iter().enumerate() {
                let idx = t + j as isize - half;
                if idx >= 0 && (idx as usize) < x.len() {
                    acc += x[idx as usize] * k;
                }
            }
            acc
        })
        .collect()
}

pub fn convolve_full(x: &[f64], h: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len() + h.len() - 1];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        for (j, &hj) in h.iter().enumerate() {
            y[i + j] += xi * hj;
        }
    }
    y
}

/// Welch-averaged one-sided power spectral density, returned as
/// (frequency_hz, power) pairs. Hann window, 50% overlap.
pub fn welch_psd(x: &[f64], sample_rate_hz: u32, segment_len: usize) -> Vec<(f64, f64)> {
    let seg = segment_len.min(x.len().next_power_of_two()).max(8);
    let seg = if seg > x.len() {
        // largest power of two not exceeding the signal
        let mut s = 8;
        while s * 2 <= x.len() {
            s *= 2;
        }
        s.min(segment_len)
    } else {
        seg
    };
    let hop = seg / 2;
    let window = hann(seg);
    let wnorm: f64 = window.iter().map(|w| w * w).sum();
    let mut acc = vec![0.0; seg / 2 + 1];
    let mut count = 0usize;
    let mut start = 0usize;
    while start + seg <= x.len() {
        let frame: Vec<f64> = x[start..start + seg]
            .iter()
            .zip(&window)
            .map(|(a, w)| a * w)
            .collect();
        for (a, p) in acc.iter_mut().zip(power_spectrum(&frame, seg)) {
            *a += p;
        }
        count += 1;
        start += hop;
    }
    if count == 0 {
        // signal shorter than one segment: single zero-padded frame
        let frame: Vec<f64> = x
            .iter()
            .zip(&window)
            .map(|(a, w)| a * w)
            .chain(std::iter::repeat(0.0))
            .take(seg)
            .collect();
        for (a, p) in acc.iter_mut().zip(power_spectrum(&frame, seg)) {
            *a += p;
        }
        count = 1;
    }
    let scale = 1.0 / (count as f64 * wnorm);
    acc.iter()
        .enumerate()
        .map(|(k, &p)| {
            (
                k as f64 * sample_rate_hz as f64 / seg as f64,
                p * scale,
            )
        })
        .collect()
}

/// Natural cubic spline through (xs, ys); xs strictly increasing.
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    pub fn fit(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        assert!(n >= 3 && n == ys.len());
        // tridiagonal solve for second derivatives, natural boundary
        let mut sub = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            sub[i] = h0;
            diag[i] = 2.0 * (h0 + h1);
            sup[i] = h1;
            rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        // Thomas algorithm
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut second = vec![0.0; n];
        second[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            second[i] = (rhs[i] - sup[i] * second[i + 1]) / diag[i];
        }
        CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            second,
        }
    }

    /// Evaluates at `x`, clamped to the fitted range.
    pub fn eval(&self, x: f64) -> f64 {
        let xs = &self.xs;
        let x = x.clamp(xs[0], xs[xs.len() - 1]);
        let i = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(xs.len() - 2),
        };
        let h = xs[i + 1] - xs[i];
        let a = (xs[i + 1] - x) / h;
        let b = (x - xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / 6.0
    }
}

/// Deterministic seeded RNG used throughout the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes structured sub-stream identifiers into a master seed (splitmix-style),
/// so per-clip streams are independent and order-insensitive.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut z = master ^ 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        z = z.wrapping_add(p).wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

/// `n` standard normal deviates via Box-Muller on the given stream.
pub fn gaussians(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        let th = 2.0 * PI * u2;
        out.push(r * th.cos());
        if out.len() < n {
            out.push(r * th.sin());
        }
    }
    out
}

/// Error function, Abramowitz & Stegun 7.1.26 (|err| < 1.5e-7).
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}
