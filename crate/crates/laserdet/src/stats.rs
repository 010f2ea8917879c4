//! Higher-order moments of coefficient arrays and exploratory distribution
//! fits (Cauchy / Lognormal) with a Kolmogorov-Smirnov goodness score.

use crate::dsp::normal_cdf;
use crate::error::{Error, Result};

/// Population central moments of one subband: variance, skew, excess kurtosis.
///
/// Degenerate arrays (zero variance) report (variance 0, skew 0, kurtosis 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub variance: f64,
    pub skew: f64,
    pub kurtosis: f64,
}

impl MomentSet {
    pub const ZERO: MomentSet = MomentSet {
        variance: 0.0,
        skew: 0.0,
        kurtosis: 0.0,
    };
}

/// One-pass streaming computation of the first four central moments
/// (updating formulas), normalized by N.
pub fn moments(xs: &[f64]) -> Result<MomentSet> {
    if xs.is_empty() {
        return Err(Error::EmptyArray);
    }
    let mut n = 0.0f64;
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut m3 = 0.0f64;
    let mut m4 = 0.0f64;
    for &x in xs {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        let n1 = n;
        n += 1.0;
        let delta = x - mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        mean += delta_n;
        m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3;
        m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
        m2 += term1;
    }

    let variance = m2 / n;
    // guard against catastrophic cancellation on (near-)constant arrays
    let degenerate = variance <= 0.0 || xs.iter().all(|&x| x == xs[0]);
    if degenerate {
        return Ok(MomentSet::ZERO);
    }
    let central3 = m3 / n;
    let central4 = m4 / n;
    Ok(MomentSet {
        variance,
        skew: central3 / variance.powf(1.5),
        kurtosis: central4 / (variance * variance) - 3.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    Cauchy,
    Lognormal,
}

/// A fitted distribution and its KS distance to the empirical CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionFit {
    pub kind: FitKind,
    /// Cauchy: location. Lognormal: mu of log-magnitudes.
    pub location: f64,
    /// Cauchy: scale (> 0). Lognormal: sigma of log-magnitudes (> 0).
    pub scale: f64,
    /// Kolmogorov-Smirnov statistic in [0, 1].
    pub goodness: f64,
}

/// Linear-interpolation quantile (the common statistical-package default).
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x).clamp(0.0, 1.0);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Fits the requested family by robust quantile (Cauchy) or log-moment
/// (Lognormal, on |x| + machine epsilon) estimators.
pub fn fit_distribution(xs: &[f64], kind: FitKind) -> Result<DistributionFit> {
    const MIN_SAMPLES: usize = 8;
    if xs.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            need: MIN_SAMPLES,
            got: xs.len(),
        });
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput);
    }

    match kind {
        FitKind::Cauchy => {
            let mut sorted = xs.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let location = quantile(&sorted, 0.5);
            let scale = (quantile(&sorted, 0.75) - quantile(&sorted, 0.25)) / 2.0;
            if scale <= 0.0 {
                return Err(Error::DegenerateData("interquartile range is zero".into()));
            }
            let goodness = ks_statistic(&sorted, |x| {
                ((x - location) / scale).atan() / std::f64::consts::PI + 0.5
            });
            Ok(DistributionFit {
                kind,
                location,
                scale,
                goodness,
            })
        }
        FitKind::Lognormal => {
            let mut mags: Vec<f64> = xs.iter().map(|x| x.abs() + f64::EPSILON).collect();
            mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let logs: Vec<f64> = mags.iter().map(|m| m.ln()).collect();
            let n = logs.len() as f64;
            let mu = logs.iter().sum::<f64>() / n;
            let var = logs.iter().map(|l| (l - mu) * (l - mu)).sum::<f64>() / n;
            let sigma = var.sqrt();
            if sigma <= 0.0 || logs.iter().all(|&l| l == logs[0]) {
                return Err(Error::DegenerateData("log-magnitudes are constant".into()));
            }
            let goodness = ks_statistic(&mags, |x| normal_cdf((x.ln() - mu) / sigma));
            Ok(DistributionFit {
                kind,
                location: mu,
                scale: sigma,
                goodness,
            })
        }
    }
}
