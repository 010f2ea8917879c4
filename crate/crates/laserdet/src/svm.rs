//! Binary soft-margin SVM with an RBF kernel, trained by SMO-style pairwise
//! coordinate ascent on the dual (maximal-violating-pair working set).
//!
//! Labels are +1 (laser) / -1 (acoustic). Ties at score exactly 0 classify
//! as +1: the detector fails closed on the attack class.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::Scheme;

const MODEL_MAGIC: &[u8; 8] = b"LDSVM001";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaMode {
    /// 1 / (dim * pooled variance of the training matrix).
    Scale,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub c: f64,
    pub gamma: GammaMode,
    pub kkt_tol: f64,
    /// Cap on pairwise updates; hitting it returns the model unconverged.
    pub max_iters: usize,
    pub standardize: bool,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            gamma: GammaMode::Scale,
            kkt_tol: 1e-3,
            max_iters: 500_000,
            standardize: true,
        }
    }
}

/// Per-dimension z-score statistics fitted on training data only.
/// Zero-variance dimensions store std = 1 so they pass through unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let dim = x[0].len();
        let n = x.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for row in x {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .iter()
            .map(|&v| {
                let s = (v / n).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, std }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub scheme: Scheme,
    pub dim: usize,
    pub gamma: f64,
    pub c: f64,
    pub bias: f64,
    pub standardizer: Option<Standardizer>,
    /// Rows are the retained (standardized) support vectors.
    pub support_vectors: Vec<Vec<f64>>,
    /// alpha_i * y_i per retained vector.
    pub dual_coeffs: Vec<f64>,
    /// False when training stopped at the iteration cap.
    pub converged: bool,
}

fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
    (-gamma * d2).exp()
}

/// Trains on rows `x` with labels `y` in {-1, +1}.
pub fn train(x: &[Vec<f64>], y: &[i8], scheme: Scheme, cfg: &SvmConfig) -> Result<SvmModel> {
    assert!(cfg.c > 0.0 && cfg.kkt_tol > 0.0);
    let n = x.len();
    if n == 0 || y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let dim = x[0].len();
    for (i, row) in x.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature(i));
        }
    }
    if !y.contains(&1) || !y.contains(&-1) {
        return Err(Error::SingleClassData);
    }

    let standardizer = cfg.standardize.then(|| Standardizer::fit(x));
    let xs: Vec<Vec<f64>> = match &standardizer {
        Some(s) => x.iter().map(|r| s.apply(r)).collect(),
        None => x.to_vec(),
    };

    let gamma = match cfg.gamma {
        GammaMode::Fixed(g) => {
            assert!(g > 0.0);
            g
        }
        GammaMode::Scale => {
            // pooled variance over every entry of the (standardized) matrix
            let total = (n * dim) as f64;
            let mean: f64 = xs.iter().flatten().sum::<f64>() / total;
            let var: f64 =
                xs.iter().flatten().map(|v| (v - mean) * (v - mean)).sum::<f64>() / total;
            if var > 0.0 {
                1.0 / (dim as f64 * var)
            } else {
                1.0 / dim as f64
            }
        }
    };

    // kernel matrix (training sets here are small: N <= a few hundred)
    let kernel: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| rbf(gamma, &xs[i], &xs[j])).collect())
        .collect();

    let yf: Vec<f64> = y.iter().map(|&l| l as f64).collect();
    let mut alpha = vec![0.0f64; n];
    // f0_i = sum_j alpha_j y_j K_ij (decision value without bias)
    let mut f0 = vec![0.0f64; n];
    let c = cfg.c;

    let in_up = |i: usize, alpha: &[f64]| {
        (yf[i] > 0.0 && alpha[i] < c - 1e-12) || (yf[i] < 0.0 && alpha[i] > 1e-12)
    };
    let in_low = |i: usize, alpha: &[f64]| {
        (yf[i] < 0.0 && alpha[i] < c - 1e-12) || (yf[i] > 0.0 && alpha[i] > 1e-12)
    };

    let mut converged = false;
    let mut iters = 0usize;
    while iters < cfg.max_iters {
        iters += 1;
        // maximal violating pair: the worst KKT violator over I_up paired
        // with the feasible point maximizing |E_i - E_j|
        let mut i_sel = usize::MAX;
        let mut m_val = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut m_low = f64::INFINITY;
        for t in 0..n {
            let r = yf[t] - f0[t];
            if in_up(t, &alpha) && r > m_val {
                m_val = r;
                i_sel = t;
            }
            if in_low(t, &alpha) && r < m_low {
                m_low = r;
                j_sel = t;
            }
        }
        if i_sel == usize::MAX || j_sel == usize::MAX || m_val - m_low <= cfg.kkt_tol {
            converged = true;
            break;
        }
        let (i, j) = (i_sel, j_sel);

        // analytic two-variable step (Platt), with E_i - E_j = m_low - m_val
        let (yi, yj) = (yf[i], yf[j]);
        let (l_bound, h_bound) = if (yi - yj).abs() > 0.5 {
            let diff = alpha[j] - alpha[i];
            (diff.max(0.0), (c + diff).min(c))
        } else {
            let sum = alpha[i] + alpha[j];
            ((sum - c).max(0.0), sum.min(c))
        };
        let eta = (kernel[i][i] + kernel[j][j] - 2.0 * kernel[i][j]).max(1e-12);
        let e_gap = (f0[i] - yi) - (f0[j] - yj);
        let a_j_new = (alpha[j] + yj * e_gap / eta).clamp(l_bound, h_bound);
        let a_i_new = alpha[i] + yi * yj * (alpha[j] - a_j_new);
        let (di, dj) = (a_i_new - alpha[i], a_j_new - alpha[j]);
        if di.abs() < 1e-14 && dj.abs() < 1e-14 {
            converged = true; // numerically stuck at the optimum
            break;
        }
        alpha[i] = a_i_new;
        alpha[j] = a_j_new;
        // dual feasibility holds after every update: the pair step moves
        // along the equality constraint and clipping enforces the box
        debug_assert!(alpha[i] >= -1e-9 && alpha[i] <= c + 1e-9);
        debug_assert!(alpha[j] >= -1e-9 && alpha[j] <= c + 1e-9);
        debug_assert!(
            alpha.iter().zip(&yf).map(|(a, y)| a * y).sum::<f64>().abs() < 1e-9 * n as f64
        );
        for t in 0..n {
            f0[t] += di * yi * kernel[i][t] + dj * yj * kernel[j][t];
        }
    }

    // bias: mean residual over free vectors, else midpoint of the KKT gap
    let free: Vec<usize> = (0..n)
        .filter(|&t| alpha[t] > 1e-9 && alpha[t] < c - 1e-9)
        .collect();
    let bias = if !free.is_empty() {
        free.iter().map(|&t| yf[t] - f0[t]).sum::<f64>() / free.len() as f64
    } else {
        let m_up = (0..n)
            .filter(|&t| in_up(t, &alpha))
            .map(|t| yf[t] - f0[t])
            .fold(f64::NEG_INFINITY, f64::max);
        let m_low = (0..n)
            .filter(|&t| in_low(t, &alpha))
            .map(|t| yf[t] - f0[t])
            .fold(f64::INFINITY, f64::min);
        (m_up + m_low) / 2.0
    };

    let mut support_vectors = Vec::new();
    let mut dual_coeffs = Vec::new();
    for t in 0..n {
        if alpha[t] > 1e-12 {
            support_vectors.push(xs[t].clone());
            dual_coeffs.push(alpha[t] * yf[t]);
        }
    }
    debug_assert!(dual_coeffs.iter().sum::<f64>().abs() < 1e-6);

    Ok(SvmModel {
        scheme,
        dim,
        gamma,
        c,
        bias,
        standardizer,
        support_vectors,
        dual_coeffs,
        converged,
    })
}

impl SvmModel {
    /// Decision value and label for one feature vector.
    pub fn predict(&self, features: &[f64]) -> Result<(i8, f64)> {
        if features.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: features.len(),
            });
        }
        let z = match &self.standardizer {
            Some(s) => s.apply(features),
            None => features.to_vec(),
        };
        let score: f64 = self
            .support_vectors
            .iter()
            .zip(&self.dual_coeffs)
            .map(|(sv, &a)| a * rbf(self.gamma, sv, &z))
            .sum::<f64>()
            + self.bias;
        let label = if score >= 0.0 { 1 } else { -1 };
        Ok((label, score))
    }

    // --- versioned binary serialization (little-endian, length-prefixed) ---
    //
    //   magic   8 bytes  "LDSVM001"
    //   scheme  u32      0=dwt 1=mfcc 2=lfcc 3=cqcc
    //   dim     u32
    //   gamma   f64
    //   c       f64
    //   bias    f64
    //   std?    u8       0/1, then dim means + dim stds as f64 when 1
    //   n_sv    u32
    //   per SV: f64 dual coefficient, then dim f64 components

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        if self.support_vectors.is_empty() {
            return Err(Error::CorruptModel(
                "refusing to serialize a model with no support vectors".into(),
            ));
        }
        let mut out = Vec::new();
        out.extend_from_slice(MODEL_MAGIC);
        let scheme_tag: u32 = match self.scheme {
            Scheme::Dwt => 0,
            Scheme::Mfcc => 1,
            Scheme::Lfcc => 2,
            Scheme::Cqcc => 3,
        };
        out.extend_from_slice(&scheme_tag.to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&self.gamma.to_le_bytes());
        out.extend_from_slice(&self.c.to_le_bytes());
        out.extend_from_slice(&self.bias.to_le_bytes());
        match &self.standardizer {
            Some(s) => {
                out.push(1);
                for v in s.mean.iter().chain(&s.std) {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
            None => out.push(0),
        }
        out.extend_from_slice(&(self.support_vectors.len() as u32).to_le_bytes());
        for (sv, a) in self.support_vectors.iter().zip(&self.dual_coeffs) {
            out.extend_from_slice(&a.to_le_bytes());
            for v in sv {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    /// Strict parser; never panics on malformed bytes.
    pub fn from_bytes(bytes: &[u8]) -> Result<SvmModel> {
        struct Cur<'a> {
            b: &'a [u8],
            at: usize,
        }
        impl<'a> Cur<'a> {
            fn take(&mut self, n: usize) -> Result<&'a [u8]> {
                let s = self
                    .b
                    .get(self.at..self.at + n)
                    .ok_or_else(|| Error::CorruptModel("truncated".into()))?;
                self.at += n;
                Ok(s)
            }
            fn u32(&mut self) -> Result<u32> {
                Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
            }
            fn f64(&mut self) -> Result<f64> {
                Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
            }
            fn u8(&mut self) -> Result<u8> {
                Ok(self.take(1)?[0])
            }
        }

        let mut cur = Cur { b: bytes, at: 0 };
        let magic = cur.take(8)?;
        if magic != MODEL_MAGIC {
            if &magic[..5] == b"LDSVM" {
                return Err(Error::VersionMismatch(
                    String::from_utf8_lossy(&magic[5..]).into_owned(),
                ));
            }
            return Err(Error::CorruptModel("bad magic".into()));
        }
        let scheme = match cur.u32()? {
            0 => Scheme::Dwt,
            1 => Scheme::Mfcc,
            2 => Scheme::Lfcc,
            3 => Scheme::Cqcc,
            t => return Err(Error::CorruptModel(format!("unknown scheme tag {t}"))),
        };
        let dim = cur.u32()? as usize;
        // every SV row needs dim f64s; bound dim by what the buffer could hold
        if dim == 0 || dim > bytes.len() / 8 + 1 {
            return Err(Error::CorruptModel(format!("implausible dim {dim}")));
        }
        let gamma = cur.f64()?;
        let c = cur.f64()?;
        let bias = cur.f64()?;
        if !(gamma.is_finite() && gamma > 0.0) || !bias.is_finite() || !(c.is_finite() && c > 0.0) {
            return Err(Error::CorruptModel("non-finite or non-positive header field".into()));
        }
        let standardizer = match cur.u8()? {
            0 => None,
            1 => {
                let mut mean = Vec::with_capacity(dim);
                let mut std = Vec::with_capacity(dim);
                for _ in 0..dim {
                    mean.push(cur.f64()?);
                }
                for _ in 0..dim {
                    let s = cur.f64()?;
                    if !(s.is_finite() && s > 0.0) {
                        return Err(Error::CorruptModel("non-positive standardizer std".into()));
                    }
                    std.push(s);
                }
                if mean.iter().any(|v| !v.is_finite()) {
                    return Err(Error::CorruptModel("non-finite standardizer mean".into()));
                }
                Some(Standardizer { mean, std })
            }
            t => return Err(Error::CorruptModel(format!("bad standardizer flag {t}"))),
        };
        let n_sv = cur.u32()? as usize;
        let need = n_sv
            .checked_mul(dim + 1)
            .and_then(|w| w.checked_mul(8))
            .ok_or_else(|| Error::CorruptModel("support vector table overflows".into()))?;
        if n_sv == 0 || bytes.len() - cur.at < need {
            return Err(Error::CorruptModel(format!(
                "support vector table needs {need} bytes"
            )));
        }
        let mut support_vectors = Vec::with_capacity(n_sv);
        let mut dual_coeffs = Vec::with_capacity(n_sv);
        for _ in 0..n_sv {
            dual_coeffs.push(cur.f64()?);
            let mut row = Vec::with_capacity(dim);
            for _ in 0..dim {
                row.push(cur.f64()?);
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::CorruptModel("non-finite support vector".into()));
            }
            support_vectors.push(row);
        }
        if dual_coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::CorruptModel("non-finite dual coefficient".into()));
        }
        Ok(SvmModel {
            scheme,
            dim,
            gamma,
            c,
            bias,
            standardizer,
            support_vectors,
            dual_coeffs,
            converged: true,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let bytes = self.to_bytes()?;
        let mut f = std::fs::File::create(path)
            .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        f.write_all(&bytes)
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SvmModel> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::NotFound(path.to_path_buf())
            } else {
                Error::io(format!("reading {}", path.display()), e)
            }
        })?;
        SvmModel::from_bytes(&bytes)
    }

    /// Dual objective value of this model's alphas against training data is
    /// not recoverable from the model alone; tests use `dual_objective`.
    pub fn n_support_vectors(&self) -> usize {
        self.support_vectors.len()
    }
}

/// Dual objective W(alpha) = sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
/// Exposed for verification against an independent QP solver.
pub fn dual_objective(kernel: &[Vec<f64>], y: &[f64], alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut obj: f64 = alpha.iter().sum();
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            obj -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * kernel[i][j];
        }
    }
    obj
}

/// Recovers this model's alpha values aligned to a training matrix: used by
/// tests to evaluate the dual objective. Rows must match bit-exactly.
pub fn alphas_against(model: &SvmModel, x_standardized: &[Vec<f64>]) -> Vec<f64> {
    let mut alpha = vec![0.0; x_standardized.len()];
    for (sv, &a) in model.support_vectors.iter().zip(&model.dual_coeffs) {
        if let Some(pos) = x_standardized.iter().position(|r| r == sv) {
            alpha[pos] = a.abs();
        }
    }
    alpha
}
