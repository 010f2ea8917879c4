//! Shared test support: an independent projected-gradient QP reference for
//! the SVM dual, plus random problem generators.
#![allow(dead_code)] // each test binary uses a subset of these helpers
//!
//! The reference deliberately shares no code with the SMO solver: it climbs
//! the dual objective by fixed-step gradient ascent and projects onto the
//! feasible set (box intersected with the label hyperplane) by bisecting the
//! hyperplane multiplier.

use laserdet::dsp::seeded_rng;
use rand::Rng;

pub fn rbf_kernel_matrix(x: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    x.iter()
        .map(|a| {
            x.iter()
                .map(|b| {
                    let d2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
                    (-gamma * d2).exp()
                })
                .collect()
        })
        .collect()
}

/// Projection of `v` onto { 0 <= a <= c, sum_i y_i a_i = 0 }.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let phi = |lambda: f64| -> f64 {
        v.iter()
            .zip(y)
            .map(|(vi, yi)| yi * (vi - lambda * yi).clamp(0.0, c))
            .sum()
    };
    let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    v.iter()
        .zip(y)
        .map(|(vi, yi)| (vi - lambda * yi).clamp(0.0, c))
        .collect()
}

/// Projected-gradient ascent on the SVM dual; returns the alpha vector.
/// Runs until the objective stalls (or `max_iters`), so the reference is
/// converged well beyond the 1e-4 comparison gate.
pub fn qp_reference_alphas(kernel: &[Vec<f64>], y: &[f64], c: f64, max_iters: usize) -> Vec<f64> {
    let n = y.len();
    // fixed step from a Lipschitz bound on the gradient (max row sum of |Q|)
    let lipschitz = (0..n)
        .map(|i| (0..n).map(|j| kernel[i][j].abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let step = 1.0 / lipschitz;
    let objective = |alpha: &[f64]| -> f64 {
        let mut w: f64 = alpha.iter().sum();
        for i in 0..n {
            for j in 0..n {
                w -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * kernel[i][j];
            }
        }
        w
    };
    let mut alpha = vec![0.0; n];
    let mut best = 0.0f64;
    let mut stalled = 0usize;
    for _ in 0..max_iters {
        let grad: Vec<f64> = (0..n)
            .map(|i| {
                1.0 - y[i]
                    * (0..n)
                        .map(|j| y[j] * kernel[i][j] * alpha[j])
                        .sum::<f64>()
            })
            .collect();
        let moved: Vec<f64> = alpha
            .iter()
            .zip(&grad)
            .map(|(a, g)| a + step * g)
            .collect();
        alpha = project(&moved, y, c);
        let w = objective(&alpha);
        if w - best < 1e-13 {
            stalled += 1;
            if stalled > 200 {
                break;
            }
        } else {
            stalled = 0;
        }
        best = best.max(w);
    }
    alpha
}

/// Decision function from a reference alpha vector (bias from free vectors,
/// midpoint of the KKT interval otherwise).
pub fn qp_reference_decision(
    x: &[Vec<f64>],
    y: &[f64],
    alpha: &[f64],
    gamma: f64,
    c: f64,
) -> impl Fn(&[f64]) -> f64 {
    let n = y.len();
    let kernel = rbf_kernel_matrix(x, gamma);
    let f0: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| alpha[j] * y[j] * kernel[i][j]).sum())
        .collect();
    let free: Vec<usize> = (0..n)
        .filter(|&i| alpha[i] > 1e-7 && alpha[i] < c - 1e-7)
        .collect();
    let bias = if !free.is_empty() {
        free.iter().map(|&i| y[i] - f0[i]).sum::<f64>() / free.len() as f64
    } else {
        let up = (0..n)
            .filter(|&i| (y[i] > 0.0 && alpha[i] < c - 1e-9) || (y[i] < 0.0 && alpha[i] > 1e-9))
            .map(|i| y[i] - f0[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let low = (0..n)
            .filter(|&i| (y[i] < 0.0 && alpha[i] < c - 1e-9) || (y[i] > 0.0 && alpha[i] > 1e-9))
            .map(|i| y[i] - f0[i])
            .fold(f64::INFINITY, f64::min);
        (up + low) / 2.0
    };
    let x = x.to_vec();
    let y = y.to_vec();
    let alpha = alpha.to_vec();
    move |query: &[f64]| -> f64 {
        let mut s = bias;
        for i in 0..n {
            if alpha[i] > 0.0 {
                let d2: f64 = x[i]
                    .iter()
                    .zip(query)
                    .map(|(u, v)| (u - v) * (u - v))
                    .sum();
                s += alpha[i] * y[i] * (-gamma * d2).exp();
            }
        }
        s
    }
}

/// Random binary problem: two loose Gaussian blobs with label noise, so some
/// problems are separable and some are not.
pub fn random_problem(seed: u64, max_points: usize) -> (Vec<Vec<f64>>, Vec<i8>) {
    let mut rng = seeded_rng(seed);
    let n = 4 + (rng.random::<u64>() as usize) % (max_points - 3);
    let dim = 1 + (rng.random::<u64>() as usize) % 3;
    let spread = 0.5 + rng.random::<f64>() * 1.5;
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    // guarantee one point of each class
    for i in 0..n {
        let cls: i8 = if i == 0 {
            1
        } else if i == 1 {
            -1
        } else if rng.random::<f64>() < 0.5 {
            1
        } else {
            -1
        };
        let center = cls as f64;
        let row: Vec<f64> = (0..dim)
            .map(|_| center + spread * (rng.random::<f64>() - 0.5))
            .collect();
        x.push(row);
        y.push(cls);
    }
    (x, y)
}
