use ndarray::Array2;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    pub exaggeration_iters: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
    pub momentum_switch: usize,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iters: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
            momentum_switch: 250,
            seed: 13,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tsne {
    pub coords: Array2<f64>,
    pub initial_kl: f64,
    pub final_kl: f64,
}

/// Squared Euclidean distances between rows.
pub fn squared_distances(x: &Array2<f64>) -> Array2<f64> {
    let n = x.nrows();
    let mut d = Array2::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = x.row(i).iter().zip(x.row(j).iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    d
}

/// Row `i` of the conditional affinities for precision `beta`, with the
/// Shannon entropy (nats) of that row.
fn row_affinities(dist: &[f64], i: usize, beta: f64, out: &mut [f64]) -> f64 {
    let min = dist
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &d)| d)
        .fold(f64::INFINITY, f64::min);
    let mut sum = 0.0;
    for (j, &d) in dist.iter().enumerate() {
        out[j] = if j == i { 0.0 } else { (-beta * (d - min)).exp() };
        sum += out[j];
    }
    let mut entropy = 0.0;
    for v in out.iter_mut() {
        *v /= sum;
        if *v > 0.0 {
            entropy -= *v * v.ln();
        }
    }
    entropy
}

/// Conditional affinities `p(j|i)` with each row's bandwidth found by
/// bisection on the precision so that `exp(entropy)` matches `perplexity`.
/// Returns the matrix and each row's achieved perplexity.
pub fn conditional_affinities(x: &Array2<f64>, perplexity: f64) -> Result<(Array2<f64>, Vec<f64>)> {
    check_perplexity(x.nrows(), perplexity)?;
    let n = x.nrows();
    let d = squared_distances(x);
    let mut p = Array2::zeros((n, n));
    let mut achieved = Vec::with_capacity(n);
    let mut row = vec![0.0; n];
    for i in 0..n {
        let dist = d.row(i).to_vec();
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        let mut beta = 1.0;
        let mut perp = 0.0;
        for _ in 0..200 {
            perp = row_affinities(&dist, i, beta, &mut row).exp();
            if (perp - perplexity).abs() < 1e-5 {
                break;
            }
            if perp > perplexity {
                lo = beta;
                beta = if hi.is_finite() { (beta + hi) / 2.0 } else { beta * 2.0 };
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
        }
        achieved.push(perp);
        p.row_mut(i).assign(&ndarray::ArrayView1::from(&row[..]));
    }
    Ok((p, achieved))
}

fn check_perplexity(n: usize, perplexity: f64) -> Result<()> {
    if !(perplexity >= 2.0) {
        return Err(Error::Config(format!("perplexity must be at least 2, got {perplexity}")));
    }
    if (n as f64) < 3.0 * perplexity {
        return Err(Error::PerplexityTooLarge { perplexity, n });
    }
    Ok(())
}

/// Symmetrized joint affinities `(P + Pᵀ) / 2N`, floored at 1e-12.
pub fn joint_affinities(conditional: &Array2<f64>) -> Array2<f64> {
    let n = conditional.nrows() as f64;
    let mut p = (conditional + &conditional.t()) / (2.0 * n);
    p.mapv_inplace(|v| v.max(1e-12));
    for i in 0..p.nrows() {
        p[[i, i]] = 0.0;
    }
    p
}

/// Student-t kernel values and their sum over off-diagonal pairs.
fn kernel(y: &Array2<f64>) -> (Array2<f64>, f64) {
    let n = y.nrows();
    let mut num = Array2::zeros((n, n));
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dx = y[[i, 0]] - y[[j, 0]];
            let dy = y[[i, 1]] - y[[j, 1]];
            let v = 1.0 / (1.0 + dx * dx + dy * dy);
            num[[i, j]] = v;
            num[[j, i]] = v;
            sum += 2.0 * v;
        }
    }
    (num, sum)
}

/// KL(P || Q) for the embedding `y`.
pub fn kl_divergence(p: &Array2<f64>, y: &Array2<f64>) -> f64 {
    let (num, sum) = kernel(y);
    let mut kl = 0.0;
    for ((i, j), &pij) in p.indexed_iter() {
        if i != j && pij > 0.0 {
            let q = (num[[i, j]] / sum).max(1e-12);
            kl += pij * (pij / q).ln();
        }
    }
    kl
}

/// Exact t-SNE to two dimensions.
pub fn tsne(x: &Array2<f64>, cfg: &TsneConfig) -> Result<Tsne> {
    let (cond, _) = conditional_affinities(x, cfg.perplexity)?;
    let p = joint_affinities(&cond);
    let n = x.nrows();
    let mut rng = seeded(cfg.seed);
    let normal = Normal::new(0.0, 1e-2).expect("valid normal");
    let mut y = Array2::from_shape_simple_fn((n, 2), || normal.sample(&mut rng));
    let initial_kl = kl_divergence(&p, &y);
    let mut update = Array2::<f64>::zeros((n, 2));
    let mut gains = Array2::<f64>::ones((n, 2));
    let mut grad = Array2::<f64>::zeros((n, 2));

    for it in 0..cfg.iterations {
        let exaggeration = if it < cfg.exaggeration_iters { cfg.early_exaggeration } else { 1.0 };
        let momentum = if it < cfg.momentum_switch { cfg.initial_momentum } else { cfg.final_momentum };
        let (num, sum) = kernel(&y);
        grad.fill(0.0);
        for i in 0..n {
            let (mut gx, mut gy) = (0.0, 0.0);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = (exaggeration * p[[i, j]] - num[[i, j]] / sum) * num[[i, j]];
                gx += w * (y[[i, 0]] - y[[j, 0]]);
                gy += w * (y[[i, 1]] - y[[j, 1]]);
            }
            grad[[i, 0]] = 4.0 * gx;
            grad[[i, 1]] = 4.0 * gy;
        }
        for ((g, u), gain) in grad.iter().zip(update.iter_mut()).zip(gains.iter_mut()) {
            *gain = if (*g > 0.0) != (*u > 0.0) { *gain + 0.2 } else { *gain * 0.8 };
            *gain = gain.max(0.01);
            *u = momentum * *u - cfg.learning_rate * *gain * *g;
        }
        y += &update;
        let mean = y.mean_axis(ndarray::Axis(0)).expect("non-empty");
        y -= &mean;
    }
    let final_kl = kl_divergence(&p, &y);
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteLoss {
            epoch: cfg.iterations,
            detail: "t-SNE coordinates diverged".into(),
        });
    }
    Ok(Tsne {
        coords: y,
        initial_kl,
        final_kl,
    })
}
