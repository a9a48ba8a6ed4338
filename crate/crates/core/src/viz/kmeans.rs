use ndarray::{Array2, ArrayView1};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{derive, seeded};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub assignments: Vec<usize>,
    pub centroids: Array2<f64>,
    /// Inertia after each assignment step.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
    /// Times an empty cluster was refilled with the farthest point.
    pub reseeded: usize,
}

impl KMeans {
    pub fn inertia(&self) -> f64 {
        *self.inertia_history.last().expect("at least one assignment")
    }
}

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding.
fn seed_centroids(x: &Array2<f64>, k: usize, seed: u64) -> Array2<f64> {
    let n = x.nrows();
    let mut rng = seeded(seed);
    let mut centroids = Array2::zeros((k, x.ncols()));
    centroids.row_mut(0).assign(&x.row(rng.gen_range(0..n)));
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(x.row(i), centroids.row(0))).collect();
    for c in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                acc += d;
                if acc > target {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.gen_range(0..n)
        };
        centroids.row_mut(c).assign(&x.row(pick));
        for i in 0..n {
            nearest[i] = nearest[i].min(sq_dist(x.row(i), centroids.row(c)));
        }
    }
    centroids
}

/// Lloyd iterations from one k-means++ start. Stops on an assignment fixpoint
/// or after `max_iter` centroid updates. A cluster left empty by an update
/// takes the point farthest from its current centroid.
pub fn kmeans(x: &Array2<f64>, k: usize, seed: u64, max_iter: usize) -> Result<KMeans> {
    let n = x.nrows();
    if k == 0 || k > n {
        return Err(Error::Config(format!("k must lie in 1..={n}, got {k}")));
    }
    let mut centroids = seed_centroids(x, k, seed);
    let mut assignments: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut reseeded = 0;
    loop {
        let mut next = Vec::with_capacity(n);
        let mut inertia = 0.0;
        let mut dists = Vec::with_capacity(n);
        for i in 0..n {
            let mut best = (f64::INFINITY, 0);
            for c in 0..k {
                let d = sq_dist(x.row(i), centroids.row(c));
                if d < best.0 {
                    best = (d, c);
                }
            }
            inertia += best.0;
            dists.push(best.0);
            next.push(best.1);
        }
        history.push(inertia);
        let converged = next == assignments;
        assignments = next;
        if converged || iterations >= max_iter {
            break;
        }
        iterations += 1;

        let mut sums = Array2::<f64>::zeros(centroids.raw_dim());
        let mut counts = vec![0usize; k];
        for (i, &a) in assignments.iter().enumerate() {
            let mut row = sums.row_mut(a);
            row += &x.row(i);
            counts[a] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                let mean = &sums.row(c) / counts[c] as f64;
                centroids.row_mut(c).assign(&mean);
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .filter(|&i| counts[assignments[i]] > 1)
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
                if let Some(i) = far {
                    counts[assignments[i]] -= 1;
                    counts[c] = 1;
                    dists[i] = 0.0;
                    centroids.row_mut(c).assign(&x.row(i));
                    reseeded += 1;
                }
            }
        }
    }
    Ok(KMeans {
        assignments,
        centroids,
        inertia_history: history,
        iterations,
        reseeded,
    })
}

/// Best of `restarts` seeded runs by final inertia; the earliest wins ties.
pub fn kmeans_restarts(x: &Array2<f64>, k: usize, seed: u64, restarts: usize, max_iter: usize) -> Result<KMeans> {
    let mut best: Option<KMeans> = None;
    for r in 0..restarts.max(1) {
        let run = kmeans(x, k, derive(seed, r as u64), max_iter)?;
        if best.as_ref().is_none_or(|b| run.inertia() < b.inertia()) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}
