use rand::Rng as _;

use crate::rng::Rng;

/// Draws negative samples from the unigram distribution raised to 0.75.
pub(crate) struct NegativeSampler {
    cumulative: Vec<f64>,
}

impl NegativeSampler {
    pub(crate) fn new(counts: &[u64]) -> NegativeSampler {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NegativeSampler { cumulative }
    }

    pub(crate) fn sample(&self, rng: &mut Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let u = rng.gen::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

/// Per-token probability of keeping an occurrence under frequent-word
/// subsampling with threshold `t`.
pub(crate) fn keep_probabilities(counts: &[u64], t: f64) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    if t <= 0.0 || total == 0 {
        return vec![1.0; counts.len()];
    }
    let threshold = t * total as f64;
    counts
        .iter()
        .map(|&c| {
            let c = c as f64;
            (((c / threshold).sqrt() + 1.0) * threshold / c).min(1.0)
        })
        .collect()
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `-ln(sigmoid(x))`, stable for large |x|.
pub(crate) fn neg_log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

/// Learning rate decayed linearly in training progress, floored at `min`.
pub(crate) fn decayed_rate(start: f64, min: f64, progress: f64) -> f64 {
    (start * (1.0 - progress)).max(min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn sampler_follows_smoothed_unigram() {
        let sampler = NegativeSampler::new(&[16, 1]);
        let mut rng = seeded(3);
        let n = 20_000;
        let hits = (0..n).filter(|_| sampler.sample(&mut rng) == 0).count();
        // 16^0.75 = 8, so P(0) = 8/9.
        let p = hits as f64 / n as f64;
        assert!((p - 8.0 / 9.0).abs() < 0.01, "{p}");
    }

    #[test]
    fn rare_tokens_are_always_kept() {
        let keep = keep_probabilities(&[100_000, 1], 1e-3);
        assert!(keep[0] < 0.2);
        assert_eq!(keep[1], 1.0);
    }

    #[test]
    fn log_sigmoid_is_stable() {
        assert!((neg_log_sigmoid(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((neg_log_sigmoid(-800.0) - 800.0).abs() < 1e-9);
        assert!(neg_log_sigmoid(800.0) >= 0.0);
        assert!((sigmoid(2.0) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
    }
}
