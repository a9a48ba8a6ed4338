//! Stratified label splits and binary classification metrics.
//! Class 1 (automated) is the positive class.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;

/// Disjoint train/validation/test occupation indices, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub seed: u64,
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

pub const MIN_LABELS: usize = 10;

/// Largest-remainder apportionment of `total` across classes proportional to
/// `sizes`. Equal remainders go to classes listed in `prefer` first, then to
/// the lower class id.
fn apportion(sizes: &[usize], total: usize, prefer: &[bool]) -> Vec<usize> {
    let n: usize = sizes.iter().sum();
    let mut alloc: Vec<usize> = sizes.iter().map(|&s| s * total / n).collect();
    let mut remaining = total - alloc.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    // Remainder of s*total/n, compared exactly in integers.
    let rem = |c: usize| (sizes[c] * total) % n;
    order.sort_by(|&a, &b| {
        rem(b)
            .cmp(&rem(a))
            .then_with(|| prefer[b].cmp(&prefer[a]))
            .then_with(|| a.cmp(&b))
    });
    for c in order {
        if remaining == 0 {
            break;
        }
        if alloc[c] < sizes[c] {
            alloc[c] += 1;
            remaining -= 1;
        }
    }
    alloc
}

fn round_tenth(n: usize) -> usize {
    (n as f64 / 10.0).round() as usize
}

/// Stratified 8:1:1 split of labeled occupations given as
/// `(occupation index, class)` pairs. Test and validation each receive
/// `round(n / 10)` items; training receives the rest.
pub fn split(labeled: &[(usize, usize)], seed: u64) -> Result<Split> {
    let n = labeled.len();
    if n < MIN_LABELS {
        return Err(Error::TooFewLabels {
            needed: MIN_LABELS,
            have: n,
        });
    }
    let n_classes = labeled.iter().map(|&(_, c)| c + 1).max().unwrap_or(0);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    let mut sorted = labeled.to_vec();
    sorted.sort_unstable();
    for &(idx, class) in &sorted {
        by_class[class].push(idx);
    }
    let mut rng = seeded(seed);
    for members in &mut by_class {
        members.shuffle(&mut rng);
    }
    let sizes: Vec<usize> = by_class.iter().map(Vec::len).collect();
    let n_test = round_tenth(n);
    let n_val = round_tenth(n);
    let test_alloc = apportion(&sizes, n_test, &vec![false; n_classes]);
    // Favor classes rounded down for the test part so train stays balanced.
    let rounded_down: Vec<bool> = (0..n_classes)
        .map(|c| test_alloc[c] * n < sizes[c] * n_test)
        .collect();
    let val_alloc = apportion(&sizes, n_val, &rounded_down);

    let mut out = Split {
        seed,
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    for (c, members) in by_class.iter().enumerate() {
        let (test, rest) = members.split_at(test_alloc[c]);
        let (val, train) = rest.split_at(val_alloc[c].min(rest.len()));
        out.test.extend_from_slice(test);
        out.validation.extend_from_slice(val);
        out.train.extend_from_slice(train);
    }
    out.train.sort_unstable();
    out.validation.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion(predictions: &[usize], truths: &[usize]) -> Result<ConfusionCounts> {
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch(predictions.len(), truths.len()));
    }
    if predictions.is_empty() {
        return Err(Error::Empty);
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in predictions.iter().zip(truths) {
        match (p == 1, t == 1) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Precision had a zero denominator and was reported as 0.
    pub precision_degenerate: bool,
    /// Recall had a zero denominator and was reported as 0.
    pub recall_degenerate: bool,
}

pub fn metrics(c: &ConfusionCounts) -> MetricsReport {
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            (0.0, true)
        } else {
            (num as f64 / den as f64, false)
        }
    };
    let (accuracy, _) = ratio(c.tp + c.tn, c.total());
    let (precision, precision_degenerate) = ratio(c.tp, c.tp + c.fp);
    let (recall, recall_degenerate) = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    MetricsReport {
        accuracy,
        precision,
        recall,
        f1,
        precision_degenerate,
        recall_degenerate,
    }
}

/// Argmax of a two-class probability: class 1 iff its probability exceeds 0.5.
pub fn predicted_class(p_automated: f64) -> usize {
    usize::from(p_automated > 0.5)
}

pub fn evaluate(p_automated: &[f64], truths: &[usize]) -> Result<MetricsReport> {
    let preds: Vec<usize> = p_automated.iter().map(|&p| predicted_class(p)).collect();
    Ok(metrics(&confusion(&preds, truths)?))
}

/// One row of the metrics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub model: String,
    pub metrics: MetricsReport,
    pub seed: u64,
}

pub const METRICS_HEADER: &str = "model,accuracy,precision,recall,f1,seed";

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        let m = &r.metrics;
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{}",
            r.model, m.accuracy, m.precision, m.recall, m.f1, r.seed
        );
    }
    out
}

pub fn metrics_table(rows: &[MetricsRow]) -> String {
    let mut out = format!(
        "{:<16}{:>10}{:>11}{:>9}{:>9}\n",
        "Method", "Accuracy", "Precision", "Recall", "F1"
    );
    for r in rows {
        let m = &r.metrics;
        let _ = writeln!(
            out,
            "{:<16}{:>10.4}{:>11.4}{:>9.4}{:>9.4}",
            r.model, m.accuracy, m.precision, m.recall, m.f1
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn balanced(n_each: usize) -> Vec<(usize, usize)> {
        (0..2 * n_each).map(|i| (i * 3, i % 2)).collect()
    }

    #[test]
    fn split_sizes_for_112() {
        let s = split(&balanced(56), 4).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (90, 11, 11));
        let count1 = |part: &[usize]| part.iter().filter(|&&i| (i / 3) % 2 == 1).count();
        assert!((count1(&s.test) as i64 - 5).abs() <= 1);
        assert!((count1(&s.train) as i64 - 45).abs() <= 1);
    }

    #[test]
    fn split_sizes_for_10() {
        let s = split(&balanced(5), 0).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (8, 1, 1));
    }

    #[test]
    fn split_is_deterministic_and_rejects_small_sets() {
        assert_eq!(split(&balanced(56), 9).unwrap(), split(&balanced(56), 9).unwrap());
        assert_ne!(split(&balanced(56), 9).unwrap(), split(&balanced(56), 10).unwrap());
        assert!(matches!(
            split(&balanced(4), 0),
            Err(Error::TooFewLabels { .. })
        ));
    }

    #[test]
    fn seven_of_eight_confusion_arithmetic() {
        let m = metrics(&ConfusionCounts {
            tp: 7,
            fp: 0,
            tn: 3,
            fn_: 1,
        });
        assert_eq!(format!("{:.4}", m.accuracy), "0.9091");
        assert_eq!(format!("{:.4}", m.precision), "1.0000");
        assert_eq!(format!("{:.4}", m.recall), "0.8750");
        assert_eq!(format!("{:.4}", m.f1), "0.9333");
    }

    #[test]
    fn all_correct_and_degenerate() {
        let m = metrics(&confusion(&[1, 0, 1], &[1, 0, 1]).unwrap());
        assert_eq!((m.accuracy, m.f1), (1.0, 1.0));
        let m = metrics(&confusion(&[0, 0], &[1, 0]).unwrap());
        assert_eq!(m.precision, 0.0);
        assert!(m.precision_degenerate);
        assert_eq!(m.recall, 0.0);
        assert!(!m.recall_degenerate);
        assert!(matches!(confusion(&[1], &[1, 0]), Err(Error::LengthMismatch(1, 2))));
        assert!(matches!(confusion(&[], &[]), Err(Error::Empty)));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let rows = vec![MetricsRow {
            model: "AOC-GCN".into(),
            metrics: metrics(&confusion(&[1, 0], &[1, 0]).unwrap()),
            seed: 3,
        }];
        let csv = metrics_csv(&rows);
        assert_eq!(
            csv,
            "model,accuracy,precision,recall,f1,seed\nAOC-GCN,1.000000,1.000000,1.000000,1.000000,3\n"
        );
    }

    proptest! {
        #[test]
        fn metric_identities(pairs in proptest::collection::vec((0usize..2, 0usize..2), 1..60), rot in 0usize..60) {
            let (p, t): (Vec<usize>, Vec<usize>) = pairs.iter().copied().unzip();
            let c = confusion(&p, &t).unwrap();
            prop_assert_eq!(c.total(), p.len());
            let m = metrics(&c);
            prop_assert_eq!(m.accuracy, (c.tp + c.tn) as f64 / c.total() as f64);
            if m.precision + m.recall > 0.0 {
                let h = 2.0 * m.precision * m.recall / (m.precision + m.recall);
                prop_assert!((m.f1 - h).abs() <= 1e-12);
            }
            let k = rot % p.len();
            let mut p2 = p.clone();
            let mut t2 = t.clone();
            p2.rotate_left(k);
            t2.rotate_left(k);
            prop_assert_eq!(metrics(&confusion(&p2, &t2).unwrap()), m);
        }

        #[test]
        fn split_is_stratified(n0 in 5usize..80, n1 in 5usize..80, seed in 0u64..1000) {
            let labeled: Vec<(usize, usize)> = (0..n0).map(|i| (i, 0)).chain((0..n1).map(|i| (n0 + i, 1))).collect();
            let s = split(&labeled, seed).unwrap();
            let n = (n0 + n1) as f64;
            let mut all: Vec<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n0 + n1).collect::<Vec<_>>());
            for part in [&s.train, &s.validation, &s.test] {
                let ones = part.iter().filter(|&&i| i >= n0).count() as f64;
                let zeros = part.len() as f64 - ones;
                let frac = part.len() as f64 / n;
                prop_assert!((ones - n1 as f64 * frac).abs() <= 1.0 + 1e-9);
                prop_assert!((zeros - n0 as f64 * frac).abs() <= 1.0 + 1e-9);
            }
        }
    }
}
