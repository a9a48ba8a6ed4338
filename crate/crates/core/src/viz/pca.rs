use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    pub mean: Array1<f64>,
    /// `k × d`, orthonormal rows.
    pub components: Array2<f64>,
    /// `N × k`.
    pub projected: Array2<f64>,
    /// Share of total variance per component, descending.
    pub explained_variance_ratio: Vec<f64>,
}

/// Projects mean-centered rows onto the top `k` eigenvectors of the sample
/// covariance. Each component is signed so its largest-magnitude entry is
/// positive.
pub fn pca(x: &Array2<f64>, k: usize) -> Result<Pca> {
    let (n, d) = x.dim();
    if n < 2 {
        return Err(Error::DegenerateInput(format!("need at least 2 rows, got {n}")));
    }
    if k == 0 || k > n.min(d) {
        return Err(Error::Config(format!("k must lie in 1..={}, got {k}", n.min(d))));
    }
    let mean = x.mean_axis(Axis(0)).expect("non-empty");
    let centered = x - &mean;
    let cov = centered.t().dot(&centered) / (n as f64 - 1.0);
    let total: f64 = cov.diag().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateInput("data has zero variance".into()));
    }
    let eig = SymmetricEigen::new(DMatrix::from_fn(d, d, |i, j| cov[[i, j]]));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut components = Array2::zeros((k, d));
    let mut ratios = Vec::with_capacity(k);
    for (row, &c) in order.iter().take(k).enumerate() {
        let v = eig.eigenvectors.column(c);
        let mut pivot = 0;
        for i in 1..d {
            if v[i].abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..d {
            components[[row, i]] = sign * v[i];
        }
        ratios.push(eig.eigenvalues[c].max(0.0) / total);
    }
    let projected = centered.dot(&components.t());
    Ok(Pca {
        mean,
        components,
        projected,
        explained_variance_ratio: ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::Rng as _;

    #[test]
    fn collinear_points_have_one_component() {
        let x = array![[0.0, 0.0], [1.0, 2.0], [2.0, 4.0], [-3.0, -6.0]];
        let p = pca(&x, 2).unwrap();
        assert!((p.explained_variance_ratio[0] - 1.0).abs() < 1e-9);
        let c = p.components.row(0);
        assert!((c[0] - 1.0 / 5f64.sqrt()).abs() < 1e-9);
        assert!((c[1] - 2.0 / 5f64.sqrt()).abs() < 1e-9);
    }

    /// Independent oracle: squared singular values of the centered matrix.
    #[test]
    fn matches_singular_values() {
        let x = array![[2.0, 0.0, 1.0], [-2.0, 0.5, 0.0], [0.0, 3.0, -1.0], [0.0, -3.5, 0.0]];
        let p = pca(&x, 3).unwrap();
        let centered = &x - &x.mean_axis(Axis(0)).unwrap();
        let m = DMatrix::from_fn(4, 3, |i, j| centered[[i, j]]);
        let mut sv: Vec<f64> = m.svd(false, false).singular_values.iter().map(|s| s * s / 3.0).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = sv.iter().sum();
        for (r, s) in p.explained_variance_ratio.iter().zip(&sv) {
            assert!((r - s / total).abs() < 1e-9);
        }
        // Projected column variances equal the eigenvalues.
        for (j, s) in sv.iter().enumerate() {
            let col = p.projected.column(j);
            let var = col.dot(&col) / 3.0;
            assert!((var - s).abs() < 1e-9);
        }
    }

    #[test]
    fn full_basis_reconstructs() {
        let mut rng = seeded(3);
        let x = Array2::from_shape_simple_fn((6, 4), || rng.gen_range(-2.0..2.0));
        let p = pca(&x, 4).unwrap();
        let back = p.projected.dot(&p.components) + &p.mean;
        for (a, b) in back.iter().zip(x.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_variance_is_degenerate() {
        let x = Array2::from_elem((3, 2), 1.5);
        assert!(matches!(pca(&x, 1), Err(Error::DegenerateInput(_))));
        assert!(pca(&array![[1.0, 2.0]], 1).is_err());
    }

    proptest! {
        #[test]
        fn components_are_orthonormal(seed in 0u64..500, n in 3usize..12, d in 2usize..7) {
            let mut rng = seeded(seed);
            let x = Array2::from_shape_simple_fn((n, d), || rng.gen_range(-5.0..5.0));
            let k = n.min(d);
            let p = pca(&x, k).unwrap();
            let gram = p.components.dot(&p.components.t());
            for i in 0..k {
                for j in 0..k {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((gram[[i, j]] - expect).abs() < 1e-9);
                }
            }
            let sum: f64 = p.explained_variance_ratio.iter().sum();
            prop_assert!(sum <= 1.0 + 1e-9);
            for w in p.explained_variance_ratio.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
        }
    }
}
