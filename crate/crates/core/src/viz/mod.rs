//! Two-dimensional views of learned embeddings: PCA, k-means and exact t-SNE,
//! written as coordinate CSVs and SVG scatter plots.

mod kmeans;
mod pca;
mod svg;
mod tsne;

use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

pub use kmeans::{kmeans, kmeans_restarts, KMeans};
pub use pca::{pca, Pca};
pub use svg::{render_scatter, PALETTE};
pub use tsne::{conditional_affinities, joint_affinities, kl_divergence, squared_distances, tsne, Tsne, TsneConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Projection2D {
    pub ids: Vec<String>,
    pub points: Array2<f64>,
    pub labels: Option<Vec<String>>,
}

impl Projection2D {
    pub fn new(ids: Vec<String>, points: Array2<f64>, labels: Option<Vec<String>>) -> Result<Projection2D> {
        if points.ncols() != 2 {
            return Err(Error::ShapeMismatch(format!("expected 2 columns, got {}", points.ncols())));
        }
        if ids.len() != points.nrows() {
            return Err(Error::LengthMismatch(ids.len(), points.nrows()));
        }
        if let Some(l) = &labels {
            if l.len() != points.nrows() {
                return Err(Error::LengthMismatch(l.len(), points.nrows()));
            }
        }
        if !points.iter().all(|v| v.is_finite()) {
            return Err(Error::ShapeMismatch("non-finite coordinate".into()));
        }
        Ok(Projection2D { ids, points, labels })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// `id,x,y,label`, coordinates to 6 decimals.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "x", "y", "label"])?;
        for (i, id) in self.ids.iter().enumerate() {
            let label = self.labels.as_ref().map_or("", |l| l[i].as_str());
            w.write_record([
                id.as_str(),
                &format!("{:.6}", self.points[[i, 0]]),
                &format!("{:.6}", self.points[[i, 1]]),
                label,
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: "<memory>".into(),
            source: e.into_error(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Writes the scatter plot of `projection` as SVG.
pub fn emit_scatter(projection: &Projection2D, title: &str, path: &Path) -> Result<()> {
    let svg = render_scatter(projection, title);
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn validates_shapes() {
        let ok = Projection2D::new(vec!["a".into()], array![[0.0, 1.0]], None);
        assert!(ok.is_ok());
        assert!(Projection2D::new(vec!["a".into()], array![[0.0, 1.0, 2.0]], None).is_err());
        assert!(Projection2D::new(vec!["a".into()], array![[0.0, 1.0]], Some(vec![])).is_err());
        assert!(Projection2D::new(vec!["a".into()], array![[f64::NAN, 1.0]], None).is_err());
    }

    #[test]
    fn coordinates_csv() {
        let p = Projection2D::new(
            vec!["o1".into(), "o2".into()],
            array![[0.5, -1.25], [2.0, 3.0]],
            Some(vec!["1".into(), "0".into()]),
        )
        .unwrap();
        assert_eq!(
            p.to_csv().unwrap(),
            "id,x,y,label\no1,0.500000,-1.250000,1\no2,2.000000,3.000000,0\n"
        );
    }
}
