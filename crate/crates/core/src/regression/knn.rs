use crate::error::{Error, Result};
use crate::features::SparseVector;

use super::{Predictor, Regressor};

/// Mean target of the `k` nearest training points (Euclidean). Distance ties
/// are broken by training order.
#[derive(Debug, Clone, Copy)]
pub struct KnnRegressor {
    pub k: usize,
}

impl Default for KnnRegressor {
    fn default() -> Self {
        KnnRegressor { k: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct KnnModel {
    k: usize,
    xs: Vec<SparseVector>,
    ys: Vec<f64>,
}

impl Regressor for KnnRegressor {
    fn fit(&self, xs: &[SparseVector], ys: &[f64]) -> Result<Box<dyn Predictor>> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::param("samples", "need matching, non-empty features and targets"));
        }
        if self.k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        Ok(Box::new(KnnModel {
            k: self.k.min(xs.len()),
            xs: xs.to_vec(),
            ys: ys.to_vec(),
        }))
    }

    fn name(&self) -> &'static str {
        "knn"
    }
}

impl Predictor for KnnModel {
    fn predict(&self, x: &SparseVector) -> Result<f64> {
        if x.dim != self.xs[0].dim {
            return Err(Error::DimensionMismatch {
                expected: self.xs[0].dim,
                actual: x.dim,
            });
        }
        let mut d: Vec<(f64, usize)> = self
            .xs
            .iter()
            .enumerate()
            .map(|(i, t)| (t.squared_distance(x), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(d[..self.k].iter().map(|&(_, i)| self.ys[i]).sum::<f64>() / self.k as f64)
    }
}
