//! Regressors mapping a node's feature vector to a predicted vitality.

mod kernel;
mod knn;
mod svr;

pub use kernel::{median_bandwidth, rbf, RbfKernel};
pub use knn::{KnnModel, KnnRegressor};
pub use svr::{resolve_params, solve_dual, train_svr, DualSolution, SvrModel, SvrParams, SvrRegressor};

use crate::error::Result;
use crate::features::SparseVector;

/// A fitted model.
pub trait Predictor: Send + Sync {
    fn predict(&self, x: &SparseVector) -> Result<f64>;

    fn predict_batch(&self, xs: &[SparseVector]) -> Result<Vec<f64>> {
        use rayon::prelude::*;
        xs.par_iter().map(|x| self.predict(x)).collect()
    }
}

/// Something that can be trained on `(feature vector, target)` pairs.
pub trait Regressor {
    fn fit(&self, xs: &[SparseVector], ys: &[f64]) -> Result<Box<dyn Predictor>>;

    fn name(&self) -> &'static str;
}
