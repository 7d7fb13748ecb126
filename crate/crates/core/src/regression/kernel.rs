use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;

/// `exp(-||x - x'||² / (m σ²))` with `m` the feature dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbfKernel {
    pub sigma: f64,
    pub m: usize,
}

impl RbfKernel {
    pub fn new(sigma: f64, m: usize) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param("sigma", format!("{sigma} must be positive")));
        }
        if m == 0 {
            return Err(Error::param("m", "feature dimension must be positive"));
        }
        Ok(RbfKernel { sigma, m })
    }

    #[inline]
    pub fn from_squared_distance(&self, d2: f64) -> f64 {
        (-d2 / (self.m as f64 * self.sigma * self.sigma)).exp()
    }

    pub(crate) fn check(&self, x: &SparseVector) -> Result<()> {
        if x.dim != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: x.dim,
            });
        }
        Ok(())
    }
}

pub fn rbf(kernel: &RbfKernel, x: &SparseVector, y: &SparseVector) -> Result<f64> {
    kernel.check(x)?;
    kernel.check(y)?;
    Ok(kernel.from_squared_distance(x.squared_distance(y)))
}

/// Bandwidth such that `m σ²` equals the median positive pairwise squared
/// distance among `xs`; 1.0 when no two points differ.
pub fn median_bandwidth(xs: &[SparseVector]) -> f64 {
    let Some(m) = xs.first().map(|x| x.dim) else {
        return 1.0;
    };
    let mut d2: Vec<f64> = Vec::new();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let d = xs[i].squared_distance(&xs[j]);
            if d > 0.0 {
                d2.push(d);
            }
        }
    }
    if d2.is_empty() || m == 0 {
        return 1.0;
    }
    d2.sort_by(f64::total_cmp);
    let mid = d2.len() / 2;
    let median = if d2.len().is_multiple_of(2) {
        0.5 * (d2[mid - 1] + d2[mid])
    } else {
        d2[mid]
    };
    (median / m as f64).sqrt()
}
