//! ε-insensitive support vector regression with an RBF kernel.
//!
//! Training solves the soft-margin dual
//!
//! ```text
//! min_w  ½ wᵀKw − yᵀw + ε Σ|w_i|   s.t.  Σ w_i = 0,  −C ≤ w_i ≤ C
//! ```
//!
//! in its split form over `2l` non-negative variables (`w = α − α*`) with a
//! two-coordinate SMO using second-order working-set selection. The kernel
//! matrix is materialized densely; training sets here hold a few hundred
//! points at most.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;

use super::kernel::{median_bandwidth, RbfKernel};
use super::{Predictor, Regressor};

const TAU: f64 = 1e-12;

/// Hyperparameters. `None` picks the data-driven default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    pub cost: f64,
    /// Defaults to 1% of the target range.
    pub epsilon: Option<f64>,
    /// Defaults to the median-distance heuristic.
    pub sigma: Option<f64>,
    /// Stopping tolerance on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            cost: 10.0,
            epsilon: None,
            sigma: None,
            tolerance: 1e-8,
            max_iterations: 10_000_000,
        }
    }
}

/// Optimal point of the dual for a given kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    /// `w_i = α_i − α*_i`, one per training point.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    /// `½ wᵀKw − yᵀw + ε Σ|w_i|` at the returned coefficients.
    pub objective: f64,
    /// Maximal KKT violation `m(α) − M(α)` when the solver stopped.
    pub kkt_violation: f64,
    pub iterations: usize,
}

/// Solves the ε-SVR dual for a dense, symmetric PSD kernel matrix given as
/// row-major `l × l`.
pub fn solve_dual(
    kernel: &[f64],
    targets: &[f64],
    cost: f64,
    epsilon: f64,
    tolerance: f64,
    max_iterations: usize,
) -> Result<DualSolution> {
    let l = targets.len();
    if l == 0 {
        return Err(Error::param("samples", "need at least one training sample"));
    }
    if kernel.len() != l * l {
        return Err(Error::DimensionMismatch {
            expected: l * l,
            actual: kernel.len(),
        });
    }
    if !(cost.is_finite() && cost > 0.0) {
        return Err(Error::param("cost", format!("{cost} must be positive")));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::param("epsilon", format!("{epsilon} must be non-negative")));
    }
    if targets.iter().any(|y| !y.is_finite()) {
        return Err(Error::param("targets", "targets must be finite"));
    }

    let k = |a: usize, b: usize| kernel[(a % l) * l + (b % l)];
    let sign = |t: usize| if t < l { 1.0 } else { -1.0 };
    let size = 2 * l;
    let mut alpha = vec![0.0f64; size];
    // Gradient of ½αᵀQα + pᵀα with Q_tu = s_t s_u K and α = 0.
    let mut grad: Vec<f64> = (0..size)
        .map(|t| if t < l { epsilon - targets[t] } else { epsilon + targets[t - l] })
        .collect();
    let at_upper = |a: f64| a >= cost;
    let at_lower = |a: f64| a <= 0.0;

    let mut iterations = 0;
    let mut violation;
    loop {
        // Working-set selection, second-order (Fan, Chen & Lin 2005).
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..size {
            if sign(t) > 0.0 {
                if !at_upper(alpha[t]) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    i_sel = t;
                }
            } else if !at_lower(alpha[t]) && grad[t] >= gmax {
                gmax = grad[t];
                i_sel = t;
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut obj_min = f64::INFINITY;
        if i_sel != usize::MAX {
            let i = i_sel;
            let qii = k(i, i);
            for j in 0..size {
                let (grad_diff, candidate) = if sign(j) > 0.0 {
                    if at_lower(alpha[j]) {
                        continue;
                    }
                    gmax2 = gmax2.max(grad[j]);
                    (gmax + grad[j], true)
                } else {
                    if at_upper(alpha[j]) {
                        continue;
                    }
                    gmax2 = gmax2.max(-grad[j]);
                    (gmax - grad[j], true)
                };
                if candidate && grad_diff > 0.0 {
                    let quad = qii + k(j, j) - 2.0 * k(i, j);
                    let quad = if quad > 0.0 { quad } else { TAU };
                    let obj = -(grad_diff * grad_diff) / quad;
                    if obj <= obj_min {
                        obj_min = obj;
                        j_sel = j;
                    }
                }
            }
        }
        violation = (gmax + gmax2).max(0.0);
        if i_sel == usize::MAX || j_sel == usize::MAX || gmax + gmax2 < tolerance {
            break;
        }
        if iterations >= max_iterations {
            break;
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        let (si, sj) = (sign(i), sign(j));
        let qij = si * sj * k(i, j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let c = cost;
        if si != sj {
            let quad = k(i, i) + k(j, j) + 2.0 * qij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = k(i, i) + k(j, j) - 2.0 * qij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..size {
            let st = sign(t);
            grad[t] += st * si * k(t, i) * di + st * sj * k(t, j) * dj;
        }
    }

    // Bias from the free variables, or the midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut free_sum) = (0usize, 0.0);
    for t in 0..size {
        let yg = sign(t) * grad[t];
        if at_upper(alpha[t]) {
            if sign(t) < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower(alpha[t]) {
            if sign(t) > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 { free_sum / free as f64 } else { 0.5 * (ub + lb) };

    let coefficients: Vec<f64> = (0..l).map(|i| alpha[i] - alpha[i + l]).collect();
    let objective = dual_objective(kernel, targets, epsilon, &coefficients);
    Ok(DualSolution {
        coefficients,
        bias: -rho,
        objective,
        kkt_violation: violation,
        iterations,
    })
}

/// `½ wᵀKw − yᵀw + ε Σ|w_i|`.
pub(crate) fn dual_objective(kernel: &[f64], targets: &[f64], epsilon: f64, w: &[f64]) -> f64 {
    let l = targets.len();
    let mut quad = 0.0;
    for i in 0..l {
        for j in 0..l {
            quad += w[i] * w[j] * kernel[i * l + j];
        }
    }
    0.5 * quad - targets.iter().zip(w).map(|(y, w)| y * w).sum::<f64>()
        + epsilon * w.iter().map(|w| w.abs()).sum::<f64>()
}

/// Trained kernel expansion `f(x) = Σ w_i k(x, x_i) + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub support_vectors: Vec<SparseVector>,
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub kernel: RbfKernel,
    pub epsilon: f64,
    pub cost: f64,
    /// KKT violation reported by the solver.
    pub kkt_violation: f64,
}

impl SvrModel {
    pub fn predict(&self, x: &SparseVector) -> Result<f64> {
        self.kernel.check(x)?;
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, w)| w * self.kernel.from_squared_distance(x.squared_distance(sv)))
            .sum::<f64>()
            + self.bias)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Predictor for SvrModel {
    fn predict(&self, x: &SparseVector) -> Result<f64> {
        SvrModel::predict(self, x)
    }
}

/// Kernel matrix of `xs` under `kernel`, row-major.
pub(crate) fn kernel_matrix(kernel: &RbfKernel, xs: &[SparseVector]) -> Vec<f64> {
    let l = xs.len();
    let mut out = vec![1.0; l * l];
    for i in 0..l {
        for j in i + 1..l {
            let v = kernel.from_squared_distance(xs[i].squared_distance(&xs[j]));
            out[i * l + j] = v;
            out[j * l + i] = v;
        }
    }
    out
}

/// Resolves `None` hyperparameters against the training data.
pub fn resolve_params(xs: &[SparseVector], ys: &[f64], params: &SvrParams) -> (f64, f64) {
    let epsilon = params.epsilon.unwrap_or_else(|| {
        let (lo, hi) = ys
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));
        0.01 * (hi - lo)
    });
    let sigma = params.sigma.unwrap_or_else(|| median_bandwidth(xs));
    (epsilon, sigma)
}

pub fn train_svr(xs: &[SparseVector], ys: &[f64], params: &SvrParams) -> Result<SvrModel> {
    if xs.is_empty() {
        return Err(Error::param("samples", "need at least one training sample"));
    }
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::param("targets", "targets must be finite"));
    }
    let dim = xs[0].dim;
    if let Some(bad) = xs.iter().find(|x| x.dim != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: bad.dim,
        });
    }
    let (epsilon, sigma) = resolve_params(xs, ys, params);
    let kernel = RbfKernel::new(sigma, dim.max(1))?;
    let gram = kernel_matrix(&kernel, xs);
    let sol = solve_dual(&gram, ys, params.cost, epsilon, params.tolerance, params.max_iterations)?;

    let (support_vectors, coefficients) = xs
        .iter()
        .zip(&sol.coefficients)
        .filter(|(_, &w)| w != 0.0)
        .map(|(x, &w)| (x.clone(), w))
        .unzip();
    Ok(SvrModel {
        support_vectors,
        coefficients,
        bias: sol.bias,
        kernel,
        epsilon,
        cost: params.cost,
        kkt_violation: sol.kkt_violation,
    })
}

/// [`Regressor`] adapter.
#[derive(Debug, Clone, Copy, Default)]
pub struct SvrRegressor {
    pub params: SvrParams,
}

impl Regressor for SvrRegressor {
    fn fit(&self, xs: &[SparseVector], ys: &[f64]) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(train_svr(xs, ys, &self.params)?))
    }

    fn name(&self) -> &'static str {
        "svr"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn points(values: &[&[f64]]) -> Vec<SparseVector> {
        values.iter().map(|v| SparseVector::from_dense(v)).collect()
    }

    fn random_problem(seed: u64, l: usize) -> (Vec<SparseVector>, Vec<f64>) {
        let mut r = rng::stream(seed, &[]);
        let xs = (0..l)
            .map(|_| {
                let dense: Vec<f64> = (0..4)
                    .map(|_| if r.gen_bool(0.5) { r.gen_range(0.0..5.0) } else { 0.0 })
                    .collect();
                SparseVector::from_dense(&dense)
            })
            .collect();
        let ys = (0..l).map(|_| r.gen_range(1.0..20.0)).collect();
        (xs, ys)
    }

    #[test]
    fn constant_targets_give_constant_model() {
        let xs = points(&[&[1.0, 0.0], &[0.0, 2.0], &[3.0, 3.0]]);
        let model = train_svr(&xs, &[4.0; 3], &SvrParams::default()).unwrap();
        assert!(model.coefficients.is_empty());
        assert_eq!(model.bias, 4.0);
        assert_eq!(model.predict(&SparseVector::from_dense(&[9.0, 9.0])).unwrap(), 4.0);
    }

    #[test]
    fn targets_inside_tube_are_fit() {
        let xs = points(&[&[1.0, 0.0], &[0.0, 2.0], &[3.0, 3.0]]);
        let ys = [5.0, 5.2, 4.9];
        let params = SvrParams {
            epsilon: Some(0.5),
            ..SvrParams::default()
        };
        let model = train_svr(&xs, &ys, &params).unwrap();
        for (x, y) in xs.iter().zip(ys) {
            assert!((model.predict(x).unwrap() - y).abs() <= 0.5 + 1e-9);
        }
    }

    #[test]
    fn interpolates_with_large_cost_and_zero_tube() {
        let (xs, ys) = random_problem(3, 6);
        let params = SvrParams {
            cost: 1e6,
            epsilon: Some(0.0),
            sigma: Some(0.8),
            ..SvrParams::default()
        };
        let model = train_svr(&xs, &ys, &params).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((model.predict(x).unwrap() - y).abs() < 1e-5);
        }
    }

    #[test]
    fn matches_projected_gradient_oracle() {
        for seed in 0..20 {
            let l = 1 + (seed as usize % 8);
            let (xs, ys) = random_problem(100 + seed, l);
            let kernel = RbfKernel::new(1.3, 4).unwrap();
            let gram = kernel_matrix(&kernel, &xs);
            let cost = [0.5, 2.0, 10.0][seed as usize % 3];
            let eps = 0.1 * (seed % 4) as f64;
            let sol = solve_dual(&gram, &ys, cost, eps, 1e-10, 1_000_000).unwrap();
            let oracle = oracles::svr_dual_projected_gradient(&gram, &ys, cost, eps);
            let scale = oracle.abs().max(1.0);
            assert!((sol.objective - oracle).abs() <= 1e-4 * scale, "seed {seed}: {} vs {oracle}", sol.objective);
            assert!(sol.kkt_violation <= 1e-3);
        }
    }

    #[test]
    fn model_json_round_trip_and_lone_support_vector() {
        let sv = SparseVector::from_dense(&[1.0, 2.0]);
        let model = SvrModel {
            support_vectors: vec![sv.clone()],
            coefficients: vec![0.75],
            bias: 2.0,
            kernel: RbfKernel::new(1.0, 2).unwrap(),
            epsilon: 0.1,
            cost: 10.0,
            kkt_violation: 0.0,
        };
        assert_eq!(model.predict(&sv).unwrap(), 2.75);
        let back = SvrModel::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(back, model);
        assert!(model.predict(&SparseVector::zeros(3)).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let xs = points(&[&[1.0]]);
        assert!(train_svr(&xs, &[f64::NAN], &SvrParams::default()).is_err());
        assert!(train_svr(&[], &[], &SvrParams::default()).is_err());
        let params = SvrParams {
            cost: 0.0,
            ..SvrParams::default()
        };
        assert!(train_svr(&xs, &[1.0], &params).is_err());
    }

    proptest! {
        #[test]
        fn dual_feasibility_and_order_invariance(seed in any::<u64>(), l in 1usize..12) {
            let (xs, ys) = random_problem(seed, l);
            let params = SvrParams { cost: 3.0, ..SvrParams::default() };
            let model = train_svr(&xs, &ys, &params).unwrap();
            prop_assert!(model.kkt_violation <= 1e-3);
            let sum: f64 = model.coefficients.iter().sum();
            prop_assert!(sum.abs() <= 1e-9);
            prop_assert!(model.coefficients.iter().all(|w| w.abs() <= 3.0));

            let mut reversed = model.clone();
            reversed.support_vectors.reverse();
            reversed.coefficients.reverse();
            let batch = model.predict_batch(&xs).unwrap();
            for (x, p) in xs.iter().zip(&batch) {
                let a = model.predict(x).unwrap();
                prop_assert!(a.is_finite());
                prop_assert_eq!(a, *p);
                prop_assert!((a - reversed.predict(x).unwrap()).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }
    }
}
