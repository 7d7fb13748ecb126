//! The full pipeline: features, training-set sampling, SIR targets on the
//! sample, regression, and the neighbour-weighted EML score.

use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::decomposition::CorenessTable;
use crate::error::{Error, Result};
use crate::features::{feature_matrix, normalize_columns, FeatureWeights, SparseVector};
use crate::graph::Graph;
use crate::metrics::kendall_tau;
use crate::ranking::Ranking;
use crate::regression::{resolve_params, KnnRegressor, Regressor, SvrParams, SvrRegressor};
use crate::rng::{self, purpose};
use crate::sampling::{cluster_sample, k_candidates, kmeans, uniform_sample, SampleSpec, SamplingMethod, DEFAULT_MAX_ITERS};
use crate::sir::{estimate_vitality, SirConfig};

pub const DEFAULT_ALPHA: f64 = 0.5;
/// Folds used when scoring candidate cluster counts.
pub const CV_FOLDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegressorKind {
    Svr,
    Knn,
}

impl FromStr for RegressorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svr" => Ok(RegressorKind::Svr),
            "knn" => Ok(RegressorKind::Knn),
            other => Err(Error::param("regressor", format!("unknown regressor `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmlConfig {
    /// Weight of the neighbours' predictions in the final score, in `[0, 1]`.
    pub alpha: f64,
    pub weights: FeatureWeights,
    pub sample: SampleSpec,
    /// Spreading parameters for the training targets. The runs use a stream
    /// derived from `master_seed`, never the ground-truth stream itself.
    pub sir: SirConfig,
    pub svr: SvrParams,
    pub regressor: RegressorKind,
    /// Scale each feature column to unit max-abs before training.
    pub normalize: bool,
}

impl EmlConfig {
    pub fn new(sir: SirConfig, seed: u64) -> Self {
        EmlConfig {
            alpha: DEFAULT_ALPHA,
            weights: FeatureWeights::default(),
            sample: SampleSpec {
                rng_seed: seed,
                ..SampleSpec::default()
            },
            sir,
            svr: SvrParams::default(),
            regressor: RegressorKind::Svr,
            normalize: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        self.weights.validate()?;
        self.sir.validate()
    }

    fn regressor(&self) -> Box<dyn Regressor> {
        match self.regressor {
            RegressorKind::Svr => Box::new(SvrRegressor { params: self.svr }),
            RegressorKind::Knn => Box::new(KnnRegressor::default()),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("{alpha} must lie in [0, 1]")));
    }
    Ok(())
}

/// `EML(u) = pred(u) + alpha · Σ_{v ∈ Γ(u)} eks(v) · pred(v)`.
pub fn eml_score(g: &Graph, predictions: &[f64], eks: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let n = g.node_count();
    for len in [predictions.len(), eks.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    Ok((0..n)
        .map(|u| {
            let spill: f64 = g.neighbors(u).iter().map(|&v| eks[v] * predictions[v]).sum();
            predictions[u] + alpha * spill
        })
        .collect())
}

/// Everything a run produced, for reporting and diagnostics.
#[derive(Debug, Clone)]
pub struct EmlOutcome {
    pub ranking: Ranking,
    /// Training nodes, ascending.
    pub sample: Vec<usize>,
    /// Simulated mean influence of each training node.
    pub targets: Vec<f64>,
    /// Regressor output for every node.
    pub predictions: Vec<f64>,
    /// Cluster count used, when sampling by cluster.
    pub k: Option<usize>,
    /// Elbow and gap estimates before arbitration.
    pub k_candidates: Option<(usize, usize)>,
    /// SVR tube width and kernel bandwidth after resolving defaults.
    pub epsilon: Option<f64>,
    pub sigma: Option<f64>,
}

/// Runs the pipeline and ranks every node by EML score.
pub fn run_eml(g: &Graph, cfg: &EmlConfig) -> Result<Ranking> {
    Ok(run_eml_detailed(g, cfg)?.ranking)
}

pub fn run_eml_detailed(g: &Graph, cfg: &EmlConfig) -> Result<EmlOutcome> {
    cfg.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let s = cfg.sample.sample_size(n)?;
    let coreness = CorenessTable::compute(g);
    let mut xs = feature_matrix(g, cfg.weights, &coreness)?;
    if cfg.normalize {
        normalize_columns(&mut xs);
    }
    let training_sir = SirConfig {
        master_seed: rng::derive_seed(cfg.sir.master_seed, &[purpose::TRAINING_SIR]),
        ..cfg.sir
    };
    let seed = cfg.sample.rng_seed;
    let regressor = cfg.regressor();

    let targets_for = |sample: &[usize]| -> Result<Vec<f64>> {
        Ok(estimate_vitality(g, sample, &training_sir)?
            .into_iter()
            .map(|e| e.mean_influence)
            .collect())
    };

    let (sample, targets, k, candidates) = match cfg.sample.method {
        SamplingMethod::Uniform => {
            let all: Vec<usize> = (0..n).collect();
            let sample = uniform_sample(&all, s, &mut rng::stream(seed, &[purpose::SAMPLING]))?;
            let targets = targets_for(&sample)?;
            (sample, targets, None, None)
        }
        SamplingMethod::Cluster => {
            let draw = |k: usize| -> Result<(Vec<usize>, Vec<f64>)> {
                let mut krng = rng::stream(seed, &[purpose::KMEANS, k as u64]);
                let clustering = kmeans(&xs, k, &mut krng, DEFAULT_MAX_ITERS)?;
                let sample = cluster_sample(&clustering, s, &mut rng::stream(seed, &[purpose::SAMPLING, k as u64]))?;
                let targets = targets_for(&sample)?;
                Ok((sample, targets))
            };
            match cfg.sample.k_override {
                Some(k) => {
                    let (sample, targets) = draw(k)?;
                    (sample, targets, Some(k), None)
                }
                None if n < 2 => {
                    let (sample, targets) = draw(1)?;
                    (sample, targets, Some(1), None)
                }
                None => {
                    let mut grng = rng::stream(seed, &[purpose::GAP_REFERENCE]);
                    let cand = k_candidates(&xs, SampleSpec::k_max(s), &mut grng)?;
                    let mut drawn = Vec::new();
                    let mut failure = None;
                    let k = cand.resolve(|k| match draw(k) {
                        Ok((sample, targets)) => {
                            let score = cross_validated_tau(regressor.as_ref(), &xs, &sample, &targets, seed);
                            drawn.push((k, sample, targets));
                            score
                        }
                        Err(e) => {
                            failure.get_or_insert(e);
                            None
                        }
                    });
                    if let Some(e) = failure {
                        return Err(e);
                    }
                    let (sample, targets) = match drawn.into_iter().find(|d| d.0 == k) {
                        Some((_, sample, targets)) => (sample, targets),
                        None => draw(k)?,
                    };
                    (sample, targets, Some(k), Some((cand.elbow, cand.gap)))
                }
            }
        }
    };

    let train_x: Vec<SparseVector> = sample.iter().map(|&u| xs[u].clone()).collect();
    let model = regressor.fit(&train_x, &targets)?;
    let predictions = model.predict_batch(&xs)?;
    let scores = eml_score(g, &predictions, &coreness.eks, cfg.alpha)?;
    let (epsilon, sigma) = match cfg.regressor {
        RegressorKind::Svr => {
            let (e, s) = resolve_params(&train_x, &targets, &cfg.svr);
            (Some(e), Some(s))
        }
        RegressorKind::Knn => (None, None),
    };
    Ok(EmlOutcome {
        ranking: Ranking::from_scores("eml", scores),
        sample,
        targets,
        predictions,
        k,
        k_candidates: candidates,
        epsilon,
        sigma,
    })
}

/// Kendall tau between held-out predictions and targets over `CV_FOLDS`
/// folds (leave-one-out when the sample is smaller). `None` when the sample
/// is too small to split or tau is undefined.
pub fn cross_validated_tau(
    regressor: &dyn Regressor,
    xs: &[SparseVector],
    sample: &[usize],
    targets: &[f64],
    seed: u64,
) -> Option<f64> {
    let s = sample.len();
    if s < 3 {
        return None;
    }
    let folds = CV_FOLDS.min(s);
    let mut order: Vec<usize> = (0..s).collect();
    order.shuffle(&mut rng::stream(seed, &[purpose::CROSS_VALIDATION]));
    let mut held_out = vec![0.0; s];
    for f in 0..folds {
        let test: Vec<usize> = order.iter().copied().skip(f).step_by(folds).collect();
        let train: Vec<usize> = (0..s).filter(|i| !test.contains(i)).collect();
        let tx: Vec<SparseVector> = train.iter().map(|&i| xs[sample[i]].clone()).collect();
        let ty: Vec<f64> = train.iter().map(|&i| targets[i]).collect();
        let model = regressor.fit(&tx, &ty).ok()?;
        for &i in &test {
            held_out[i] = model.predict(&xs[sample[i]]).ok()?;
        }
    }
    kendall_tau(&held_out, targets).ok().flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::degree_centrality;
    use crate::generators;
    use crate::metrics::kendall_tau;
    use crate::sir::ground_truth_ranking;
    use proptest::prelude::*;

    fn config(beta: f64, fraction: f64, seed: u64) -> EmlConfig {
        let mut cfg = EmlConfig::new(SirConfig::new(beta, 1.0, 500, seed).unwrap(), seed);
        cfg.sample.fraction = fraction;
        cfg
    }

    #[test]
    fn score_fixtures() {
        let p3 = generators::path(3);
        let eml = eml_score(&p3, &[1.0, 2.0, 1.0], &[3.0, 4.0, 3.0], 0.5).unwrap();
        assert_eq!(eml, vec![5.0, 5.0, 5.0]);
        assert_eq!(eml_score(&p3, &[1.0, 2.0, 1.0], &[3.0, 4.0, 3.0], 0.0).unwrap(), vec![1.0, 2.0, 1.0]);
        let lonely = Graph::with_labels(vec!["a".into(), "b".into(), "c".into()], &[(0, 1)]).unwrap();
        let eml = eml_score(&lonely, &[1.0, 1.0, 7.0], &[1.0, 1.0, 0.0], 1.0).unwrap();
        assert_eq!(eml[2], 7.0);
        assert!(eml_score(&p3, &[1.0; 3], &[1.0; 3], 1.5).is_err());
        assert!(eml_score(&p3, &[1.0; 3], &[1.0; 3], -0.1).is_err());
        assert!(eml_score(&p3, &[1.0; 2], &[1.0; 3], 0.5).is_err());
    }

    #[test]
    fn deterministic() {
        let g = generators::preferential_attachment(300, 1.25, 3);
        let cfg = config(0.3, 0.05, 11);
        let a = run_eml_detailed(&g, &cfg).unwrap();
        let b = run_eml_detailed(&g, &cfg).unwrap();
        assert_eq!(a.ranking, b.ranking);
        assert_eq!(a.sample.len(), 15);
        let mut clustered = cfg;
        clustered.sample.method = SamplingMethod::Cluster;
        let a = run_eml_detailed(&g, &clustered).unwrap();
        let b = run_eml_detailed(&g, &clustered).unwrap();
        assert_eq!(a.ranking, b.ranking);
        assert_eq!(a.sample, b.sample);
        assert!(a.k.is_some());
    }

    #[test]
    fn tiny_fraction_is_rejected() {
        let g = generators::cycle(20);
        let cfg = config(0.3, 0.005, 1);
        assert!(run_eml(&g, &cfg).is_err());
    }

    #[test]
    fn symmetric_graph_gives_flat_scores() {
        // One training node: the fitted model is the constant target.
        let g = generators::cycle(100);
        let out = run_eml_detailed(&g, &config(0.5, 0.005, 4)).unwrap();
        assert_eq!(out.sample.len(), 1);
        let first = out.ranking.scores[0];
        assert!(out.ranking.scores.iter().all(|s| (s - first).abs() <= 1e-9 * first.abs()));
        assert_eq!(out.ranking.order, (0..100).collect::<Vec<_>>());

        // A tube wide enough to contain every target gives the same result.
        let mut cfg = config(0.5, 0.1, 4);
        cfg.svr.epsilon = Some(1e6);
        let out = run_eml_detailed(&g, &cfg).unwrap();
        let first = out.ranking.scores[0];
        assert!(out.ranking.scores.iter().all(|s| (s - first).abs() <= 1e-9 * first.abs()));
        assert_eq!(out.ranking.order, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn beats_degree_on_scale_free_graph() {
        let g = generators::preferential_attachment(300, 1.25, 8);
        let beta = 1.05 * g.stats().unwrap().beta_threshold.unwrap();
        let truth = ground_truth_ranking(&g, &SirConfig::new(beta, 1.0, 3000, 99).unwrap()).unwrap();
        let mut cfg = config(beta, 0.05, 99);
        cfg.sir.runs = 3000;
        let out = run_eml_detailed(&g, &cfg).unwrap();
        let eml_tau = kendall_tau(&out.ranking.scores, &truth.scores).unwrap().unwrap();
        let deg_tau = kendall_tau(&degree_centrality(&g), &truth.scores).unwrap().unwrap();
        assert!(eml_tau > deg_tau, "eml {eml_tau} vs degree {deg_tau}");

        // The model fits its own training data in rank order.
        let fitted: Vec<f64> = out.sample.iter().map(|&u| out.predictions[u]).collect();
        assert!(kendall_tau(&fitted, &out.targets).unwrap().unwrap() > 0.0);
    }

    #[test]
    fn knn_regressor_runs() {
        let g = generators::preferential_attachment(200, 1.25, 2);
        let mut cfg = config(0.3, 0.05, 5);
        cfg.regressor = RegressorKind::Knn;
        let out = run_eml_detailed(&g, &cfg).unwrap();
        assert_eq!(out.ranking.len(), 200);
        assert!(out.sigma.is_none());
    }

    #[test]
    fn cross_validation_needs_three_points() {
        let xs = vec![SparseVector::from_dense(&[1.0]), SparseVector::from_dense(&[2.0])];
        let svr = SvrRegressor::default();
        assert_eq!(cross_validated_tau(&svr, &xs, &[0, 1], &[1.0, 2.0], 0), None);
    }

    proptest! {
        #[test]
        fn positive_rescaling_keeps_order(c in 0.01f64..100.0, seed in any::<u64>()) {
            let g = generators::gnp(40, 0.1, seed);
            let eks = CorenessTable::compute(&g).eks;
            let pred: Vec<f64> = (0..40).map(|u| ((u as u64 ^ seed) % 17) as f64 + 0.5).collect();
            let base = eml_score(&g, &pred, &eks, 0.5).unwrap();
            let scaled: Vec<f64> = pred.iter().map(|p| p * c).collect();
            let out = eml_score(&g, &scaled, &eks, 0.5).unwrap();
            for (a, b) in base.iter().zip(&out) {
                prop_assert!((a * c - b).abs() <= 1e-9 * b.abs().max(1.0));
            }
            // Exact ties can break differently after rounding, so compare
            // orders only when the base scores are pairwise distinct.
            let mut sorted = base.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).all(|w| w[1] - w[0] > 1e-9 * w[1].abs()) {
                prop_assert_eq!(Ranking::from_scores("a", base).order, Ranking::from_scores("b", out).order);
            }
        }
    }
}
