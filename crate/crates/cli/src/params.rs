//! Pipeline parameters shared by every command. The same struct is parsed
//! from flags and from the JSON config file; flags win field by field.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use eml_core::baselines::{Baseline, DEFAULT_DS_HORIZON};
use eml_core::eml::{EmlConfig, RegressorKind, DEFAULT_ALPHA};
use eml_core::features::FeatureWeights;
use eml_core::sampling::{SampleSpec, SamplingMethod, DEFAULT_FRACTION};
use eml_core::sir::{SirConfig, DEFAULT_RUNS};
use eml_core::Graph;
use serde::{Deserialize, Serialize};

/// Multiple of the epidemic threshold used when no `--beta` is given.
pub const DEFAULT_BETA_FACTOR: f64 = 1.05;

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct Params {
    /// Master seed; every random stream is derived from it [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Infection probability [default: 1.05 x epidemic threshold]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Recovery probability [default: 1]
    #[arg(long)]
    pub mu: Option<f64>,
    /// SIR runs per node [default: 3000]
    #[arg(long)]
    pub runs: Option<usize>,
    /// Fraction of nodes used for training [default: 0.005]
    #[arg(long)]
    pub sample_frac: Option<f64>,
    /// Training-set selection: uniform or cluster [default: uniform]
    #[arg(long)]
    pub sampling: Option<SamplingMethod>,
    /// Weight of neighbour predictions in the EML score [default: 0.5]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Degree weight in the feature vectors [default: 1]
    #[arg(long)]
    pub alpha1: Option<f64>,
    /// Extended-coreness weight in the feature vectors [default: 1]
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// SVR cost C [default: 10]
    #[arg(long)]
    pub svr_c: Option<f64>,
    /// SVR tube width [default: 1% of the training-target range]
    #[arg(long)]
    pub svr_eps: Option<f64>,
    /// RBF bandwidth [default: median heuristic]
    #[arg(long)]
    pub svr_sigma: Option<f64>,
    /// Horizon of the DS power series [default: 5]
    #[arg(long)]
    pub ds_t: Option<usize>,
    /// Fixed cluster count for cluster sampling [default: chosen by scan]
    #[arg(long)]
    pub k: Option<usize>,
    /// Regressor: svr or knn [default: svr]
    #[arg(long)]
    pub regressor: Option<RegressorKind>,
    /// Scale feature columns to unit max-abs before training [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub normalize: Option<bool>,
}

impl Params {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Field-wise `self.or(file)`.
    pub fn over(self, file: Params) -> Params {
        Params {
            seed: self.seed.or(file.seed),
            beta: self.beta.or(file.beta),
            mu: self.mu.or(file.mu),
            runs: self.runs.or(file.runs),
            sample_frac: self.sample_frac.or(file.sample_frac),
            sampling: self.sampling.or(file.sampling),
            alpha: self.alpha.or(file.alpha),
            alpha1: self.alpha1.or(file.alpha1),
            alpha2: self.alpha2.or(file.alpha2),
            svr_c: self.svr_c.or(file.svr_c),
            svr_eps: self.svr_eps.or(file.svr_eps),
            svr_sigma: self.svr_sigma.or(file.svr_sigma),
            ds_t: self.ds_t.or(file.ds_t),
            k: self.k.or(file.k),
            regressor: self.regressor.or(file.regressor),
            normalize: self.normalize.or(file.normalize),
        }
    }

    /// Flags layered over the optional config file.
    pub fn load(self, config: Option<&Path>) -> Result<Params> {
        Ok(match config {
            Some(path) => self.over(Params::from_file(path)?),
            None => self,
        })
    }

    /// Fills every default. `beta` falls back to a multiple of the graph's
    /// epidemic threshold, and stays unset when that is undefined.
    pub fn resolve(&self, g: &Graph) -> Result<Resolved> {
        let beta = match self.beta {
            Some(b) => Some(b),
            None => g.stats()?.beta_threshold.map(|th| (DEFAULT_BETA_FACTOR * th).min(1.0)),
        };
        Ok(Resolved {
            seed: self.seed.unwrap_or(0),
            beta,
            mu: self.mu.unwrap_or(1.0),
            runs: self.runs.unwrap_or(DEFAULT_RUNS),
            sample_frac: self.sample_frac.unwrap_or(DEFAULT_FRACTION),
            sampling: self.sampling.unwrap_or(SamplingMethod::Uniform),
            alpha: self.alpha.unwrap_or(DEFAULT_ALPHA),
            alpha1: self.alpha1.unwrap_or(1.0),
            alpha2: self.alpha2.unwrap_or(1.0),
            svr_c: self.svr_c.unwrap_or(10.0),
            svr_eps: self.svr_eps,
            svr_sigma: self.svr_sigma,
            ds_t: self.ds_t.unwrap_or(DEFAULT_DS_HORIZON),
            k: self.k,
            regressor: self.regressor.unwrap_or(RegressorKind::Svr),
            normalize: self.normalize.unwrap_or(false),
        })
    }
}

/// Parameters with every default filled in; written verbatim into output
/// metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Resolved {
    pub seed: u64,
    pub beta: Option<f64>,
    pub mu: f64,
    pub runs: usize,
    pub sample_frac: f64,
    pub sampling: SamplingMethod,
    pub alpha: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub svr_c: f64,
    pub svr_eps: Option<f64>,
    pub svr_sigma: Option<f64>,
    pub ds_t: usize,
    pub k: Option<usize>,
    pub regressor: RegressorKind,
    pub normalize: bool,
}

impl Resolved {
    pub fn beta(&self) -> Result<f64> {
        self.beta
            .context("graph has no positive epidemic threshold estimate; pass --beta explicitly")
    }

    pub fn sir(&self) -> Result<SirConfig> {
        Ok(SirConfig::new(self.beta()?, self.mu, self.runs, self.seed)?)
    }

    pub fn eml(&self) -> Result<EmlConfig> {
        let mut cfg = EmlConfig::new(self.sir()?, self.seed);
        cfg.alpha = self.alpha;
        cfg.weights = FeatureWeights {
            alpha1: self.alpha1,
            alpha2: self.alpha2,
        };
        cfg.sample = SampleSpec {
            fraction: self.sample_frac,
            method: self.sampling,
            rng_seed: self.seed,
            k_override: self.k,
        };
        cfg.svr.cost = self.svr_c;
        cfg.svr.epsilon = self.svr_eps;
        cfg.svr.sigma = self.svr_sigma;
        cfg.regressor = self.regressor;
        cfg.normalize = self.normalize;
        cfg.validate()?;
        Ok(cfg)
    }

    /// A named baseline with the dynamics-dependent parameters filled in.
    pub fn baseline(&self, name: &str) -> Result<Baseline> {
        Ok(match name.parse::<Baseline>()? {
            Baseline::DynamicsSensitive { .. } => Baseline::DynamicsSensitive {
                beta: self.beta()?,
                horizon: self.ds_t,
            },
            b => b,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: Params = serde_json::from_str(r#"{"seed": 3, "beta": 0.2, "sample-frac": 0.1}"#).unwrap();
        let flags = Params {
            beta: Some(0.4),
            ..Params::default()
        };
        let merged = flags.over(file);
        assert_eq!(merged.seed, Some(3));
        assert_eq!(merged.beta, Some(0.4));
        assert_eq!(merged.sample_frac, Some(0.1));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(serde_json::from_str::<Params>(r#"{"betta": 0.2}"#).is_err());
    }

    #[test]
    fn default_beta_tracks_threshold() {
        let g = eml_core::generators::star(5);
        let r = Params::default().resolve(&g).unwrap();
        let th = g.stats().unwrap().beta_threshold.unwrap();
        assert!((r.beta().unwrap() - DEFAULT_BETA_FACTOR * th).abs() < 1e-15);
        assert_eq!(r.runs, DEFAULT_RUNS);
        let ds = r.baseline("ds").unwrap();
        assert_eq!(
            ds,
            Baseline::DynamicsSensitive {
                beta: r.beta().unwrap(),
                horizon: DEFAULT_DS_HORIZON
            }
        );
        let matching = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let r = Params::default().resolve(&matching).unwrap();
        assert!(r.beta.is_none());
        assert!(r.sir().is_err());
        assert!(r.baseline("degree").is_ok());
    }
}
