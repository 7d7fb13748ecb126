//! Discrete-time SIR diffusion and Monte-Carlo vitality estimates.
//!
//! One run starts with a single infected seed. In every round each infected
//! node tries once to infect each neighbour that was susceptible at the start
//! of the round (probability `beta`), then recovers with probability `mu`.
//! Nodes infected during a round start spreading in the next one. The run ends
//! when nobody is infected; its influence is the number of removed nodes,
//! seed included.

use std::fmt::Write as _;

use rand::distributions::{Bernoulli, Distribution};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ranking::Ranking;
use crate::rng;

/// Runs per node used for ground truth unless overridden.
pub const DEFAULT_RUNS: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirConfig {
    pub beta: f64,
    pub mu: f64,
    pub runs: usize,
    pub master_seed: u64,
}

impl SirConfig {
    pub fn new(beta: f64, mu: f64, runs: usize, master_seed: u64) -> Result<Self> {
        let cfg = SirConfig {
            beta,
            mu,
            runs,
            master_seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        validate_rates(self.beta, self.mu)?;
        if self.runs == 0 {
            return Err(Error::param("runs", "at least one run is required"));
        }
        Ok(())
    }
}

fn validate_rates(beta: f64, mu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::param("beta", format!("{beta} is not a probability")));
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::param("mu", format!("{mu} must lie in (0, 1]")));
    }
    Ok(())
}

/// Mean influence of one seed node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VitalityEstimate {
    pub node: usize,
    pub mean_influence: f64,
    pub runs: usize,
    /// Standard error of the mean (sample standard deviation / sqrt(runs)).
    pub std_error: f64,
}

/// Compartment sizes after a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Compartments {
    pub susceptible: usize,
    pub infected: usize,
    pub removed: usize,
}

const SUSCEPTIBLE: u8 = 0;
const INFECTED: u8 = 1;
const REMOVED: u8 = 2;

/// Reusable scratch space for repeated runs on one graph.
pub struct SirSimulator<'g> {
    graph: &'g Graph,
    state: Vec<u8>,
    touched: Vec<usize>,
    infected: Vec<usize>,
    next: Vec<usize>,
}

impl<'g> SirSimulator<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        SirSimulator {
            graph,
            state: vec![SUSCEPTIBLE; graph.node_count()],
            touched: Vec::new(),
            infected: Vec::new(),
            next: Vec::new(),
        }
    }

    /// One run from `seed`; returns the number of removed nodes.
    pub fn run<R: Rng>(&mut self, seed: usize, spread: &Bernoulli, mu: f64, rng: &mut R) -> usize {
        self.run_observed(seed, spread, mu, rng, |_| {})
    }

    fn run_observed<R: Rng, F: FnMut(Compartments)>(
        &mut self,
        seed: usize,
        spread: &Bernoulli,
        mu: f64,
        rng: &mut R,
        mut observe: F,
    ) -> usize {
        let n = self.graph.node_count();
        for &u in &self.touched {
            self.state[u] = SUSCEPTIBLE;
        }
        self.touched.clear();
        self.infected.clear();

        self.state[seed] = INFECTED;
        self.touched.push(seed);
        self.infected.push(seed);
        let mut removed = 0usize;
        let certain_recovery = mu >= 1.0;

        while !self.infected.is_empty() {
            self.next.clear();
            for &u in &self.infected {
                for &v in self.graph.neighbors(u) {
                    if self.state[v] == SUSCEPTIBLE && spread.sample(rng) {
                        // Marking immediately keeps later attempts in the same
                        // round from double-counting v; v only spreads next round.
                        self.state[v] = INFECTED;
                        self.touched.push(v);
                        self.next.push(v);
                    }
                }
            }
            for &u in &self.infected {
                if certain_recovery || rng.gen_bool(mu) {
                    self.state[u] = REMOVED;
                    removed += 1;
                } else {
                    self.next.push(u);
                }
            }
            std::mem::swap(&mut self.infected, &mut self.next);
            let infected = self.infected.len();
            observe(Compartments {
                susceptible: n - self.touched.len(),
                infected,
                removed,
            });
        }
        removed
    }

    /// Like [`Self::run`], also returning compartment sizes after each round.
    pub fn run_traced<R: Rng>(
        &mut self,
        seed: usize,
        spread: &Bernoulli,
        mu: f64,
        rng: &mut R,
    ) -> (usize, Vec<Compartments>) {
        let mut trace = Vec::new();
        let removed = self.run_observed(seed, spread, mu, rng, |c| trace.push(c));
        (removed, trace)
    }
}

fn spread_distribution(beta: f64) -> Result<Bernoulli> {
    Bernoulli::new(beta).map_err(|e| Error::param("beta", e.to_string()))
}

/// A single SIR run from `seed_node`; returns its influence.
pub fn simulate_sir<R: Rng>(g: &Graph, seed_node: usize, beta: f64, mu: f64, rng: &mut R) -> Result<usize> {
    g.check_node(seed_node)?;
    validate_rates(beta, mu)?;
    let spread = spread_distribution(beta)?;
    Ok(SirSimulator::new(g).run(seed_node, &spread, mu, rng))
}

/// Mean influence over `cfg.runs` independent runs for each listed node.
///
/// Run `r` of node `u` draws from a stream derived from
/// `(master_seed, u, r)`, so results are independent of the thread count and
/// of which other nodes are estimated alongside.
pub fn estimate_vitality(g: &Graph, nodes: &[usize], cfg: &SirConfig) -> Result<Vec<VitalityEstimate>> {
    cfg.validate()?;
    for &u in nodes {
        g.check_node(u)?;
    }
    let spread = spread_distribution(cfg.beta)?;
    Ok(nodes
        .par_iter()
        .map_init(
            || SirSimulator::new(g),
            |sim, &u| {
                let mut sum = 0u64;
                let mut sum_sq = 0u128;
                for r in 0..cfg.runs {
                    let mut rng = rng::stream(cfg.master_seed, &[u as u64, r as u64]);
                    let x = sim.run(u, &spread, cfg.mu, &mut rng) as u64;
                    sum += x;
                    sum_sq += u128::from(x) * u128::from(x);
                }
                summarize(u, cfg.runs, sum, sum_sq)
            },
        )
        .collect())
}

fn summarize(node: usize, runs: usize, sum: u64, sum_sq: u128) -> VitalityEstimate {
    let k = runs as f64;
    let mean = sum as f64 / k;
    let std_error = if runs > 1 {
        let var = (sum_sq as f64 - k * mean * mean).max(0.0) / (k - 1.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    VitalityEstimate {
        node,
        mean_influence: mean,
        runs,
        std_error,
    }
}

/// All nodes ranked by simulated mean influence.
pub fn ground_truth_ranking(g: &Graph, cfg: &SirConfig) -> Result<Ranking> {
    let nodes: Vec<usize> = (0..g.node_count()).collect();
    let estimates = estimate_vitality(g, &nodes, cfg)?;
    Ok(ground_truth_from_estimates(g.node_count(), &estimates))
}

pub fn ground_truth_from_estimates(n: usize, estimates: &[VitalityEstimate]) -> Ranking {
    let mut scores = vec![0.0; n];
    for e in estimates {
        scores[e.node] = e.mean_influence;
    }
    Ranking::from_scores("ground-truth", scores)
}

/// `node_label,mean_influence,runs` rows with a header.
pub fn vitality_csv(g: &Graph, estimates: &[VitalityEstimate]) -> String {
    let mut out = String::from("node_label,mean_influence,runs\n");
    for e in estimates {
        let _ = writeln!(out, "{},{},{}", g.label(e.node), e.mean_influence, e.runs);
    }
    out
}
