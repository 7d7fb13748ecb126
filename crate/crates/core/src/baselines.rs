//! Classical centralities used as comparison rankings.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::decomposition::{h_indices, k_shell};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ranking::Ranking;

/// Horizon of the dynamics-sensitive power series when none is given.
pub const DEFAULT_DS_HORIZON: usize = 5;

pub fn degree_centrality(g: &Graph) -> Vec<f64> {
    (0..g.node_count()).map(|u| g.degree(u) as f64).collect()
}

pub fn ks_centrality(g: &Graph) -> Vec<f64> {
    k_shell(g).into_iter().map(|k| k as f64).collect()
}

pub fn h_index_centrality(g: &Graph) -> Vec<f64> {
    h_indices(g).into_iter().map(|h| h as f64).collect()
}

/// `LH(u) = H(u) + Σ_{v ∈ Γ(u)} H(v)`.
pub fn local_h_index(g: &Graph) -> Vec<f64> {
    let h = h_indices(g);
    (0..g.node_count())
        .map(|u| (h[u] + g.neighbors(u).iter().map(|&v| h[v]).sum::<usize>()) as f64)
        .collect()
}

/// Distinct nodes within distance 2 of every node, excluding the node itself.
fn two_hop_counts(g: &Graph) -> Vec<usize> {
    (0..g.node_count())
        .into_par_iter()
        .map_init(
            || vec![usize::MAX; g.node_count()],
            |mark, w| {
                mark[w] = w;
                let mut count = 0;
                for &v in g.neighbors(w) {
                    if mark[v] != w {
                        mark[v] = w;
                        count += 1;
                    }
                    for &x in g.neighbors(v) {
                        if mark[x] != w {
                            mark[x] = w;
                            count += 1;
                        }
                    }
                }
                count
            },
        )
        .collect()
}

/// LocalRank: `Q(v) = Σ_{w ∈ Γ(v)} N(w)` and `C_L(u) = Σ_{v ∈ Γ(u)} Q(v)`,
/// where `N(w)` counts nodes within two hops of `w`.
pub fn local_rank(g: &Graph) -> Vec<f64> {
    let n2 = two_hop_counts(g);
    let q: Vec<usize> = (0..g.node_count())
        .map(|v| g.neighbors(v).iter().map(|&w| n2[w]).sum())
        .collect();
    (0..g.node_count())
        .map(|u| g.neighbors(u).iter().map(|&v| q[v]).sum::<usize>() as f64)
        .collect()
}

/// Sum of the neighbours' shell indices.
pub fn cnc(g: &Graph) -> Vec<f64> {
    let ks = k_shell(g);
    (0..g.node_count())
        .map(|u| g.neighbors(u).iter().map(|&v| ks[v]).sum::<usize>() as f64)
        .collect()
}

/// Sum of shell indices over every node at distance 1 or 2.
pub fn extended_kshell_sum(g: &Graph) -> Vec<f64> {
    let ks = k_shell(g);
    (0..g.node_count())
        .into_par_iter()
        .map_init(
            || vec![usize::MAX; g.node_count()],
            |mark, u| {
                mark[u] = u;
                let mut total = 0usize;
                for &v in g.neighbors(u) {
                    if mark[v] != u {
                        mark[v] = u;
                        total += ks[v];
                    }
                    for &w in g.neighbors(v) {
                        if mark[w] != u {
                            mark[w] = u;
                            total += ks[w];
                        }
                    }
                }
                total as f64
            },
        )
        .collect()
}

/// `LS(u, v) = 1 − |Γ(u) ∩ Γ(v)| / |Γ(u) ∪ Γ(v)|`.
pub fn link_significance_pair(g: &Graph, u: usize, v: usize) -> f64 {
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - common;
    if union == 0 {
        return 0.0;
    }
    1.0 - common as f64 / union as f64
}

/// `I_u = Σ_{v ∈ Γ(u)} LS(u, v) · ks(v)`.
pub fn link_significance(g: &Graph) -> Vec<f64> {
    let ks = k_shell(g);
    (0..g.node_count())
        .into_par_iter()
        .map(|u| {
            g.neighbors(u)
                .iter()
                .map(|&v| link_significance_pair(g, u, v) * ks[v] as f64)
                .sum()
        })
        .collect()
}

/// Row sums of `βA + β²A² + ... + βᵗAᵗ`, via `t` sparse products with the
/// all-ones vector.
pub fn ds_centrality(g: &Graph, beta: f64, t: usize) -> Result<Vec<f64>> {
    if t == 0 {
        return Err(Error::param("t", "horizon must be at least 1"));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::param("beta", format!("{beta} must be non-negative")));
    }
    let n = g.node_count();
    let mut term = vec![1.0; n];
    let mut total = vec![0.0; n];
    for _ in 0..t {
        term = (0..n)
            .map(|u| beta * g.neighbors(u).iter().map(|&v| term[v]).sum::<f64>())
            .collect();
        for (acc, x) in total.iter_mut().zip(&term) {
            *acc += x;
        }
    }
    Ok(total)
}

/// Named baseline with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Baseline {
    Degree,
    KShell,
    HIndex,
    LocalH,
    LocalRank,
    Cnc,
    ExtendedKShellSum,
    LinkSignificance,
    DynamicsSensitive { beta: f64, horizon: usize },
}

impl Baseline {
    /// Every baseline that does not depend on the dynamics.
    pub const STATIC: [Baseline; 8] = [
        Baseline::Degree,
        Baseline::KShell,
        Baseline::HIndex,
        Baseline::LocalH,
        Baseline::LocalRank,
        Baseline::Cnc,
        Baseline::ExtendedKShellSum,
        Baseline::LinkSignificance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Baseline::Degree => "degree",
            Baseline::KShell => "ks",
            Baseline::HIndex => "hindex",
            Baseline::LocalH => "lh",
            Baseline::LocalRank => "localrank",
            Baseline::Cnc => "cnc",
            Baseline::ExtendedKShellSum => "eks-sum",
            Baseline::LinkSignificance => "ls",
            Baseline::DynamicsSensitive { .. } => "ds",
        }
    }

    pub fn scores(&self, g: &Graph) -> Result<Vec<f64>> {
        Ok(match *self {
            Baseline::Degree => degree_centrality(g),
            Baseline::KShell => ks_centrality(g),
            Baseline::HIndex => h_index_centrality(g),
            Baseline::LocalH => local_h_index(g),
            Baseline::LocalRank => local_rank(g),
            Baseline::Cnc => cnc(g),
            Baseline::ExtendedKShellSum => extended_kshell_sum(g),
            Baseline::LinkSignificance => link_significance(g),
            Baseline::DynamicsSensitive { beta, horizon } => ds_centrality(g, beta, horizon)?,
        })
    }

    pub fn rank(&self, g: &Graph) -> Result<Ranking> {
        Ok(Ranking::from_scores(self.name(), self.scores(g)?))
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Baseline {
    type Err = Error;

    /// Parses a name; `ds` gets placeholder parameters that callers replace.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "degree" => Baseline::Degree,
            "ks" => Baseline::KShell,
            "hindex" => Baseline::HIndex,
            "lh" => Baseline::LocalH,
            "localrank" => Baseline::LocalRank,
            "cnc" => Baseline::Cnc,
            "eks-sum" => Baseline::ExtendedKShellSum,
            "ls" => Baseline::LinkSignificance,
            "ds" => Baseline::DynamicsSensitive {
                beta: 0.1,
                horizon: DEFAULT_DS_HORIZON,
            },
            other => return Err(Error::param("method", format!("unknown baseline `{other}`"))),
        })
    }
}
