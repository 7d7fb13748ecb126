use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

/// Nodes ordered by descending score, ties broken by ascending node index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub method: String,
    /// Node indices, best first.
    pub order: Vec<usize>,
    /// Score of each node, indexed by node (not by rank).
    pub scores: Vec<f64>,
}

impl Ranking {
    pub fn from_scores(method: impl Into<String>, scores: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| descending(scores[a], scores[b]).then(a.cmp(&b)));
        Ranking {
            method: method.into(),
            order,
            scores,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The first `k` nodes (all of them when `k` exceeds the length).
    pub fn top(&self, k: usize) -> &[usize] {
        &self.order[..k.min(self.order.len())]
    }

    /// Scores in rank order.
    pub fn ordered_scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.order.iter().map(|&u| self.scores[u])
    }

    /// `rank,node_label,score` rows (1-based rank) with a header line.
    pub fn to_csv(&self, g: &Graph) -> String {
        let mut out = String::from("rank,node_label,score\n");
        for (i, &u) in self.order.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", i + 1, g.label(u), self.scores[u]);
        }
        out
    }
}

fn descending(a: f64, b: f64) -> Ordering {
    b.total_cmp(&a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_descending_with_index_ties() {
        let r = Ranking::from_scores("t", vec![1.0, 3.0, 3.0, 2.0]);
        assert_eq!(r.order, vec![1, 2, 3, 0]);
        assert_eq!(r.top(2), &[1, 2]);
        assert_eq!(r.ordered_scores().collect::<Vec<_>>(), vec![3.0, 3.0, 2.0, 1.0]);
    }

    #[test]
    fn full_tie_is_index_order() {
        let r = Ranking::from_scores("t", vec![5.0; 4]);
        assert_eq!(r.order, vec![0, 1, 2, 3]);
    }
}
