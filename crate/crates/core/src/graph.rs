//! Simple undirected graphs with dense internal indices.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An immutable, simple, undirected graph.
///
/// Nodes are addressed by dense indices `0..n`; the original dataset labels
/// are kept alongside so results can be reported in the caller's vocabulary.
/// Adjacency is stored in compressed rows with each row sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    labels: Vec<String>,
    index_of: HashMap<String, usize>,
}

impl Graph {
    /// Builds a graph over nodes `0..n` labelled by their index.
    ///
    /// Self-loops are dropped and duplicate edges (in either orientation)
    /// merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    /// Builds a graph with explicit labels; `labels[i]` names node `i`.
    pub fn with_labels(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut pairs = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::InvalidNode {
                        index: w,
                        node_count: n,
                    });
                }
            }
            if u != v {
                pairs.push((u.min(v), u.max(v)));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0usize; offsets[n]];
        // Pairs are sorted by (min, max), so filling in this order leaves
        // every row ascending.
        for &(u, v) in &pairs {
            targets[cursor[u]] = v;
            cursor[u] += 1;
        }
        for &(u, v) in &pairs {
            targets[cursor[v]] = u;
            cursor[v] += 1;
        }
        for u in 0..n {
            targets[offsets[u]..offsets[u + 1]].sort_unstable();
        }

        let mut index_of = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if index_of.insert(label.clone(), i).is_some() {
                return Err(Error::param("labels", format!("duplicate label `{label}`")));
            }
        }
        Ok(Graph {
            offsets,
            targets,
            labels,
            index_of,
        })
    }

    /// Parses a whitespace- or comma-separated edge list.
    ///
    /// Lines starting with `%` or `#` and blank lines are skipped. Labels are
    /// assigned indices in first-seen order.
    pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut index_of: HashMap<String, usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
            if let Some(&i) = index_of.get(label) {
                return i;
            }
            let i = labels.len();
            labels.push(label.to_string());
            index_of.insert(label.to_string(), i);
            i
        };

        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .collect();
            if tokens.len() != 2 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected 2 node labels, found {}", tokens.len()),
                });
            }
            let u = intern(tokens[0], &mut labels);
            let v = intern(tokens[1], &mut labels);
            edges.push((u, v));
        }
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Self::with_labels(labels, &edges)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::parse_edge_list(text.as_bytes())
    }

    /// Serializes back to the edge-list format. Isolated nodes are written as
    /// self-loops so that re-parsing preserves the node set.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for u in 0..self.node_count() {
            if self.degree(u) == 0 {
                let _ = writeln!(out, "{} {}", self.labels[u], self.labels[u]);
            }
            for &v in self.neighbors(u) {
                if u < v {
                    let _ = writeln!(out, "{} {}", self.labels[u], self.labels[v]);
                }
            }
        }
        out
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Sorted neighbour indices of `u`. Panics on an out-of-range index.
    #[inline]
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Checked degree lookup.
    pub fn try_degree(&self, u: usize) -> Result<usize> {
        self.check_node(u)?;
        Ok(self.degree(u))
    }

    pub fn check_node(&self, u: usize) -> Result<()> {
        if u < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                index: u,
                node_count: self.node_count(),
            })
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|u| self.degree(u)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count())
            .flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| u < v)
    }

    pub fn label(&self, u: usize) -> &str {
        &self.labels[u]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index_of.get(label).copied()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }

    /// Relabels node `u` as `perm[u]`, keeping labels attached to the nodes
    /// they named.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: perm.len(),
            });
        }
        let mut labels = vec![String::new(); n];
        for u in 0..n {
            labels[perm[u]] = self.labels[u].clone();
        }
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Self::with_labels(labels, &edges)
    }

    pub fn stats(&self) -> Result<GraphStats> {
        GraphStats::compute(self)
    }
}

/// Summary statistics of a graph plus the heterogeneous mean-field epidemic
/// threshold `<k> / (<k^2> - <k>)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    pub avg_degree: f64,
    pub mean_degree_squared: f64,
    /// `None` when `<k^2> <= <k>`, where the estimate has no positive value.
    pub beta_threshold: Option<f64>,
}

impl GraphStats {
    pub const CSV_HEADER: &'static str = "n,m,max_deg,avg_deg,mean_deg_sq,beta_th";

    pub fn compute(g: &Graph) -> Result<Self> {
        let n = g.node_count();
        if n == 0 {
            return Err(Error::param("graph", "statistics need at least one node"));
        }
        let degrees = g.degrees();
        let max_degree = degrees.iter().copied().max().unwrap_or(0);
        let sum: usize = degrees.iter().sum();
        let sum_sq: usize = degrees.iter().map(|d| d * d).sum();
        let avg_degree = sum as f64 / n as f64;
        let mean_degree_squared = sum_sq as f64 / n as f64;
        let beta_threshold = (mean_degree_squared > avg_degree)
            .then(|| avg_degree / (mean_degree_squared - avg_degree));
        Ok(GraphStats {
            n,
            m: g.edge_count(),
            max_degree,
            avg_degree,
            mean_degree_squared,
            beta_threshold,
        })
    }

    /// One CSV data row matching [`Self::CSV_HEADER`]; an undefined threshold
    /// is written as an empty field.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.m,
            self.max_degree,
            self.avg_degree,
            self.mean_degree_squared,
            self.beta_threshold.map(|b| b.to_string()).unwrap_or_default()
        )
    }
}
