//! Collective node features.
//!
//! Node `u` is described by a `|V|`-dimensional vector that is non-zero only
//! at `u`'s neighbours, where neighbour `v` contributes
//! `alpha1 * degree(v) + alpha2 * eks(v)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::CorenessTable;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub dim: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            entries: Vec::new(),
        }
    }

    /// Builds a vector from unordered entries; duplicates are summed.
    pub fn from_entries(dim: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, x) in entries {
            if i >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: i + 1,
                });
            }
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += x,
                _ => merged.push((i, x)),
            }
        }
        Ok(SparseVector {
            dim,
            entries: merged,
        })
    }

    pub fn from_dense(values: &[f64]) -> Self {
        SparseVector {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0.0)
                .map(|(i, &x)| (i, x))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, x) in &self.entries {
            out[i] = x;
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map(|p| self.entries[p].1)
            .unwrap_or(0.0)
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Squared Euclidean distance, merged over both supports.
    pub fn squared_distance(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            let d = if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                i += 1;
                a[i - 1].1
            } else if i >= a.len() || b[j].0 < a[i].0 {
                j += 1;
                b[j - 1].1
            } else {
                i += 1;
                j += 1;
                a[i - 1].1 - b[j - 1].1
            };
            acc += d * d;
        }
        acc
    }

    /// Squared distance to a dense point of the same dimension, given that
    /// point's squared norm.
    pub fn squared_distance_dense(&self, dense: &[f64], dense_sq_norm: f64) -> f64 {
        let mut acc = dense_sq_norm;
        for &(i, x) in &self.entries {
            acc += x * x - 2.0 * x * dense[i];
        }
        acc.max(0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        SparseVector {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, x)| (i, c * x)).collect(),
        }
    }
}

/// Feature weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureWeights {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl Default for FeatureWeights {
    fn default() -> Self {
        FeatureWeights {
            alpha1: 1.0,
            alpha2: 1.0,
        }
    }
}

impl FeatureWeights {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(self.alpha1) || !ok(self.alpha2) {
            return Err(Error::param("alpha1/alpha2", "weights must be finite and non-negative"));
        }
        if self.alpha1 == 0.0 && self.alpha2 == 0.0 {
            return Err(Error::param("alpha1/alpha2", "weights cannot both be zero"));
        }
        Ok(())
    }
}

pub fn degree_vector(g: &Graph) -> Vec<f64> {
    (0..g.node_count()).map(|u| g.degree(u) as f64).collect()
}

pub fn coreness_vector(g: &Graph) -> Vec<f64> {
    CorenessTable::compute(g).eks
}

fn node_values(degree: &[f64], eks: &[f64], w: FeatureWeights) -> Vec<f64> {
    degree
        .iter()
        .zip(eks)
        .map(|(&d, &e)| w.alpha1 * d + w.alpha2 * e)
        .collect()
}

fn row(g: &Graph, u: usize, values: &[f64]) -> SparseVector {
    SparseVector {
        dim: g.node_count(),
        entries: g
            .neighbors(u)
            .iter()
            .map(|&v| (v, values[v]))
            .filter(|e| e.1 != 0.0)
            .collect(),
    }
}

pub fn feature_vector(g: &Graph, u: usize, weights: FeatureWeights) -> Result<SparseVector> {
    g.check_node(u)?;
    weights.validate()?;
    let values = node_values(&degree_vector(g), &coreness_vector(g), weights);
    Ok(row(g, u, &values))
}

/// Feature vectors of every node, sharing one degree and one coreness pass.
pub fn feature_matrix(g: &Graph, weights: FeatureWeights, coreness: &CorenessTable) -> Result<Vec<SparseVector>> {
    weights.validate()?;
    let values = node_values(&degree_vector(g), &coreness.eks, weights);
    Ok((0..g.node_count())
        .into_par_iter()
        .map(|u| row(g, u, &values))
        .collect())
}

/// Divides every column by its largest absolute value, leaving sparsity
/// intact. Columns that are entirely zero stay zero.
pub fn normalize_columns(rows: &mut [SparseVector]) {
    let Some(dim) = rows.first().map(|r| r.dim) else {
        return;
    };
    let mut scale = vec![0.0f64; dim];
    for r in rows.iter() {
        for &(i, x) in &r.entries {
            scale[i] = scale[i].max(x.abs());
        }
    }
    for r in rows.iter_mut() {
        for e in r.entries.iter_mut() {
            e.1 /= scale[e.0];
        }
    }
}

/// `node,neighbour,value` triples using the graph's labels.
pub fn feature_csv(g: &Graph, rows: &[SparseVector]) -> String {
    let mut out = String::from("node,neighbour,value\n");
    for (u, r) in rows.iter().enumerate() {
        for &(v, x) in &r.entries {
            let _ = writeln!(out, "{},{},{}", g.label(u), g.label(v), x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use proptest::prelude::*;

    fn matrix(g: &Graph, w: FeatureWeights) -> Vec<SparseVector> {
        feature_matrix(g, w, &CorenessTable::compute(g)).unwrap()
    }

    #[test]
    fn degree_and_coreness_vectors() {
        assert_eq!(degree_vector(&generators::complete(3)), vec![2.0; 3]);
        assert_eq!(degree_vector(&generators::star(4)), vec![3.0, 1.0, 1.0, 1.0]);
        let empty = Graph::from_edges(2, &[]).unwrap();
        assert_eq!(degree_vector(&empty), vec![0.0, 0.0]);
        assert_eq!(coreness_vector(&generators::complete(3)), vec![12.0; 3]);
        assert_eq!(coreness_vector(&empty), vec![0.0, 0.0]);
        assert_eq!(coreness_vector(&generators::path(3)), vec![3.0, 4.0, 3.0]);
    }

    #[test]
    fn feature_vector_fixtures() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(feature_vector(&g, 2, FeatureWeights::default()).unwrap().nnz(), 0);

        let star = generators::star(4);
        let x = feature_vector(&star, 1, FeatureWeights { alpha1: 1.0, alpha2: 0.0 }).unwrap();
        assert_eq!(x.entries, vec![(0, 3.0)]);

        let tri = generators::complete(3);
        let x = feature_vector(&tri, 0, FeatureWeights::default()).unwrap();
        assert_eq!(x.entries, vec![(1, 14.0), (2, 14.0)]);
        let m = matrix(&tri, FeatureWeights::default());
        for u in 0..3 {
            for v in 0..3 {
                assert_eq!(m[u].get(v), if u == v { 0.0 } else { 14.0 });
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        let tri = generators::complete(3);
        assert!(feature_vector(&tri, 3, FeatureWeights::default()).is_err());
        assert!(feature_vector(&tri, 0, FeatureWeights { alpha1: 0.0, alpha2: 0.0 }).is_err());
        assert!(feature_vector(&tri, 0, FeatureWeights { alpha1: -1.0, alpha2: 1.0 }).is_err());
    }

    #[test]
    fn vector_algebra() {
        let a = SparseVector::from_dense(&[1.0, 0.0, 2.0, 0.0]);
        let b = SparseVector::from_entries(4, vec![(3, 1.0), (0, 4.0), (3, 1.0)]).unwrap();
        assert_eq!(b.entries, vec![(0, 4.0), (3, 2.0)]);
        assert_eq!(a.dot(&b), 4.0);
        assert_eq!(a.squared_distance(&b), 9.0 + 4.0 + 4.0);
        let dense = b.to_dense();
        assert!((a.squared_distance_dense(&dense, b.squared_norm()) - 17.0).abs() < 1e-12);
        assert!(SparseVector::from_entries(2, vec![(2, 1.0)]).is_err());
    }

    #[test]
    fn normalization_scales_columns() {
        let mut rows = matrix(&generators::path(3), FeatureWeights::default());
        normalize_columns(&mut rows);
        assert_eq!(rows[0].entries, vec![(1, 1.0)]);
        assert_eq!(rows[1].entries, vec![(0, 1.0), (2, 1.0)]);
    }

    #[test]
    fn csv_dump() {
        let g = generators::path(2);
        let rows = matrix(&g, FeatureWeights::default());
        assert_eq!(feature_csv(&g, &rows), "node,neighbour,value\n0,1,3\n1,0,3\n");
    }

    proptest! {
        #[test]
        fn sparsity_scaling_equivariance(
            n in 2usize..=20,
            edges in prop::collection::vec((0usize..20, 0usize..20), 0..60),
            a1 in 0.1f64..3.0,
            a2 in 0.0f64..3.0,
            c in 0.1f64..10.0,
            shift in 0usize..20,
        ) {
            let e: Vec<_> = edges.iter().map(|&(u, v)| (u % n, v % n)).collect();
            let g = Graph::from_edges(n, &e).unwrap();
            let w = FeatureWeights { alpha1: a1, alpha2: a2 };
            let rows = matrix(&g, w);
            let nnz: usize = rows.iter().map(|r| r.nnz()).sum();
            prop_assert_eq!(nnz, 2 * g.edge_count());
            let scaled = matrix(&g, FeatureWeights { alpha1: c * a1, alpha2: c * a2 });
            for u in 0..n {
                prop_assert!(rows[u].entries.iter().all(|&(v, _)| g.has_edge(u, v)));
                prop_assert_eq!(&rows[u], &feature_vector(&g, u, w).unwrap());
                for (x, y) in rows[u].entries.iter().zip(&scaled[u].entries) {
                    prop_assert!((c * x.1 - y.1).abs() <= 1e-9 * y.1.abs().max(1.0));
                }
            }
            // Rotation relabeling.
            let perm: Vec<usize> = (0..n).map(|u| (u + shift) % n).collect();
            let moved = matrix(&g.permuted(&perm).unwrap(), w);
            for u in 0..n {
                for &(v, x) in &rows[u].entries {
                    prop_assert_eq!(moved[perm[u]].get(perm[v]), x);
                }
            }
        }
    }
}
