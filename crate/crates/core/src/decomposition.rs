//! k-shell decomposition, H-index and extended coreness.

use std::fmt::Write as _;

use crate::graph::Graph;

/// Shell index of every node, computed with the Batagelj–Zaversnik bucket
/// queue in `O(n + m)`. Isolated nodes land in shell 0.
pub fn k_shell(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut deg = g.degrees();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // bin[d] = first position in `order` holding a node of residual degree d.
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        order[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = order[i];
        for &u in g.neighbors(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

/// Largest `h` such that at least `h` neighbours of `u` have degree `>= h`.
pub fn h_index(g: &Graph, u: usize) -> usize {
    let mut nd: Vec<usize> = g.neighbors(u).iter().map(|&v| g.degree(v)).collect();
    nd.sort_unstable_by(|a, b| b.cmp(a));
    nd.iter()
        .enumerate()
        .take_while(|&(i, &d)| d > i)
        .count()
}

pub fn h_indices(g: &Graph) -> Vec<usize> {
    (0..g.node_count()).map(|u| h_index(g, u)).collect()
}

/// `eks(v) = ks(v)·deg(v) + Σ_{u ∈ Γ(v)} ks(u)·deg(u)`.
pub fn extended_coreness(g: &Graph, ks: &[usize]) -> Vec<f64> {
    let weight: Vec<f64> = (0..g.node_count())
        .map(|u| (ks[u] * g.degree(u)) as f64)
        .collect();
    (0..g.node_count())
        .map(|v| weight[v] + g.neighbors(v).iter().map(|&u| weight[u]).sum::<f64>())
        .collect()
}

/// Per-node shell index and extended coreness.
#[derive(Debug, Clone, PartialEq)]
pub struct CorenessTable {
    pub ks: Vec<usize>,
    pub eks: Vec<f64>,
}

impl CorenessTable {
    pub fn compute(g: &Graph) -> Self {
        let ks = k_shell(g);
        let eks = extended_coreness(g, &ks);
        CorenessTable { ks, eks }
    }

    /// `node_label,degree,ks,h_index,eks` rows with a header.
    pub fn to_csv(&self, g: &Graph) -> String {
        let mut out = String::from("node_label,degree,ks,h_index,eks\n");
        for u in 0..g.node_count() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                g.label(u),
                g.degree(u),
                self.ks[u],
                h_index(g, u),
                self.eks[u]
            );
        }
        out
    }
}
