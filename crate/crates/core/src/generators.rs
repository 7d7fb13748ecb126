//! Small deterministic and seeded random graph families.

use rand::Rng;

use crate::graph::Graph;
use crate::rng;

fn build(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges).expect("generator produced an out-of-range edge")
}

/// Path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    build(n, &edges)
}

pub fn cycle(n: usize) -> Graph {
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    if n > 2 {
        edges.push((n - 1, 0));
    }
    build(n, &edges)
}

/// Star on `n` nodes with centre `0` (that is, `K_{1,n-1}`).
pub fn star(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
    build(n, &edges)
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    build(n, &edges)
}

/// `K_4` on nodes `0..4` with a pendant node `4` attached to node `0`.
pub fn clique_with_pendant() -> Graph {
    let mut edges = vec![(0, 4)];
    for u in 0..4 {
        for v in u + 1..4 {
            edges.push((u, v));
        }
    }
    build(5, &edges)
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng::stream(seed, &[0x6E70]);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    build(n, &edges)
}

/// Preferential attachment with a fractional number of edges per arriving
/// node: each new node links to `floor(m)` existing nodes, plus one more with
/// probability `m - floor(m)`, chosen proportionally to degree. The average
/// degree approaches `2m` and the graph is connected for `m >= 1`.
pub fn preferential_attachment(n: usize, m: f64, seed: u64) -> Graph {
    assert!(m >= 1.0, "preferential attachment needs m >= 1");
    let mut rng = rng::stream(seed, &[0xBA]);
    let base = m.floor() as usize;
    let extra = m - base as f64;
    let core = (base + 1).min(n);

    let mut edges = Vec::new();
    // Each node appears in `ends` once per incident edge.
    let mut ends: Vec<usize> = Vec::new();
    for u in 0..core {
        for v in u + 1..core {
            edges.push((u, v));
            ends.extend([u, v]);
        }
    }
    let mut chosen = Vec::new();
    for u in core..n {
        let want = (base + usize::from(rng.gen_bool(extra))).min(u);
        chosen.clear();
        while chosen.len() < want {
            let v = if ends.is_empty() {
                rng.gen_range(0..u)
            } else {
                ends[rng.gen_range(0..ends.len())]
            };
            if !chosen.contains(&v) {
                chosen.push(v);
            }
        }
        for &v in &chosen {
            edges.push((v, u));
            ends.extend([u, v]);
        }
    }
    build(n, &edges)
}
