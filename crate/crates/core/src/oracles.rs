//! Slow reference implementations used only to check the fast paths.
//!
//! Compiled for unit tests and behind the `oracles` feature for downstream
//! test suites. Each routine follows the textbook definition directly and
//! shares no code with the module it checks.

use crate::graph::Graph;

/// Exact mean and variance of the SIR influence from `seed` when `mu = 1`,
/// by enumerating all `2^m` subsets of transmitting edges.
pub fn exact_sir_influence(g: &Graph, seed: usize, beta: f64) -> (f64, f64) {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let m = edges.len();
    assert!(m <= 20, "enumeration over 2^{m} outcomes is too large");
    let n = g.node_count();
    let (mut mean, mut second) = (0.0, 0.0);
    let mut reached = vec![false; n];
    for mask in 0u32..(1u32 << m) {
        let open = mask.count_ones() as i32;
        let p = beta.powi(open) * (1.0 - beta).powi(m as i32 - open);
        if p == 0.0 {
            continue;
        }
        reached.iter_mut().for_each(|r| *r = false);
        reached[seed] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for (i, &(u, v)) in edges.iter().enumerate() {
                if mask & (1 << i) != 0 && reached[u] != reached[v] {
                    reached[u] = true;
                    reached[v] = true;
                    changed = true;
                }
            }
        }
        let size = reached.iter().filter(|&&r| r).count() as f64;
        mean += p * size;
        second += p * size * size;
    }
    (mean, (second - mean * mean).max(0.0))
}

/// ks(u) = largest `c` such that `u` survives repeated deletion of nodes with
/// fewer than `c` surviving neighbours.
pub fn brute_force_shells(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut ks = vec![0; n];
    for c in 1..=n {
        let mut alive = vec![true; n];
        loop {
            let doomed: Vec<usize> = (0..n)
                .filter(|&u| alive[u] && g.neighbors(u).iter().filter(|&&v| alive[v]).count() < c)
                .collect();
            if doomed.is_empty() {
                break;
            }
            for u in doomed {
                alive[u] = false;
            }
        }
        let mut any = false;
        for u in 0..n {
            if alive[u] {
                ks[u] = c;
                any = true;
            }
        }
        if !any {
            break;
        }
    }
    ks
}

/// Minimum of the ε-SVR dual `½ wᵀKw − yᵀw + ε Σ|w|` subject to `Σ w = 0`,
/// `|w_i| ≤ C`, found by accelerated projected gradient on the split
/// `(α, α*) ∈ [0, C]^{2l}` form. Projection onto the box intersected with the
/// hyperplane is done by bisection on the multiplier.
pub fn svr_dual_projected_gradient(kernel: &[f64], y: &[f64], cost: f64, epsilon: f64) -> f64 {
    let l = y.len();
    let size = 2 * l;
    let s = |t: usize| if t < l { 1.0 } else { -1.0 };
    let q = |a: usize, b: usize| s(a) * s(b) * kernel[(a % l) * l + (b % l)];
    let p: Vec<f64> = (0..size)
        .map(|t| if t < l { epsilon - y[t] } else { epsilon + y[t - l] })
        .collect();
    // Gershgorin bound on the largest eigenvalue of Q.
    let lipschitz = (0..size)
        .map(|a| (0..size).map(|b| q(a, b).abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1e-12);

    let project = |v: &[f64]| -> Vec<f64> {
        let at = |lam: f64| -> (Vec<f64>, f64) {
            let x: Vec<f64> = (0..size).map(|t| (v[t] - lam * s(t)).clamp(0.0, cost)).collect();
            let h = (0..size).map(|t| s(t) * x[t]).sum();
            (x, h)
        };
        let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + cost + 1.0;
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if at(mid).1 > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(0.5 * (lo + hi)).0
    };
    let objective = |a: &[f64]| -> f64 {
        let mut quad = 0.0;
        for i in 0..size {
            for j in 0..size {
                quad += a[i] * q(i, j) * a[j];
            }
        }
        0.5 * quad + a.iter().zip(&p).map(|(a, p)| a * p).sum::<f64>()
    };

    let mut x = vec![0.0; size];
    let mut z = x.clone();
    let mut t = 1.0f64;
    for _ in 0..40_000 {
        let grad: Vec<f64> = (0..size)
            .map(|a| (0..size).map(|b| q(a, b) * z[b]).sum::<f64>() + p[a])
            .collect();
        let step: Vec<f64> = (0..size).map(|a| z[a] - grad[a] / lipschitz).collect();
        let next = project(&step);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        z = (0..size).map(|a| next[a] + momentum * (next[a] - x[a])).collect();
        x = next;
        t = t_next;
    }
    let w: Vec<f64> = (0..l).map(|i| x[i] - x[i + l]).collect();
    // Report the objective in the w-form, as the solver does.
    let mut quad = 0.0;
    for i in 0..l {
        for j in 0..l {
            quad += w[i] * w[j] * kernel[i * l + j];
        }
    }
    let w_form = 0.5 * quad - y.iter().zip(&w).map(|(y, w)| y * w).sum::<f64>()
        + epsilon * w.iter().map(|w| w.abs()).sum::<f64>();
    debug_assert!(w_form <= objective(&x) + 1e-9);
    w_form
}

/// Kendall tau-b by enumerating all pairs. `None` when either side is
/// constant.
pub fn kendall_tau_pairs(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len();
    let (mut concordant, mut discordant, mut ties_a, mut ties_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            if da == 0.0 {
                ties_a += 1;
            }
            if db == 0.0 {
                ties_b += 1;
            }
            if da != 0.0 && db != 0.0 {
                if (da > 0.0) == (db > 0.0) {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }
    let pairs = (n * (n.saturating_sub(1)) / 2) as i64;
    let denom = ((pairs - ties_a) as f64) * ((pairs - ties_b) as f64);
    (denom > 0.0).then(|| (concordant - discordant) as f64 / denom.sqrt())
}

/// Row sums of `βA + β²A² + ... + βᵗAᵗ` from explicit dense matrix powers.
pub fn ds_dense(g: &Graph, beta: f64, t: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut adj = vec![vec![0.0; n]; n];
    for (u, v) in g.edges() {
        adj[u][v] = 1.0;
        adj[v][u] = 1.0;
    }
    let mut power = adj.clone();
    let mut series = vec![vec![0.0; n]; n];
    let mut coef = beta;
    for step in 1..=t {
        if step > 1 {
            let mut next = vec![vec![0.0; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if power[i][k] != 0.0 {
                        for j in 0..n {
                            next[i][j] += power[i][k] * adj[k][j];
                        }
                    }
                }
            }
            power = next;
            coef *= beta;
        }
        for i in 0..n {
            for j in 0..n {
                series[i][j] += coef * power[i][j];
            }
        }
    }
    series.iter().map(|row| row.iter().sum()).collect()
}

/// H-index straight from its definition: the largest `h` with at least `h`
/// neighbours of degree `>= h`.
pub fn h_index_by_definition(g: &Graph, u: usize) -> usize {
    (0..=g.degree(u))
        .filter(|&h| g.neighbors(u).iter().filter(|&&v| g.degree(v) >= h).count() >= h)
        .max()
        .unwrap_or(0)
}
