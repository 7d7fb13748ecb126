//! Ranking-quality metrics.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::Ranking;

fn pairs(t: u64) -> u64 {
    t * t.saturating_sub(1) / 2
}

/// Sum of `t(t-1)/2` over runs of equal values in an already sorted slice.
fn tied_pairs<T, F: Fn(&T, &T) -> bool>(sorted: &[T], same: F) -> u64 {
    let mut total = 0;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if same(&w[0], &w[1]) {
            run += 1;
        } else {
            total += pairs(run);
            run = 1;
        }
    }
    total + pairs(run)
}

/// Counts inversions (strict) while sorting `v` ascending.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], &mut buf[..mid]) + merge_count(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Kendall tau-b in `O(n log n)` (Knight's algorithm).
///
/// Returns `Ok(None)` when either score vector is constant, where tau-b has
/// no value.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::param("scores", "kendall tau needs at least two items"));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i].total_cmp(&a[j]).then(b[i].total_cmp(&b[j])));

    let ties_a = tied_pairs(&idx, |&i, &j| a[i] == a[j]);
    let joint = tied_pairs(&idx, |&i, &j| a[i] == a[j] && b[i] == b[j]);
    let mut sorted_b: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
    let mut buf = vec![0.0; n];
    let discordant = merge_count(&mut sorted_b, &mut buf);
    let ties_b = tied_pairs(&sorted_b, |x, y| x == y);

    let total = pairs(n as u64);
    let concordant = total + joint - ties_a - ties_b - discordant;
    let denom = ((total - ties_a) as f64) * ((total - ties_b) as f64);
    if denom <= 0.0 {
        return Ok(None);
    }
    Ok(Some((concordant as i64 - discordant as i64) as f64 / denom.sqrt()))
}

/// Jaccard similarity of the top-`k` node sets of two rankings.
pub fn jaccard_at_k(r: &Ranking, gtr: &Ranking, k: usize) -> Result<f64> {
    let n = r.len();
    if gtr.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: gtr.len(),
        });
    }
    if k == 0 || k > n {
        return Err(Error::param("k", format!("{k} is outside 1..={n}")));
    }
    let a: HashSet<usize> = r.top(k).iter().copied().collect();
    let shared = gtr.top(k).iter().filter(|u| a.contains(u)).count();
    Ok(shared as f64 / (2 * k - shared) as f64)
}

/// Tie groups under exact score equality, in rank order.
fn tie_groups(r: &Ranking) -> Vec<usize> {
    let mut groups = Vec::new();
    let mut last: Option<f64> = None;
    for s in r.ordered_scores() {
        match (last, groups.last_mut()) {
            (Some(prev), Some(size)) if prev == s => *size += 1,
            _ => groups.push(1),
        }
        last = Some(s);
    }
    groups
}

/// Monotonicity `M(R) = (1 − Σ_r n_r(n_r − 1) / (n(n − 1)))²`: 1 when all
/// scores differ, 0 when all tie.
pub fn monotonicity(r: &Ranking) -> Result<f64> {
    let n = r.len();
    if n < 2 {
        return Err(Error::param("ranking", "monotonicity needs at least two nodes"));
    }
    let tied: usize = tie_groups(r).iter().map(|&t| t * (t - 1)).sum();
    let frac = tied as f64 / (n * (n - 1)) as f64;
    Ok((1.0 - frac).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// First (1-based, dense) rank covered by the bin.
    pub bin_start: usize,
    pub count: usize,
}

/// Number of nodes per block of `bin_width` consecutive dense ranks; tied
/// nodes share a rank and the next distinct score takes the next rank.
pub fn rank_distribution(r: &Ranking, bin_width: usize) -> Result<Vec<HistogramBin>> {
    if bin_width == 0 {
        return Err(Error::param("bin_width", "must be at least 1"));
    }
    let mut bins: Vec<HistogramBin> = Vec::new();
    for (dense_rank0, size) in tie_groups(r).into_iter().enumerate() {
        let b = dense_rank0 / bin_width;
        while bins.len() <= b {
            bins.push(HistogramBin {
                bin_start: bins.len() * bin_width + 1,
                count: 0,
            });
        }
        bins[b].count += size;
    }
    Ok(bins)
}

/// Everything the evaluation command reports for one ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    /// `None` when undefined (a constant score vector on either side).
    pub kendall_tau: Option<f64>,
    pub jaccard_at: BTreeMap<usize, f64>,
    pub monotonicity: f64,
    pub runtime_seconds: f64,
    pub rank_histogram: Vec<HistogramBin>,
}

impl EvalReport {
    pub fn evaluate(r: &Ranking, gtr: &Ranking, ks: &[usize], bin_width: usize, runtime_seconds: f64) -> Result<Self> {
        let mut jaccard_at = BTreeMap::new();
        for &k in ks {
            jaccard_at.insert(k, jaccard_at_k(r, gtr, k)?);
        }
        Ok(EvalReport {
            method: r.method.clone(),
            kendall_tau: kendall_tau(&r.scores, &gtr.scores)?,
            jaccard_at,
            monotonicity: monotonicity(r)?,
            runtime_seconds,
            rank_histogram: rank_distribution(r, bin_width)?,
        })
    }

    /// Header for [`Self::csv_row`]; one `jaccard@k` column per requested k.
    pub fn csv_header(&self) -> String {
        let mut h = String::from("method,kendall_tau,monotonicity,runtime_seconds");
        for k in self.jaccard_at.keys() {
            h.push_str(&format!(",jaccard@{k}"));
        }
        h
    }

    pub fn csv_row(&self) -> String {
        let mut row = format!(
            "{},{},{},{}",
            self.method,
            self.kendall_tau.map(|t| t.to_string()).unwrap_or_default(),
            self.monotonicity,
            self.runtime_seconds
        );
        for v in self.jaccard_at.values() {
            row.push_str(&format!(",{v}"));
        }
        row
    }

    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("bin_start,count\n");
        for b in &self.rank_histogram {
            out.push_str(&format!("{},{}\n", b.bin_start, b.count));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::kendall_tau_pairs;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn ranking(scores: &[f64]) -> Ranking {
        Ranking::from_scores("test", scores.to_vec())
    }

    #[test]
    fn tau_extremes() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        assert_eq!(kendall_tau(&a, &a).unwrap(), Some(1.0));
        assert_eq!(kendall_tau(&a, &neg).unwrap(), Some(-1.0));
        assert_eq!(kendall_tau(&a, &[2.0; 5]).unwrap(), None);
        assert!(kendall_tau(&a, &a[..3]).is_err());
        assert!(kendall_tau(&a[..1], &a[..1]).is_err());
    }

    #[test]
    fn tau_matches_pairwise_oracle_with_ties() {
        let mut r = rng::stream(42, &[]);
        for _ in 0..200 {
            let n = r.gen_range(2..60);
            let levels = r.gen_range(1..8);
            let a: Vec<f64> = (0..n).map(|_| r.gen_range(0..levels) as f64).collect();
            let b: Vec<f64> = (0..n).map(|_| r.gen_range(0..levels) as f64).collect();
            let fast = kendall_tau(&a, &b).unwrap();
            let slow = kendall_tau_pairs(&a, &b);
            match (fast, slow) {
                (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-12),
                (x, y) => assert_eq!(x, y),
            }
        }
    }

    #[test]
    fn jaccard_fixtures() {
        let a = ranking(&[6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        assert!((1..=6).all(|k| jaccard_at_k(&a, &a, k).unwrap() == 1.0));
        let b = ranking(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(jaccard_at_k(&a, &b, 3).unwrap(), 0.0);
        // Top-3 {0,1,2} vs {0,1,5}: j = 2 -> 2 / (6 - 2).
        let c = ranking(&[6.0, 5.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(jaccard_at_k(&a, &c, 3).unwrap(), 0.5);
        assert!(jaccard_at_k(&a, &c, 0).is_err());
        assert!(jaccard_at_k(&a, &c, 7).is_err());
    }

    #[test]
    fn monotonicity_fixtures() {
        assert_eq!(monotonicity(&ranking(&[4.0, 3.0, 2.0, 1.0])).unwrap(), 1.0);
        assert_eq!(monotonicity(&ranking(&[2.0; 4])).unwrap(), 0.0);
        let m = monotonicity(&ranking(&[3.0, 3.0, 2.0, 1.0])).unwrap();
        assert!((m - 25.0 / 36.0).abs() < 1e-15);
        assert!(monotonicity(&ranking(&[1.0])).is_err());
    }

    #[test]
    fn histogram_fixtures() {
        let distinct: Vec<f64> = (0..100).map(f64::from).collect();
        let h = rank_distribution(&ranking(&distinct), 10).unwrap();
        assert_eq!(h.len(), 10);
        assert!(h.iter().all(|b| b.count == 10));
        assert_eq!(h[1].bin_start, 11);

        let h = rank_distribution(&ranking(&[1.0; 7]), 3).unwrap();
        assert_eq!(h, vec![HistogramBin { bin_start: 1, count: 7 }]);

        // Dense ranks: 9,9 -> 1; 8 -> 2; 7,7,7 -> 3; 5 -> 4; 4 -> 5.
        let h = rank_distribution(&ranking(&[9.0, 7.0, 8.0, 7.0, 9.0, 5.0, 7.0, 4.0]), 2).unwrap();
        let counts: Vec<usize> = h.iter().map(|b| b.count).collect();
        assert_eq!(counts, vec![3, 4, 1]);
        assert!(rank_distribution(&ranking(&[1.0]), 0).is_err());
    }

    #[test]
    fn report_rows() {
        let r = ranking(&[3.0, 2.0, 1.0]);
        let report = EvalReport::evaluate(&r, &r, &[1, 2], 1, 0.5).unwrap();
        assert_eq!(report.csv_header(), "method,kendall_tau,monotonicity,runtime_seconds,jaccard@1,jaccard@2");
        assert_eq!(report.csv_row(), "test,1,1,0.5,1,1");
        assert_eq!(report.histogram_csv(), "bin_start,count\n1,1\n2,1\n3,1\n");
    }

    proptest! {
        #[test]
        fn tau_symmetric_and_transform_invariant(
            pairs in prop::collection::vec((0i32..6, 0i32..6), 2..40),
        ) {
            let a: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let b: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
            let t = kendall_tau(&a, &b).unwrap();
            prop_assert_eq!(t, kendall_tau(&b, &a).unwrap());
            let a2: Vec<f64> = a.iter().map(|x| (x * 0.7).exp() + 3.0).collect();
            let t2 = kendall_tau(&a2, &b).unwrap();
            match (t, t2) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-12),
                (x, y) => prop_assert_eq!(x, y),
            }
            let ra = ranking(&a);
            let ra2 = ranking(&a2);
            prop_assert_eq!(monotonicity(&ra).unwrap(), monotonicity(&ra2).unwrap());
            let rb = ranking(&b);
            for k in 1..=a.len() {
                prop_assert_eq!(jaccard_at_k(&ra, &rb, k).unwrap(), jaccard_at_k(&rb, &ra, k).unwrap());
            }
        }
    }
}
