//! Training-set selection: uniform node sampling, or quota sampling from
//! k-means clusters of the feature space.

use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;

/// Fraction of nodes used for training unless overridden.
pub const DEFAULT_FRACTION: f64 = 0.005;
/// Reference data sets drawn per k for the gap statistic.
pub const GAP_REFERENCE_SETS: usize = 10;
/// Upper bound on points fed to the k scan; larger inputs are subsampled.
pub const K_SCAN_MAX_POINTS: usize = 256;
pub const DEFAULT_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMethod {
    Uniform,
    Cluster,
}

impl FromStr for SamplingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(SamplingMethod::Uniform),
            "cluster" => Ok(SamplingMethod::Cluster),
            other => Err(Error::param("sampling", format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub fraction: f64,
    pub method: SamplingMethod,
    pub rng_seed: u64,
    pub k_override: Option<usize>,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            fraction: DEFAULT_FRACTION,
            method: SamplingMethod::Uniform,
            rng_seed: 0,
            k_override: None,
        }
    }
}

impl SampleSpec {
    /// `round(fraction · n)`; zero is rejected with a hint to raise the
    /// fraction.
    pub fn sample_size(&self, n: usize) -> Result<usize> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::param("sample-frac", format!("{} must lie in (0, 1]", self.fraction)));
        }
        let s = (self.fraction * n as f64).round() as usize;
        if s == 0 {
            return Err(Error::param(
                "sample-frac",
                format!(
                    "{} of {n} nodes rounds to an empty training set; use a fraction of at least {}",
                    self.fraction,
                    0.5 / n as f64
                ),
            ));
        }
        Ok(s.min(n))
    }

    /// Number of clusters scanned when choosing k for a sample of size `s`.
    pub fn k_max(s: usize) -> usize {
        ((s as f64).sqrt().ceil() as usize).clamp(1, 10)
    }
}

/// `s` distinct members of `nodes`, every subset equally likely. Returned in
/// ascending order.
pub fn uniform_sample<R: Rng>(nodes: &[usize], s: usize, rng: &mut R) -> Result<Vec<usize>> {
    if s == 0 {
        return Err(Error::param("s", "sample size must be at least 1"));
    }
    if s > nodes.len() {
        return Err(Error::SampleTooLarge {
            requested: s,
            available: nodes.len(),
        });
    }
    let mut out: Vec<usize> = index::sample(rng, nodes.len(), s).into_iter().map(|i| nodes[i]).collect();
    out.sort_unstable();
    Ok(out)
}

/// A point k-means can cluster against dense centroids.
pub trait Point {
    fn dim(&self) -> usize;
    fn squared_distance_to(&self, centroid: &[f64], centroid_sq_norm: f64) -> f64;
    fn accumulate(&self, into: &mut [f64]);
}

impl Point for SparseVector {
    fn dim(&self) -> usize {
        self.dim
    }

    fn squared_distance_to(&self, centroid: &[f64], centroid_sq_norm: f64) -> f64 {
        self.squared_distance_dense(centroid, centroid_sq_norm)
    }

    fn accumulate(&self, into: &mut [f64]) {
        for &(i, x) in &self.entries {
            into[i] += x;
        }
    }
}

impl Point for Vec<f64> {
    fn dim(&self) -> usize {
        self.len()
    }

    fn squared_distance_to(&self, centroid: &[f64], _: f64) -> f64 {
        self.iter().zip(centroid).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    fn accumulate(&self, into: &mut [f64]) {
        for (acc, x) in into.iter_mut().zip(self) {
            *acc += x;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Inertia after each assignment step, then the final value.
    pub inertia_trace: Vec<f64>,
}

impl Clustering {
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (p, &c) in self.assignment.iter().enumerate() {
            out[c].push(p);
        }
        out
    }
}

fn sq_norm(c: &[f64]) -> f64 {
    c.iter().map(|x| x * x).sum()
}

fn as_dense<P: Point>(p: &P) -> Vec<f64> {
    let mut v = vec![0.0; p.dim()];
    p.accumulate(&mut v);
    v
}

fn nearest<P: Point>(p: &P, centroids: &[Vec<f64>], norms: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, (centroid, &norm)) in centroids.iter().zip(norms).enumerate() {
        let d = p.squared_distance_to(centroid, norm);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_init<P: Point, R: Rng>(points: &[P], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids = vec![as_dense(&points[rng.gen_range(0..n)])];
    let mut d2: Vec<f64> = vec![f64::INFINITY; n];
    while centroids.len() < k {
        let last = centroids.last().unwrap();
        let norm = sq_norm(last);
        for (p, d) in points.iter().zip(d2.iter_mut()) {
            *d = d.min(p.squared_distance_to(last, norm));
        }
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centroids.push(as_dense(&points[pick]));
    }
    centroids
}

/// Lloyd's algorithm from a k-means++ start. Stops at an assignment fixpoint
/// or after `max_iters` assignment steps. An emptied cluster is re-seeded at
/// the point farthest from its current centroid.
pub fn kmeans<P: Point, R: Rng>(points: &[P], k: usize, rng: &mut R, max_iters: usize) -> Result<Clustering> {
    if k == 0 {
        return Err(Error::param("k", "need at least one cluster"));
    }
    let n = points.len();
    if n == 0 {
        return Err(Error::param("points", "cannot cluster an empty set"));
    }
    let dim = points[0].dim();
    let k = k.min(n);
    let mut centroids = plus_plus_init(points, k, rng);
    let mut assignment = vec![usize::MAX; n];
    let mut dist = vec![0.0; n];
    let mut trace = Vec::new();

    for _ in 0..max_iters.max(1) {
        let norms: Vec<f64> = centroids.iter().map(|c| sq_norm(c)).collect();
        let mut changed = false;
        let mut inertia = 0.0;
        for (i, p) in points.iter().enumerate() {
            let (c, d) = nearest(p, &centroids, &norms);
            if assignment[i] != c {
                assignment[i] = c;
                changed = true;
            }
            dist[i] = d;
            inertia += d;
        }
        if let Some(&prev) = trace.last() {
            debug_assert!(inertia <= prev * (1.0 + 1e-9) + 1e-9, "inertia rose: {prev} -> {inertia}");
        }
        trace.push(inertia);
        if !changed {
            break;
        }

        let mut counts = vec![0usize; k];
        let mut sums = vec![vec![0.0; dim]; k];
        for (p, &c) in points.iter().zip(&assignment) {
            counts[c] += 1;
            p.accumulate(&mut sums[c]);
        }
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)))
                    .unwrap();
                let donor = assignment[far];
                counts[donor] -= 1;
                for (s, x) in sums[donor].iter_mut().zip(as_dense(&points[far])) {
                    *s -= x;
                }
                assignment[far] = c;
                dist[far] = 0.0;
                counts[c] = 1;
                sums[c] = as_dense(&points[far]);
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                centroids[c] = sums[c].iter().map(|s| s * inv).collect();
            }
        }
    }

    // Final centroids are the means of the final assignment.
    let mut counts = vec![0usize; k];
    let mut sums = vec![vec![0.0; dim]; k];
    for (p, &c) in points.iter().zip(&assignment) {
        counts[c] += 1;
        p.accumulate(&mut sums[c]);
    }
    for c in 0..k {
        if counts[c] > 0 {
            let inv = 1.0 / counts[c] as f64;
            centroids[c] = sums[c].iter().map(|s| s * inv).collect();
        }
    }
    let norms: Vec<f64> = centroids.iter().map(|c| sq_norm(c)).collect();
    let inertia: f64 = points
        .iter()
        .zip(&assignment)
        .map(|(p, &c)| p.squared_distance_to(&centroids[c], norms[c]))
        .sum();
    trace.push(inertia);
    Ok(Clustering {
        k,
        assignment,
        centroids,
        inertia,
        inertia_trace: trace,
    })
}

/// The two k estimates the scan produces before arbitration.
#[derive(Debug, Clone, PartialEq)]
pub struct KCandidates {
    pub elbow: usize,
    pub gap: usize,
    /// Inertia of the data for k = 1, 2, ...
    pub inertia: Vec<f64>,
    pub gap_values: Vec<f64>,
    pub gap_errors: Vec<f64>,
}

impl KCandidates {
    /// Keeps the candidate with the higher score; ties and unscorable
    /// candidates fall back to the smaller k.
    pub fn resolve<F: FnMut(usize) -> Option<f64>>(&self, mut score: F) -> usize {
        if self.elbow == self.gap {
            return self.elbow;
        }
        let (small, large) = (self.elbow.min(self.gap), self.elbow.max(self.gap));
        match (score(small), score(large)) {
            (Some(a), Some(b)) if b > a => large,
            (None, Some(_)) => large,
            _ => small,
        }
    }
}

/// Points restricted to the coordinates where they are not all equal, as
/// dense rows. Dropping constant coordinates leaves every inertia unchanged.
fn compact<R: Rng>(points: &[SparseVector], rng: &mut R) -> Vec<Vec<f64>> {
    let picked: Vec<&SparseVector> = if points.len() > K_SCAN_MAX_POINTS {
        let mut idx = index::sample(rng, points.len(), K_SCAN_MAX_POINTS).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| &points[i]).collect()
    } else {
        points.iter().collect()
    };
    let mut coords: Vec<usize> = picked.iter().flat_map(|p| p.entries.iter().map(|e| e.0)).collect();
    coords.sort_unstable();
    coords.dedup();
    let rows: Vec<Vec<f64>> = picked.iter().map(|p| coords.iter().map(|&c| p.get(c)).collect()).collect();
    // Keep only coordinates with spread.
    let keep: Vec<usize> = (0..coords.len())
        .filter(|&j| rows.iter().any(|r| r[j] != rows[0][j]))
        .collect();
    rows.iter().map(|r| keep.iter().map(|&j| r[j]).collect()).collect()
}

/// Elbow and gap-statistic estimates of k over `1..=k_max`.
pub fn k_candidates<R: Rng>(points: &[SparseVector], k_max: usize, rng: &mut R) -> Result<KCandidates> {
    if points.len() < 2 {
        return Err(Error::param("points", "choosing k needs at least two points"));
    }
    let data = compact(points, rng);
    let dims = data[0].len();
    let degenerate = KCandidates {
        elbow: 1,
        gap: 1,
        inertia: vec![0.0],
        gap_values: vec![],
        gap_errors: vec![],
    };
    if dims == 0 || k_max <= 1 {
        return Ok(degenerate);
    }
    let n = data.len();
    let k_max = k_max.min(n);
    // One extra k so that the elbow's second difference exists at k_max.
    let k_top = (k_max + 1).min(n);

    let inertia: Vec<f64> = (1..=k_top)
        .map(|k| kmeans(&data, k, rng, DEFAULT_MAX_ITERS).map(|c| c.inertia))
        .collect::<Result<_>>()?;

    let elbow = {
        let mut best = (1usize, f64::NEG_INFINITY);
        for k in 2..=k_max {
            if k < k_top {
                let d2 = inertia[k - 2] - 2.0 * inertia[k - 1] + inertia[k];
                if d2 > best.1 {
                    best = (k, d2);
                }
            }
        }
        if best.1 == f64::NEG_INFINITY {
            // No second difference available (k_max == n == 2).
            if inertia[k_max - 1] < inertia[0] {
                k_max
            } else {
                1
            }
        } else {
            best.0
        }
    };

    // Gap statistic with uniform references in the data's bounding box.
    let lo: Vec<f64> = (0..dims).map(|j| data.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..dims).map(|j| data.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let floor = inertia[0] * 1e-12;
    let log_w = |w: f64| w.max(floor).max(f64::MIN_POSITIVE).ln();
    let mut ref_logs = vec![Vec::with_capacity(GAP_REFERENCE_SETS); k_max];
    for _ in 0..GAP_REFERENCE_SETS {
        let reference: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dims).map(|j| lo[j] + rng.gen::<f64>() * (hi[j] - lo[j])).collect())
            .collect();
        for k in 1..=k_max {
            let w = kmeans(&reference, k, rng, DEFAULT_MAX_ITERS)?.inertia;
            ref_logs[k - 1].push(log_w(w));
        }
    }
    let b = GAP_REFERENCE_SETS as f64;
    let mut gap_values = Vec::with_capacity(k_max);
    let mut gap_errors = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let logs = &ref_logs[k - 1];
        let mean = logs.iter().sum::<f64>() / b;
        let sd = (logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / b).sqrt();
        gap_values.push(mean - log_w(inertia[k - 1]));
        gap_errors.push(sd * (1.0 + 1.0 / b).sqrt());
    }
    let gap = (1..k_max)
        .find(|&k| gap_values[k - 1] >= gap_values[k] - gap_errors[k])
        .unwrap_or(k_max);

    Ok(KCandidates {
        elbow,
        gap,
        inertia,
        gap_values,
        gap_errors,
    })
}

/// Scans k, then arbitrates between the elbow and gap estimates with
/// `score` (higher is better).
pub fn choose_k<R: Rng, F: FnMut(usize) -> Option<f64>>(
    points: &[SparseVector],
    k_max: usize,
    rng: &mut R,
    score: F,
) -> Result<usize> {
    Ok(k_candidates(points, k_max, rng)?.resolve(score))
}

/// Draws `s` nodes with an equal quota `floor(s / k)` per cluster. The
/// remaining `s mod k` go one each to the largest clusters; clusters too small
/// for their quota give all their members and the shortfall is drawn
/// uniformly from the nodes not yet sampled. Output is ascending.
pub fn cluster_sample<R: Rng>(clustering: &Clustering, s: usize, rng: &mut R) -> Result<Vec<usize>> {
    let n = clustering.assignment.len();
    if s == 0 {
        return Err(Error::param("s", "sample size must be at least 1"));
    }
    if s > n {
        return Err(Error::SampleTooLarge {
            requested: s,
            available: n,
        });
    }
    let members = clustering.members();
    let k = members.len();
    let mut quota = vec![s / k; k];
    let mut by_size: Vec<usize> = (0..k).collect();
    by_size.sort_by(|&a, &b| members[b].len().cmp(&members[a].len()).then(a.cmp(&b)));
    for &c in by_size.iter().take(s % k) {
        quota[c] += 1;
    }

    let mut taken = vec![false; n];
    let mut out = Vec::with_capacity(s);
    for (c, group) in members.iter().enumerate() {
        let want = quota[c].min(group.len());
        if want == 0 {
            continue;
        }
        for u in uniform_sample(group, want, rng)? {
            taken[u] = true;
            out.push(u);
        }
    }
    let deficit = s - out.len();
    if deficit > 0 {
        let rest: Vec<usize> = (0..n).filter(|&u| !taken[u]).collect();
        out.extend(uniform_sample(&rest, deficit, rng)?);
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn blob(center: (f64, f64), count: usize, spread: f64, seed: u64) -> Vec<SparseVector> {
        let mut r = rng::stream(seed, &[]);
        (0..count)
            .map(|_| {
                SparseVector::from_dense(&[
                    center.0 + r.gen_range(-spread..spread),
                    center.1 + r.gen_range(-spread..spread),
                ])
            })
            .collect()
    }

    #[test]
    fn sample_sizes() {
        let spec = SampleSpec::default();
        assert_eq!(spec.sample_size(1000).unwrap(), 5);
        assert_eq!(spec.sample_size(100).unwrap(), 1);
        assert!(spec.sample_size(50).is_err());
        assert_eq!(SampleSpec::k_max(5), 3);
        assert_eq!(SampleSpec::k_max(500), 10);
        assert_eq!(SampleSpec::k_max(1), 1);
    }

    #[test]
    fn uniform_edge_cases() {
        let mut r = rng::stream(0, &[]);
        let nodes = [4, 7, 9];
        assert_eq!(uniform_sample(&nodes, 3, &mut r).unwrap(), vec![4, 7, 9]);
        assert_eq!(uniform_sample(&[5], 1, &mut r).unwrap(), vec![5]);
        assert!(uniform_sample(&nodes, 0, &mut r).is_err());
        assert!(matches!(uniform_sample(&nodes, 4, &mut r), Err(Error::SampleTooLarge { .. })));
    }

    #[test]
    fn uniform_single_draw_chi_square() {
        let nodes: Vec<usize> = (0..10).collect();
        let mut r = rng::stream(2024, &[]);
        let mut counts = [0usize; 10];
        let draws = 100_000;
        for _ in 0..draws {
            counts[uniform_sample(&nodes, 1, &mut r).unwrap()[0]] += 1;
        }
        let expected = draws as f64 / 10.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // Critical value of chi-square with 9 degrees of freedom at 0.001.
        assert!(chi2 < 27.877, "chi2 = {chi2}");
    }

    #[test]
    fn kmeans_trivial_cases() {
        let pts = blob((1.0, 2.0), 20, 1.0, 1);
        let mut r = rng::stream(1, &[]);
        let one = kmeans(&pts, 1, &mut r, 50).unwrap();
        assert!(one.assignment.iter().all(|&c| c == 0));
        let mean_x = pts.iter().map(|p| p.get(0)).sum::<f64>() / 20.0;
        assert!((one.centroids[0][0] - mean_x).abs() < 1e-12);

        let all = kmeans(&pts, 20, &mut r, 50).unwrap();
        assert!(all.inertia < 1e-9);
        let mut seen = all.assignment.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 20);
        assert!(kmeans(&pts, 0, &mut r, 50).is_err());
    }

    #[test]
    fn kmeans_separates_blobs() {
        let mut pts = blob((0.0, 0.0), 30, 0.5, 2);
        pts.extend(blob((50.0, 50.0), 30, 0.5, 3));
        let mut r = rng::stream(7, &[]);
        let c = kmeans(&pts, 2, &mut r, 100).unwrap();
        let first = c.assignment[0];
        assert!(c.assignment[..30].iter().all(|&a| a == first));
        assert!(c.assignment[30..].iter().all(|&a| a != first));
    }

    #[test]
    fn kmeans_repairs_empty_clusters() {
        // Three distinct locations, five clusters requested.
        let mut pts = Vec::new();
        for v in [0.0, 5.0, 9.0] {
            for _ in 0..4 {
                pts.push(SparseVector::from_dense(&[v]));
            }
        }
        let c = kmeans(&pts, 5, &mut rng::stream(3, &[]), 20).unwrap();
        assert_eq!(c.k, 5);
        assert_eq!(c.assignment.len(), 12);
        assert!(c.inertia < 1e-12);
    }

    #[test]
    fn choose_k_fixtures() {
        let same = vec![SparseVector::from_dense(&[1.0, 1.0]); 10];
        let mut r = rng::stream(5, &[]);
        assert_eq!(choose_k(&same, 5, &mut r, |_| None).unwrap(), 1);

        let mut pts = blob((0.0, 0.0), 25, 0.5, 10);
        pts.extend(blob((40.0, 0.0), 25, 0.5, 11));
        pts.extend(blob((20.0, 35.0), 25, 0.5, 12));
        let cand = k_candidates(&pts, 6, &mut r).unwrap();
        assert_eq!((cand.elbow, cand.gap), (3, 3), "{cand:?}");
    }

    #[test]
    fn arbitration_rule() {
        let cand = KCandidates {
            elbow: 2,
            gap: 4,
            inertia: vec![],
            gap_values: vec![],
            gap_errors: vec![],
        };
        assert_eq!(cand.resolve(|k| Some(if k == 4 { 0.8 } else { 0.5 })), 4);
        assert_eq!(cand.resolve(|k| Some(if k == 4 { 0.5 } else { 0.8 })), 2);
        assert_eq!(cand.resolve(|_| Some(0.6)), 2);
        assert_eq!(cand.resolve(|_| None), 2);
        let mut asked = Vec::new();
        let agree = KCandidates { gap: 2, ..cand };
        assert_eq!(agree.resolve(|k| {
            asked.push(k);
            None
        }), 2);
        assert!(asked.is_empty());
    }

    fn clustering(sizes: &[usize]) -> Clustering {
        let assignment: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| vec![c; s]).collect();
        Clustering {
            k: sizes.len(),
            assignment,
            centroids: vec![vec![]; sizes.len()],
            inertia: 0.0,
            inertia_trace: vec![],
        }
    }

    #[test]
    fn quota_arithmetic() {
        let c = clustering(&[5, 5, 5]);
        let s = cluster_sample(&c, 6, &mut rng::stream(1, &[])).unwrap();
        for cl in 0..3 {
            assert_eq!(s.iter().filter(|&&u| c.assignment[u] == cl).count(), 2);
        }
        // Remainder goes to the largest clusters.
        let c = clustering(&[2, 9, 5]);
        let s = cluster_sample(&c, 4, &mut rng::stream(1, &[])).unwrap();
        let counts: Vec<usize> = (0..3).map(|cl| s.iter().filter(|&&u| c.assignment[u] == cl).count()).collect();
        assert_eq!(counts, vec![1, 2, 1]);
    }

    #[test]
    fn small_cluster_deficit_is_redrawn() {
        let c = clustering(&[1, 10, 10]);
        for seed in 0..50 {
            let s = cluster_sample(&c, 6, &mut rng::stream(seed, &[])).unwrap();
            assert_eq!(s.len(), 6);
            let counts: Vec<usize> = (0..3).map(|cl| s.iter().filter(|&&u| c.assignment[u] == cl).count()).collect();
            assert_eq!(counts[0], 1);
            assert!(counts[1] >= 2 && counts[2] >= 2);
            assert_eq!(counts[1] + counts[2], 5);
        }
        assert!(cluster_sample(&c, 22, &mut rng::stream(0, &[])).is_err());
    }

    #[test]
    fn single_cluster_matches_uniform() {
        let c = clustering(&[10]);
        let nodes: Vec<usize> = (0..10).collect();
        let a = cluster_sample(&c, 3, &mut rng::stream(9, &[])).unwrap();
        let b = uniform_sample(&nodes, 3, &mut rng::stream(9, &[])).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn inertia_never_rises(seed in any::<u64>(), k in 1usize..6) {
            let mut pts = blob((0.0, 0.0), 15, 3.0, seed);
            pts.extend(blob((4.0, 1.0), 15, 3.0, seed ^ 1));
            let c = kmeans(&pts, k, &mut rng::stream(seed, &[1]), 100).unwrap();
            for w in c.inertia_trace.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-9);
            }
            let again = kmeans(&pts, k, &mut rng::stream(seed, &[1]), 100).unwrap();
            prop_assert_eq!(c, again);
        }

        #[test]
        fn cluster_sample_covers_clusters(sizes in prop::collection::vec(1usize..8, 1..6), extra in 0usize..10, seed in any::<u64>()) {
            let c = clustering(&sizes);
            let n: usize = sizes.iter().sum();
            let s = (sizes.len() + extra).min(n);
            let out = cluster_sample(&c, s, &mut rng::stream(seed, &[])).unwrap();
            prop_assert_eq!(out.len(), s);
            prop_assert!(out.windows(2).all(|w| w[0] < w[1]));
            for cl in 0..sizes.len() {
                prop_assert!(out.iter().any(|&u| c.assignment[u] == cl));
            }
        }
    }
}
