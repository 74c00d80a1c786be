//! K-means clustering of embeddings and partition-comparison metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use crate::seeding::substream;

/// Largest label alphabet for which the exact permutation search runs.
pub const MAX_EXACT_K: usize = 8;

const MAX_LLOYD_ITERS: usize = 300;

/// A hard partition: 1-based label per point plus the `K x d` centroid matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ClusterAssignment<S: Scalar = f64> {
    labels: Vec<usize>,
    centroids: DenseMatrix<S>,
    k: usize,
}

impl<S: Scalar> ClusterAssignment<S> {
    pub fn new(labels: Vec<usize>, centroids: DenseMatrix<S>, k: usize) -> Result<Self> {
        if centroids.nrows() != k {
            return Err(Error::ShapeMismatch(format!(
                "{k} clusters but {} centroid rows",
                centroids.nrows()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l < 1 || l > k) {
            return Err(Error::InvalidArgument(format!("label {bad} outside 1..={k}")));
        }
        Ok(Self { labels, centroids, k })
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn centroids(&self) -> &DenseMatrix<S> {
        &self.centroids
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }
}

#[inline]
fn dist_sq<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (&x, &y) in a.iter().zip(b) {
        let diff = x - y;
        acc += diff * diff;
    }
    acc
}

struct LloydOutcome<S: Scalar> {
    labels: Vec<usize>, // 0-based internally
    centroids: DenseMatrix<S>,
    objective: S,
    #[allow(dead_code)] // read by the unit tests
    objective_trace: Vec<S>,
}

/// k-means++ seeding: spread the initial centroids by sampling points with
/// probability proportional to their squared distance from the chosen set.
fn seed_plus_plus<S: Scalar>(
    data: &DenseMatrix<S>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> DenseMatrix<S> {
    let n = data.nrows();
    let d = data.ncols();
    let mut centroids = DenseMatrix::zeros(k, d);
    let mut chosen = vec![false; n];

    let first = rng.gen_range(0..n);
    centroids.row_mut(0).copy_from_slice(data.row(first));
    chosen[first] = true;

    let mut min_dist: Vec<S> = (0..n).map(|i| dist_sq(data.row(i), data.row(first))).collect();
    for c in 1..k {
        let total: S = min_dist.iter().copied().sum();
        let pick = if total > S::zero() {
            let mut target = S::unit_uniform(rng) * total;
            let mut idx = n - 1;
            for (i, &w) in min_dist.iter().enumerate() {
                if target < w {
                    idx = i;
                    break;
                }
                target -= w;
            }
            idx
        } else {
            // All remaining mass is zero (duplicate points); take the first
            // index not already used.
            (0..n).find(|&i| !chosen[i]).unwrap_or(0)
        };
        chosen[pick] = true;
        centroids.row_mut(c).copy_from_slice(data.row(pick));
        for i in 0..n {
            let dist = dist_sq(data.row(i), data.row(pick));
            if dist < min_dist[i] {
                min_dist[i] = dist;
            }
        }
    }
    centroids
}

fn lloyd<S: Scalar>(data: &DenseMatrix<S>, k: usize, seed: u64) -> LloydOutcome<S> {
    let n = data.nrows();
    let d = data.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_plus_plus(data, k, &mut rng);
    let mut labels = vec![0usize; n];
    let mut trace = Vec::new();
    let mut reseed_happened_last = false;

    for _iter in 0..MAX_LLOYD_ITERS {
        // Assignment step; ties go to the lowest centroid index.
        let mut changed = false;
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let mut best = 0usize;
            let mut best_dist = dist_sq(data.row(i), centroids.row(0));
            for c in 1..k {
                let dist = dist_sq(data.row(i), centroids.row(c));
                if dist < best_dist {
                    best_dist = dist;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
            counts[best] += 1;
        }

        // Re-seed any emptied cluster at the point farthest from its current
        // centroid, then hand that point over.
        let mut reseeded = false;
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut far_idx = 0usize;
            let mut far_dist = -S::one();
            for i in 0..n {
                if counts[labels[i]] <= 1 {
                    continue;
                }
                let dist = dist_sq(data.row(i), centroids.row(labels[i]));
                if dist > far_dist {
                    far_dist = dist;
                    far_idx = i;
                }
            }
            counts[labels[far_idx]] -= 1;
            labels[far_idx] = c;
            counts[c] = 1;
            centroids.row_mut(c).copy_from_slice(data.row(far_idx));
            reseeded = true;
            changed = true;
        }

        // Update step: means of the assigned points.
        let mut sums: DenseMatrix<S> = DenseMatrix::zeros(k, d);
        for i in 0..n {
            let row = data.row(i);
            let target = sums.row_mut(labels[i]);
            for (t, &v) in target.iter_mut().zip(row) {
                *t += v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let inv = S::one() / S::cst(counts[c] as f64);
            let (crow, srow) = (centroids.row_mut(c), sums.row(c));
            for (t, &v) in crow.iter_mut().zip(srow) {
                *t = v * inv;
            }
        }

        let objective: S = (0..n).map(|i| dist_sq(data.row(i), centroids.row(labels[i]))).sum();
        if let Some(&prev) = trace.last() {
            // Lloyd steps cannot increase the objective; a reseed is the one
            // event allowed to break the comparison.
            if !reseed_happened_last {
                debug_assert!(
                    objective <= prev + S::cst(1e-9) * (S::one() + prev),
                    "objective increased: {prev} -> {objective}"
                );
            }
        }
        trace.push(objective);
        reseed_happened_last = reseeded;

        if !changed {
            break;
        }
    }

    let objective = *trace.last().expect("at least one iteration");
    LloydOutcome { labels, centroids, objective, objective_trace: trace }
}

/// K-means via Lloyd iterations from k-means++ seeding, best of `restarts`
/// runs by within-cluster sum of squares (ties broken by restart index).
pub fn kmeans<S: Scalar>(
    data: &DenseMatrix<S>,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<ClusterAssignment<S>> {
    let n = data.nrows();
    if k < 1 || k > n {
        return Err(Error::InvalidArgument(format!("K={k} outside 1..={n}")));
    }
    if restarts < 1 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }

    let runs: Vec<LloydOutcome<S>> = (0..restarts)
        .into_par_iter()
        .map(|r| lloyd(data, k, substream(seed, r as u64)))
        .collect();
    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| {
            a.objective
                .partial_cmp(&b.objective)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(ia.cmp(ib))
        })
        .map(|(_, run)| run)
        .expect("restarts >= 1");

    let labels = best.labels.iter().map(|&l| l + 1).collect();
    ClusterAssignment::new(labels, best.centroids, k)
}

/// Rand index `2(a + b) / (n(n-1))`: the fraction of vertex pairs on which
/// two partitions agree (together in both, or apart in both).
pub fn rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "label vectors of length {n} and {}",
            b.len()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("Rand index needs n >= 2".into()));
    }

    // Contingency-table pair counting.
    let mut table: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut rows: BTreeMap<usize, u64> = BTreeMap::new();
    let mut cols: BTreeMap<usize, u64> = BTreeMap::new();
    for (&la, &lb) in a.iter().zip(b) {
        *table.entry((la, lb)).or_insert(0) += 1;
        *rows.entry(la).or_insert(0) += 1;
        *cols.entry(lb).or_insert(0) += 1;
    }
    let choose2 = |m: u64| m * m.saturating_sub(1) / 2;
    let same_both: u64 = table.values().map(|&m| choose2(m)).sum();
    let same_a: u64 = rows.values().map(|&m| choose2(m)).sum();
    let same_b: u64 = cols.values().map(|&m| choose2(m)).sum();
    let total = choose2(n as u64);
    let apart_both = total - same_a - same_b + same_both;
    Ok((same_both + apart_both) as f64 / total as f64)
}

/// Number of mis-clustered points after the best relabeling: the minimum over
/// all `K!` permutations `σ` of `#{i : σ(a_i) != b_i}`.
///
/// Exact factorial search; rejects `K > 8`.
pub fn min_permutation_hamming(a: &[usize], b: &[usize]) -> Result<usize> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "label vectors of length {n} and {}",
            b.len()
        )));
    }
    if a.iter().chain(b).any(|&l| l == 0) {
        return Err(Error::InvalidArgument("labels are 1-based".into()));
    }
    let k = a.iter().chain(b).copied().max().unwrap_or(1);
    if k > MAX_EXACT_K {
        return Err(Error::ExactSearchBound(k, MAX_EXACT_K));
    }

    // Confusion counts; a permutation's match count is a sum over its image.
    let mut confusion = vec![vec![0usize; k]; k];
    for (&la, &lb) in a.iter().zip(b) {
        confusion[la - 1][lb - 1] += 1;
    }

    let mut perm: Vec<usize> = (0..k).collect();
    let mut best_matches = 0usize;
    permute(&mut perm, 0, &mut |p| {
        let matches: usize = (0..k).map(|src| confusion[src][p[src]]).sum();
        if matches > best_matches {
            best_matches = matches;
        }
    });
    Ok(n - best_matches)
}

fn permute(items: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}
