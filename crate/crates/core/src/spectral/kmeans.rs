use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ClusterAssignment, SpectralParams};
use crate::{derive_seed, Error, Result};

struct Points {
    data: Vec<f64>,
    dim: usize,
}

impl Points {
    fn from_rows(m: &DMatrix<f64>) -> Self {
        let dim = m.ncols();
        let mut data = Vec::with_capacity(m.nrows() * dim);
        for row in m.row_iter() {
            data.extend(row.iter());
        }
        Self { data, dim }
    }

    fn len(&self) -> usize {
        self.data.len() / self.dim.max(1)
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

struct Run {
    labels: Vec<usize>,
    inertia: f64,
}

/// Lloyd's k-means on the rows of `points`, best inertia over
/// `params.kmeans_restarts` seeded restarts.
///
/// Restart `r` draws from a generator seeded by `(params.seed, r)`, so the
/// result does not depend on how restarts are scheduled. An empty cluster is
/// re-seeded at the point farthest from its centroid; if every point sits on
/// its centroid the cluster stays empty.
pub fn kmeans(points: &DMatrix<f64>, params: &SpectralParams) -> Result<ClusterAssignment> {
    let n = points.nrows();
    let u = params.num_clusters;
    if u < 1 || u > n {
        return Err(Error::Parameter(format!(
            "k-means needs 1 ≤ clusters ≤ points, got {u} clusters for {n} points"
        )));
    }
    if params.kmeans_restarts < 1 || params.kmeans_max_iters < 1 {
        return Err(Error::Parameter(
            "k-means restarts and iteration limit must be positive".into(),
        ));
    }
    let pts = Points::from_rows(points);

    let runs: Vec<Run> = (0..params.kmeans_restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, r as u64));
            lloyd(&pts, u, params.kmeans_max_iters, &mut rng)
        })
        .collect();

    // first restart wins ties
    let best = runs
        .into_iter()
        .reduce(|best, run| {
            if run.inertia < best.inertia {
                run
            } else {
                best
            }
        })
        .expect("at least one restart");
    ClusterAssignment::new(best.labels, u)
}

fn seed_centroids(pts: &Points, u: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = pts.len();
    let mut centroids = Vec::with_capacity(u);
    centroids.push(pts.row(rng.random_range(0..n)).to_vec());
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(pts.row(i), &centroids[0])).collect();
    while centroids.len() < u {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = pts.row(pick).to_vec();
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(pts.row(i), &c));
        }
        centroids.push(c);
    }
    centroids
}

fn nearest_centroid(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(pts: &Points, u: usize, max_iters: usize, rng: &mut ChaCha8Rng) -> Run {
    let n = pts.len();
    let dim = pts.dim;
    let mut centroids = seed_centroids(pts, u, rng);
    let mut labels = vec![usize::MAX; n];
    let mut dists = vec![0.0; n];

    for _ in 0..max_iters {
        let mut changed = false;
        for i in 0..n {
            let (c, d) = nearest_centroid(pts.row(i), &centroids);
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
            dists[i] = d;
        }

        let mut counts = vec![0usize; u];
        for &l in &labels {
            counts[l] += 1;
        }
        for c in 0..u {
            if counts[c] > 0 {
                continue;
            }
            let (far, far_d) =
                dists.iter().enumerate().fold(
                    (0, 0.0),
                    |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc },
                );
            if far_d <= 0.0 {
                continue;
            }
            counts[labels[far]] -= 1;
            labels[far] = c;
            dists[far] = 0.0;
            counts[c] = 1;
            changed = true;
        }

        for (c, centroid) in centroids.iter_mut().enumerate() {
            if counts[c] == 0 {
                continue;
            }
            centroid.iter_mut().for_each(|v| *v = 0.0);
            for i in (0..n).filter(|&i| labels[i] == c) {
                for (v, x) in centroid.iter_mut().zip(pts.row(i)) {
                    *v += x;
                }
            }
            let inv = 1.0 / counts[c] as f64;
            centroid.iter_mut().for_each(|v| *v *= inv);
        }
        debug_assert!(centroids.iter().all(|c| c.len() == dim));

        if !changed {
            break;
        }
    }

    let inertia = (0..n)
        .map(|i| sq_dist(pts.row(i), &centroids[labels[i]]))
        .sum();
    Run { labels, inertia }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    fn params(u: usize, seed: u64) -> SpectralParams {
        SpectralParams::new(u, seed)
    }

    #[test]
    fn two_clouds_split_exactly() {
        let mut rows = Vec::new();
        for i in 0..10 {
            let jitter = i as f64 * 0.01;
            rows.extend([jitter, -jitter]);
        }
        for i in 0..10 {
            let jitter = i as f64 * 0.01;
            rows.extend([50.0 + jitter, 50.0]);
        }
        let pts = DMatrix::from_row_slice(20, 2, &rows);
        let a = kmeans(&pts, &params(2, 4)).unwrap();
        let l = a.labels();
        assert!(l[..10].iter().all(|&x| x == l[0]));
        assert!(l[10..].iter().all(|&x| x == l[10]));
        assert_ne!(l[0], l[10]);
    }

    #[test]
    fn identical_points_collapse_to_one_label() {
        let pts = DMatrix::from_element(6, 3, 0.7);
        let a = kmeans(&pts, &params(2, 9)).unwrap();
        assert!(a.labels().iter().all(|&x| x == a.labels()[0]));
    }

    #[test]
    fn too_many_clusters() {
        let pts = DMatrix::zeros(2, 2);
        assert!(kmeans(&pts, &params(3, 0)).is_err());
    }

    #[test]
    fn three_blobs_over_twenty_seeds() {
        let sigma = 1.0;
        let centers = [[0.0, 0.0], [10.0, 0.0], [5.0, 10.0 * 0.75f64.sqrt()]];
        let noise = Normal::new(0.0, sigma).unwrap();
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let mut rows = Vec::new();
            for c in &centers {
                for _ in 0..15 {
                    rows.push(c[0] + noise.sample(&mut rng));
                    rows.push(c[1] + noise.sample(&mut rng));
                }
            }
            let pts = DMatrix::from_row_slice(45, 2, &rows);
            let a = kmeans(&pts, &params(3, seed)).unwrap();
            let l = a.labels();
            for b in 0..3 {
                assert!(l[b * 15..(b + 1) * 15].iter().all(|&x| x == l[b * 15]));
            }
            assert_ne!(l[0], l[15]);
            assert_ne!(l[15], l[30]);
            assert_ne!(l[0], l[30]);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let pts = DMatrix::from_fn(40, 3, |_, _| rng.random::<f64>());
        let a = kmeans(&pts, &params(4, 12)).unwrap();
        let b = kmeans(&pts, &params(4, 12)).unwrap();
        assert_eq!(a, b);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = single.install(|| kmeans(&pts, &params(4, 12)).unwrap());
        assert_eq!(a, c);
    }
}
