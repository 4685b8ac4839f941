//! Lloyd's k-means with k-means++ seeding.

use rand::Rng;

use super::neighbors::squared_distance;
use crate::rng::SeededRng;

pub const MAX_ITERATIONS: usize = 300;
pub const RELATIVE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct KMeansModel {
    pub k: usize,
    pub dim: usize,
    /// Row-major `k x dim`.
    pub centroids: Vec<f64>,
    pub assignment: Vec<usize>,
    pub inertia: f64,
    /// Inertia after each assignment step.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
}

impl KMeansModel {
    pub fn centroid(&self, c: usize) -> &[f64] {
        &self.centroids[c * self.dim..(c + 1) * self.dim]
    }
}

fn nearest(point: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.chunks_exact(dim).enumerate() {
        let d2 = squared_distance(point, centroid);
        if d2 < best.1 {
            best = (c, d2);
        }
    }
    best
}

fn seed_plus_plus(points: &[&[f64]], k: usize, rng: &mut SeededRng) -> Vec<f64> {
    let n = points.len();
    let dim = points[0].len();
    let mut centroids = Vec::with_capacity(k * dim);
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    centroids.extend_from_slice(points[first]);
    let mut d2: Vec<f64> = points.iter().map(|p| squared_distance(p, points[first])).collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // every point coincides with a centroid; take an unused one
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centroids.extend_from_slice(points[pick]);
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(squared_distance(p, points[pick]));
        }
    }
    centroids
}

/// Clusters `points` into `k` groups. Requires `1 <= k <= points.len()`.
pub fn kmeans(points: &[&[f64]], k: usize, rng: &mut SeededRng) -> KMeansModel {
    assert!(k >= 1 && k <= points.len(), "k must be in 1..=n");
    let n = points.len();
    let dim = points[0].len();
    let mut centroids = seed_plus_plus(points, k, rng);
    let mut assignment = vec![0usize; n];
    let mut history = Vec::new();
    let mut iterations = 0;

    let assign = |centroids: &[f64], assignment: &mut [usize]| -> f64 {
        let mut inertia = 0.0;
        for (i, p) in points.iter().enumerate() {
            let (c, d2) = nearest(p, centroids, dim);
            assignment[i] = c;
            inertia += d2;
        }
        inertia
    };

    let mut inertia = assign(&centroids, &mut assignment);
    history.push(inertia);
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            let c = assignment[i];
            counts[c] += 1;
            for (s, v) in sums[c * dim..(c + 1) * dim].iter_mut().zip(p.iter()) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for j in 0..dim {
                    centroids[c * dim + j] = sums[c * dim + j] / counts[c] as f64;
                }
            }
        }
        // Empty clusters move to the point farthest from its nearest centroid.
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let far = (0..n)
                .map(|i| (i, nearest(points[i], &centroids, dim).1))
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
                .unwrap_or(0);
            centroids[c * dim..(c + 1) * dim].copy_from_slice(points[far]);
        }
        let next = assign(&centroids, &mut assignment);
        history.push(next);
        let converged = inertia == 0.0 || (inertia - next).abs() <= RELATIVE_TOLERANCE * inertia;
        inertia = next;
        if converged {
            break;
        }
    }

    KMeansModel {
        k,
        dim,
        centroids,
        assignment,
        inertia,
        inertia_history: history,
        iterations,
    }
}
