//! Min-max normalization, seeded k-means with restarts, and
//! silhouette-maximizing concept-count identification.

use std::collections::BTreeMap;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::internal_clustering_scores;
use crate::seeding::{derive_seed, tag};
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult<F> {
    pub labels: Vec<usize>,
    pub centroids: Array2<F>,
    pub inertia: F,
    pub seed: u64,
}

/// Per-candidate silhouette scores and the selected concept count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptCountReport<F> {
    pub scores: BTreeMap<usize, F>,
    pub best_c: usize,
}

/// Maps each column affinely onto `[0, 1]`; zero-range columns map to 0.5.
pub fn normalize_minmax<F: Real>(r: &Array2<F>) -> Array2<F> {
    let (k, n) = r.dim();
    let mut out = Array2::zeros((k, n));
    let half = F::from(0.5).unwrap();
    for j in 0..n {
        let col = r.column(j);
        let min = col.iter().copied().fold(F::infinity(), F::min);
        let max = col.iter().copied().fold(F::neg_infinity(), F::max);
        let range = max - min;
        for i in 0..k {
            out[[i, j]] = if range > F::zero() {
                (r[[i, j]] - min) / range
            } else {
                half
            };
        }
    }
    out
}

fn squared_distance<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

fn nearest<F: Real>(point: &[F], centroids: &[Vec<F>]) -> (usize, F) {
    let mut best = 0;
    let mut best_dist = F::infinity();
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_distance(point, centroid);
        if d < best_dist {
            best_dist = d;
            best = c;
        }
    }
    (best, best_dist)
}

fn kmeans_pp_init<F: Real>(points: &[Vec<F>], c: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<F>> {
    let k = points.len();
    let mut centroids = Vec::with_capacity(c);
    centroids.push(points[rng.gen_range(0..k)].clone());
    let mut dists: Vec<F> = points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < c {
        let total: F = dists.iter().copied().sum();
        let next = if total > F::zero() {
            let mut target = F::from(rng.gen::<f64>()).unwrap() * total;
            let mut chosen = k - 1;
            for (i, &d) in dists.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target = target - d;
            }
            chosen
        } else {
            rng.gen_range(0..k)
        };
        centroids.push(points[next].clone());
        for (i, point) in points.iter().enumerate() {
            let d = squared_distance(point, centroids.last().unwrap());
            if d < dists[i] {
                dists[i] = d;
            }
        }
    }
    centroids
}

fn lloyd<F: Real>(
    points: &[Vec<F>],
    c: usize,
    rng: &mut ChaCha8Rng,
    max_iter: usize,
) -> (Vec<usize>, Vec<Vec<F>>, F) {
    let k = points.len();
    let dim = points[0].len();
    let mut centroids = kmeans_pp_init(points, c, rng);
    // sentinel forces a full first assignment pass
    let mut labels = vec![usize::MAX; k];
    let mut prev_inertia = F::infinity();
    let mut inertia = F::zero();

    for _ in 0..max_iter {
        inertia = F::zero();
        let mut changed = false;
        for (i, point) in points.iter().enumerate() {
            let (best, dist) = nearest(point, &centroids);
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
            inertia += dist;
        }
        debug_assert!(
            inertia <= prev_inertia * (F::one() + F::from(1e-9).unwrap()) + F::from(1e-12).unwrap(),
            "Lloyd iteration increased inertia"
        );
        prev_inertia = inertia;

        let mut sums = vec![vec![F::zero(); dim]; c];
        let mut counts = vec![0usize; c];
        for (i, point) in points.iter().enumerate() {
            counts[labels[i]] += 1;
            for (slot, &v) in sums[labels[i]].iter_mut().zip(point) {
                *slot += v;
            }
        }
        let mut reseeded = false;
        for ci in 0..c {
            if counts[ci] == 0 {
                // re-seed with the point farthest from its centroid
                let far = (0..k)
                    .max_by(|&a, &b| {
                        squared_distance(&points[a], &centroids[labels[a]])
                            .partial_cmp(&squared_distance(&points[b], &centroids[labels[b]]))
                            .unwrap()
                    })
                    .unwrap();
                centroids[ci] = points[far].clone();
                reseeded = true;
            } else {
                let count = F::from(counts[ci]).unwrap();
                for (j, &s) in sums[ci].iter().enumerate() {
                    centroids[ci][j] = s / count;
                }
            }
        }
        if reseeded {
            prev_inertia = F::infinity();
            continue;
        }
        if !changed {
            break;
        }
    }
    (labels, centroids, inertia)
}

/// Lloyd's algorithm with k-means++ seeding and independent restarts; the
/// restart with minimal inertia wins. Deterministic for fixed inputs.
pub fn kmeans<F: Real>(
    x: &Array2<F>,
    c: usize,
    seed: u64,
    replications: usize,
    max_iter: usize,
) -> Result<ClusteringResult<F>> {
    let (k, dim) = x.dim();
    if c == 0 || replications == 0 || max_iter == 0 {
        return Err(Error::Config(
            "c, replications and max_iter must be positive".into(),
        ));
    }
    if c > k {
        return Err(Error::Config(format!(
            "c = {c} exceeds the number of points {k}"
        )));
    }
    let points: Vec<Vec<F>> = x.rows().into_iter().map(|r| r.to_vec()).collect();

    let mut best: Option<(Vec<usize>, Vec<Vec<F>>, F)> = None;
    for rep in 0..replications {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(seed, tag::KMEANS, rep as u64));
        let run = lloyd(&points, c, &mut rng, max_iter);
        let better = match &best {
            None => true,
            Some((_, _, inertia)) => run.2 < *inertia,
        };
        if better {
            best = Some(run);
        }
    }
    let (labels, centroid_rows, inertia) = best.unwrap();
    let mut centroids = Array2::zeros((c, dim));
    for (ci, row) in centroid_rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            centroids[[ci, j]] = v;
        }
    }
    Ok(ClusteringResult {
        labels,
        centroids,
        inertia,
        seed,
    })
}

/// Clusters the normalized representation for each candidate concept count
/// and picks the silhouette maximum, ties toward the smaller count.
pub fn identify_concept_count<F: Real>(
    r: &Array2<F>,
    c_min: usize,
    c_max: usize,
    seed: u64,
    replications: usize,
) -> Result<ConceptCountReport<F>> {
    let k = r.nrows();
    if !(2 <= c_min && c_min <= c_max && c_max + 1 <= k) {
        return Err(Error::Config(format!(
            "need 2 <= c_min <= c_max <= k-1, got c_min={c_min} c_max={c_max} k={k}"
        )));
    }
    let normalized = normalize_minmax(r);
    let mut scores = BTreeMap::new();
    for c in c_min..=c_max {
        let result = kmeans(
            &normalized,
            c,
            derive_seed(seed, tag::IDENTIFY, c as u64),
            replications,
            300,
        )?;
        let internal = internal_clustering_scores(&normalized, &result.labels)?;
        scores.insert(c, internal.silhouette);
    }
    let mut best_c = c_min;
    for (&c, &score) in &scores {
        if score > scores[&best_c] {
            best_c = c;
        }
    }
    Ok(ConceptCountReport { scores, best_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-3.0..3.0))
    }

    #[test]
    fn normalization_maps_columns_affinely() {
        let r = Array2::from_shape_vec((3, 1), vec![0.0, 5.0, 10.0]).unwrap();
        let out = normalize_minmax(&r);
        assert_eq!(out[[0, 0]], 0.0);
        assert_eq!(out[[1, 0]], 0.5);
        assert_eq!(out[[2, 0]], 1.0);
    }

    #[test]
    fn constant_columns_map_to_half() {
        let r = Array2::from_shape_vec((3, 1), vec![7.0, 7.0, 7.0]).unwrap();
        let out = normalize_minmax(&r);
        assert!(out.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn normalization_is_idempotent_and_bounded() {
        let r = random_matrix(12, 4, 5);
        let once = normalize_minmax(&r);
        let twice = normalize_minmax(&once);
        for (a, b) in once.iter().zip(twice.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(once.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn single_cluster_gives_column_means_and_total_scatter() {
        let x = random_matrix(10, 3, 7);
        let result = kmeans(&x, 1, 0, 1, 100).unwrap();
        assert!(result.labels.iter().all(|&l| l == 0));
        for j in 0..3 {
            let mean = x.column(j).sum() / 10.0;
            assert!((result.centroids[[0, j]] - mean).abs() < 1e-12);
        }
        let scatter: f64 = x
            .rows()
            .into_iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, v)| (v - result.centroids[[0, j]]).powi(2))
                    .sum::<f64>()
            })
            .sum();
        assert!((result.inertia - scatter).abs() < 1e-9);
    }

    #[test]
    fn well_separated_clouds_split_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut x = Array2::zeros((20, 2));
        for i in 0..10 {
            x[[i, 0]] = rng.gen_range(-0.5..0.5);
            x[[i, 1]] = rng.gen_range(-0.5..0.5);
            x[[10 + i, 0]] = 100.0 + rng.gen_range(-0.5..0.5);
            x[[10 + i, 1]] = rng.gen_range(-0.5..0.5);
        }
        let result = kmeans(&x, 2, 42, 10, 300).unwrap();
        let first = result.labels[0];
        assert!(result.labels[..10].iter().all(|&l| l == first));
        assert!(result.labels[10..].iter().all(|&l| l != first));
    }

    #[test]
    fn restarts_reach_the_exhaustive_optimum_on_tiny_instances() {
        for seed in 0..10 {
            let x = random_matrix(10, 2, 100 + seed);
            let result = kmeans(&x, 2, seed, 40, 300).unwrap();
            // exhaustive search over all 2-partitions (point 0 fixed in A)
            let mut best = f64::INFINITY;
            for mask in 0..(1u32 << 9) {
                let labels: Vec<usize> = (0..10)
                    .map(|i| if i == 0 { 0 } else { ((mask >> (i - 1)) & 1) as usize })
                    .collect();
                if labels.iter().all(|&l| l == 0) {
                    continue;
                }
                let mut inertia = 0.0;
                for cluster in 0..2 {
                    let members: Vec<usize> =
                        (0..10).filter(|&i| labels[i] == cluster).collect();
                    if members.is_empty() {
                        continue;
                    }
                    let centroid: Vec<f64> = (0..2)
                        .map(|j| {
                            members.iter().map(|&i| x[[i, j]]).sum::<f64>()
                                / members.len() as f64
                        })
                        .collect();
                    for &i in &members {
                        inertia += (0..2)
                            .map(|j| (x[[i, j]] - centroid[j]).powi(2))
                            .sum::<f64>();
                    }
                }
                best = best.min(inertia);
            }
            assert!(
                result.inertia <= best + 1e-9,
                "seed {seed}: {} vs optimum {best}",
                result.inertia
            );
        }
    }

    #[test]
    fn inertia_matches_its_definition_and_runs_are_reproducible() {
        let x = random_matrix(30, 4, 9);
        let a = kmeans(&x, 3, 5, 10, 300).unwrap();
        let b = kmeans(&x, 3, 5, 10, 300).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.inertia, b.inertia);
        let recomputed: f64 = x
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, v)| (v - a.centroids[[a.labels[i], j]]).powi(2))
                    .sum::<f64>()
            })
            .sum();
        assert!((a.inertia - recomputed).abs() / recomputed.max(1e-12) < 1e-6);
    }

    #[test]
    fn too_many_clusters_is_a_configuration_error() {
        let x = random_matrix(3, 2, 11);
        assert!(matches!(kmeans(&x, 4, 0, 1, 10), Err(Error::Config(_))));
    }

    #[test]
    fn coincident_groups_select_their_true_count() {
        // 4 groups of identical points
        let mut x = Array2::zeros((20, 2));
        for g in 0..4 {
            for i in 0..5 {
                x[[g * 5 + i, 0]] = (g as f64) * 10.0;
                x[[g * 5 + i, 1]] = (g as f64) * -7.0;
            }
        }
        let report = identify_concept_count(&x, 2, 8, 7, 5).unwrap();
        assert_eq!(report.best_c, 4);
        assert!((report.scores[&4] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_candidate_range_returns_it() {
        let x = random_matrix(10, 3, 13);
        let report = identify_concept_count(&x, 2, 2, 1, 3).unwrap();
        assert_eq!(report.best_c, 2);
        assert_eq!(report.scores.len(), 1);
    }

    #[test]
    fn identification_ignores_positive_column_rescaling() {
        let r = random_matrix(24, 4, 17);
        let mut scaled = r.clone();
        for i in 0..24 {
            scaled[[i, 2]] *= 1000.0;
        }
        let a = identify_concept_count(&r, 2, 5, 3, 5).unwrap();
        let b = identify_concept_count(&scaled, 2, 5, 3, 5).unwrap();
        assert_eq!(a.best_c, b.best_c);
        for (c, score) in &a.scores {
            assert!((score - b.scores[c]).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_range_is_rejected() {
        let x = random_matrix(5, 2, 19);
        assert!(identify_concept_count(&x, 2, 5, 0, 1).is_err());
        assert!(identify_concept_count(&x, 3, 2, 0, 1).is_err());
        assert!(identify_concept_count(&x, 1, 2, 0, 1).is_err());
    }
}
