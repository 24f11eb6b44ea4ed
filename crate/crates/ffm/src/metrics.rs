//! Clustering agreement and validity metrics plus the paired t-test used in
//! the benchmark reports.

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

/// Cross-tabulation of two labelings over the same items.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<usize>>,
    pub row_sums: Vec<usize>,
    pub col_sums: Vec<usize>,
    pub total: usize,
}

impl ContingencyTable {
    pub fn from_labelings(truth: &[usize], pred: &[usize]) -> Result<Self> {
        if truth.len() != pred.len() {
            return Err(Error::Dimension(format!(
                "labelings differ in length: {} vs {}",
                truth.len(),
                pred.len()
            )));
        }
        if truth.is_empty() {
            return Err(Error::Degenerate("empty labelings".into()));
        }
        let dense = |labels: &[usize]| {
            let mut map = BTreeMap::new();
            for &l in labels {
                let next = map.len();
                map.entry(l).or_insert(next);
            }
            map
        };
        let rows = dense(truth);
        let cols = dense(pred);
        let mut counts = vec![vec![0usize; cols.len()]; rows.len()];
        for (&t, &p) in truth.iter().zip(pred) {
            counts[rows[&t]][cols[&p]] += 1;
        }
        let row_sums: Vec<usize> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<usize> = (0..cols.len())
            .map(|j| counts.iter().map(|r| r[j]).sum())
            .collect();
        Ok(ContingencyTable {
            counts,
            row_sums,
            col_sums,
            total: truth.len(),
        })
    }
}

/// Denominator convention for normalized mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmiNormalization {
    /// `sqrt(H(truth) * H(pred))` (default).
    Geometric,
    /// `(H(truth) + H(pred)) / 2`.
    Arithmetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalScores<F> {
    pub nmi: F,
    pub adjusted_rand: F,
    pub completeness: F,
    pub homogeneity: F,
}

fn entropy(sums: &[usize], total: f64) -> f64 {
    sums.iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / total;
            -p * p.ln()
        })
        .sum()
}

fn comb2(n: usize) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

/// External agreement scores between a ground-truth and a predicted
/// labeling. Natural logarithms throughout.
pub fn external_clustering_scores_with<F: Real>(
    truth: &[usize],
    pred: &[usize],
    normalization: NmiNormalization,
) -> Result<ExternalScores<F>> {
    let table = ContingencyTable::from_labelings(truth, pred)?;
    let n = table.total as f64;
    let h_truth = entropy(&table.row_sums, n);
    let h_pred = entropy(&table.col_sums, n);

    let mut mi = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let pij = nij as f64 / n;
                mi += pij
                    * ((n * nij as f64)
                        / (table.row_sums[i] as f64 * table.col_sums[j] as f64))
                        .ln();
            }
        }
    }

    let nmi = if h_truth == 0.0 && h_pred == 0.0 {
        1.0
    } else if h_truth == 0.0 || h_pred == 0.0 {
        0.0
    } else {
        let denom = match normalization {
            NmiNormalization::Geometric => (h_truth * h_pred).sqrt(),
            NmiNormalization::Arithmetic => 0.5 * (h_truth + h_pred),
        };
        (mi / denom).clamp(0.0, 1.0)
    };

    let homogeneity = if h_truth == 0.0 {
        1.0
    } else {
        (mi / h_truth).clamp(0.0, 1.0)
    };
    let completeness = if h_pred == 0.0 {
        1.0
    } else {
        (mi / h_pred).clamp(0.0, 1.0)
    };

    // adjusted Rand under the permutation model
    let sum_ij: f64 = table
        .counts
        .iter()
        .flatten()
        .map(|&nij| comb2(nij))
        .sum();
    let sum_a: f64 = table.row_sums.iter().map(|&a| comb2(a)).sum();
    let sum_b: f64 = table.col_sums.iter().map(|&b| comb2(b)).sum();
    let expected = sum_a * sum_b / comb2(table.total);
    let max_index = 0.5 * (sum_a + sum_b);
    let adjusted_rand = if (max_index - expected).abs() < 1e-300 {
        1.0
    } else {
        (sum_ij - expected) / (max_index - expected)
    };

    Ok(ExternalScores {
        nmi: F::from(nmi).unwrap(),
        adjusted_rand: F::from(adjusted_rand).unwrap(),
        completeness: F::from(completeness).unwrap(),
        homogeneity: F::from(homogeneity).unwrap(),
    })
}

pub fn external_clustering_scores<F: Real>(
    truth: &[usize],
    pred: &[usize],
) -> Result<ExternalScores<F>> {
    external_clustering_scores_with(truth, pred, NmiNormalization::Geometric)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InternalScores<F> {
    pub silhouette: F,
    pub calinski_harabasz: F,
    pub davies_bouldin: F,
}

fn euclidean<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .sum::<F>()
        .sqrt()
}

/// Internal validity scores over Euclidean distances. Silhouette of a
/// singleton-cluster point is 0 and the mean over all points is returned.
pub fn internal_clustering_scores<F: Real>(
    x: &Array2<F>,
    labels: &[usize],
) -> Result<InternalScores<F>> {
    let (k, dim) = x.dim();
    if labels.len() != k {
        return Err(Error::Dimension(
            "labels length does not match point count".into(),
        ));
    }
    let mut cluster_ids = BTreeMap::new();
    for &l in labels {
        let next = cluster_ids.len();
        cluster_ids.entry(l).or_insert(next);
    }
    let c = cluster_ids.len();
    if c < 2 {
        return Err(Error::UndefinedMetric(
            "internal metrics need at least 2 clusters".into(),
        ));
    }
    let dense: Vec<usize> = labels.iter().map(|l| cluster_ids[l]).collect();
    let sizes: Vec<usize> = (0..c)
        .map(|ci| dense.iter().filter(|&&l| l == ci).count())
        .collect();
    let rows: Vec<Vec<F>> = x.rows().into_iter().map(|r| r.to_vec()).collect();

    // silhouette
    let mut sil_sum = F::zero();
    for i in 0..k {
        if sizes[dense[i]] == 1 {
            continue; // singleton contributes 0
        }
        let mut dist_sum = vec![F::zero(); c];
        for j in 0..k {
            if j != i {
                dist_sum[dense[j]] += euclidean(&rows[i], &rows[j]);
            }
        }
        let own = dense[i];
        let a = dist_sum[own] / F::from(sizes[own] - 1).unwrap();
        let mut b = F::infinity();
        for ci in 0..c {
            if ci != own {
                let mean = dist_sum[ci] / F::from(sizes[ci]).unwrap();
                b = b.min(mean);
            }
        }
        let denom = a.max(b);
        if denom > F::zero() {
            sil_sum += (b - a) / denom;
        }
    }
    let silhouette = sil_sum / F::from(k).unwrap();

    // centroids and scatters
    let mut centroids = vec![vec![F::zero(); dim]; c];
    for i in 0..k {
        for (slot, &v) in centroids[dense[i]].iter_mut().zip(&rows[i]) {
            *slot += v;
        }
    }
    for (ci, centroid) in centroids.iter_mut().enumerate() {
        let size = F::from(sizes[ci]).unwrap();
        for v in centroid.iter_mut() {
            *v = *v / size;
        }
    }
    let global: Vec<F> = (0..dim)
        .map(|j| rows.iter().map(|r| r[j]).sum::<F>() / F::from(k).unwrap())
        .collect();

    let mut within = F::zero();
    let mut within_per_cluster = vec![F::zero(); c];
    for i in 0..k {
        let d = euclidean(&rows[i], &centroids[dense[i]]);
        within += d * d;
        within_per_cluster[dense[i]] += d;
    }
    let mut between = F::zero();
    for ci in 0..c {
        let d = euclidean(&centroids[ci], &global);
        between += F::from(sizes[ci]).unwrap() * d * d;
    }
    let calinski_harabasz = if within > F::zero() {
        (between / F::from(c - 1).unwrap()) / (within / F::from(k - c).unwrap())
    } else {
        F::infinity()
    };

    let mean_scatter: Vec<F> = (0..c)
        .map(|ci| within_per_cluster[ci] / F::from(sizes[ci]).unwrap())
        .collect();
    let mut db_sum = F::zero();
    for i in 0..c {
        let mut worst = F::zero();
        for j in 0..c {
            if i == j {
                continue;
            }
            let sep = euclidean(&centroids[i], &centroids[j]);
            let scatter = mean_scatter[i] + mean_scatter[j];
            let ratio = if sep > F::zero() {
                scatter / sep
            } else if scatter > F::zero() {
                F::infinity()
            } else {
                F::zero()
            };
            worst = worst.max(ratio);
        }
        db_sum += worst;
    }
    let davies_bouldin = db_sum / F::from(c).unwrap();

    Ok(InternalScores {
        silhouette,
        calinski_harabasz,
        davies_bouldin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub p: f64,
    pub significant: bool,
}

/// Two-sided paired Student's t-test on matched samples. Zero-variance
/// differences use the convention `p = 0` (significant) for a nonzero mean
/// and `t = 0` (not significant) for a zero mean.
pub fn paired_t_test(a: &[f64], b: &[f64], alpha: f64) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(Error::Dimension("samples differ in length".into()));
    }
    let m = a.len();
    if m < 2 {
        return Err(Error::Degenerate(
            "paired t-test needs at least 2 pairs".into(),
        ));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / m as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
    if var == 0.0 {
        return Ok(if mean == 0.0 {
            TTestResult {
                t: 0.0,
                p: 1.0,
                significant: false,
            }
        } else {
            TTestResult {
                t: if mean > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
                p: 0.0,
                significant: true,
            }
        });
    }
    let t = mean / (var.sqrt() / (m as f64).sqrt());
    let dof = (m - 1) as f64;
    // two-sided p through the regularized incomplete beta function
    let p = statrs::function::beta::beta_reg(dof / 2.0, 0.5, dof / (dof + t * t));
    Ok(TTestResult {
        t,
        p,
        significant: p < alpha,
    })
}
