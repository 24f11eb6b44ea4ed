//! Comparison metadescriptors: CED statistical metafeatures and
//! two-component PCA over chunk means.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::Real;

/// Ten-slot statistical chunk summary: mean and standard deviation of each of
/// the five per-attribute statistics
/// `{mean, std, mean |correlation|, skewness, excess kurtosis}`, in that
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct CedVector<F> {
    pub values: [F; 10],
}

/// Two-component PCA model fitted on chunk mean vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel<F> {
    pub mean_vector: Array1<F>,
    /// `2 x d`, rows orthonormal, sign fixed so the largest-magnitude entry
    /// of each row is positive.
    pub components: Array2<F>,
    pub explained_variance: [F; 2],
}

fn summarize<F: Real>(values: &[F]) -> (F, F) {
    let n = F::from(values.len()).unwrap();
    let mean = values.iter().copied().sum::<F>() / n;
    let var = values
        .iter()
        .map(|&v| {
            let delta = v - mean;
            delta * delta
        })
        .sum::<F>()
        / n;
    (mean, var.sqrt())
}

/// Extracts the CED metafeature vector of one chunk.
///
/// Per attribute: population mean/std, mean absolute Pearson correlation with
/// every other attribute (zero-variance pairs contribute 0), standardized
/// skewness and excess kurtosis (both 0 for zero-variance attributes).
pub fn ced_metafeatures<F: Real>(chunk: &Array2<F>) -> Result<CedVector<F>> {
    let (rows, d) = chunk.dim();
    if rows < 2 {
        return Err(Error::Degenerate(format!(
            "ced_metafeatures needs chunk_size >= 2, got {rows}"
        )));
    }
    let nf = F::from(rows).unwrap();

    let means: Vec<F> = (0..d)
        .map(|j| chunk.column(j).iter().copied().sum::<F>() / nf)
        .collect();
    let mut m2 = vec![F::zero(); d];
    let mut m3 = vec![F::zero(); d];
    let mut m4 = vec![F::zero(); d];
    for i in 0..rows {
        for j in 0..d {
            let delta = chunk[[i, j]] - means[j];
            let d2 = delta * delta;
            m2[j] += d2;
            m3[j] += d2 * delta;
            m4[j] += d2 * d2;
        }
    }
    for j in 0..d {
        m2[j] = m2[j] / nf;
        m3[j] = m3[j] / nf;
        m4[j] = m4[j] / nf;
    }
    let stds: Vec<F> = m2.iter().map(|&v| v.sqrt()).collect();
    let skews: Vec<F> = (0..d)
        .map(|j| {
            if m2[j] > F::zero() {
                m3[j] / m2[j].powf(F::from(1.5).unwrap())
            } else {
                F::zero()
            }
        })
        .collect();
    let kurts: Vec<F> = (0..d)
        .map(|j| {
            if m2[j] > F::zero() {
                m4[j] / (m2[j] * m2[j]) - F::from(3.0).unwrap()
            } else {
                F::zero()
            }
        })
        .collect();

    // mean absolute pairwise correlation per attribute
    let mut corr_sums = vec![F::zero(); d];
    for a in 0..d {
        for b in (a + 1)..d {
            let mut cov = F::zero();
            for i in 0..rows {
                cov += (chunk[[i, a]] - means[a]) * (chunk[[i, b]] - means[b]);
            }
            cov = cov / nf;
            let denom = stds[a] * stds[b];
            let corr = if denom > F::zero() {
                (cov / denom).abs()
            } else {
                F::zero()
            };
            corr_sums[a] += corr;
            corr_sums[b] += corr;
        }
    }
    let corrs: Vec<F> = if d > 1 {
        corr_sums
            .iter()
            .map(|&s| s / F::from(d - 1).unwrap())
            .collect()
    } else {
        vec![F::zero()]
    };

    let blocks = [&means, &stds, &corrs, &skews, &kurts];
    let mut values = [F::zero(); 10];
    for (b, block) in blocks.iter().enumerate() {
        let (mean, std) = summarize(block);
        values[2 * b] = mean;
        values[2 * b + 1] = std;
    }
    Ok(CedVector { values })
}

fn matvec<F: Real>(m: &Array2<F>, v: &[F]) -> Vec<F> {
    m.rows()
        .into_iter()
        .map(|row| row.iter().zip(v).map(|(&a, &b)| a * b).sum())
        .collect()
}

fn normalize<F: Real>(v: &mut [F]) -> F {
    let norm = v.iter().map(|&x| x * x).sum::<F>().sqrt();
    if norm > F::zero() {
        for x in v.iter_mut() {
            *x = *x / norm;
        }
    }
    norm
}

fn orthogonalize<F: Real>(v: &mut [F], against: &[F]) {
    let dot: F = v.iter().zip(against).map(|(&a, &b)| a * b).sum();
    for (x, &a) in v.iter_mut().zip(against) {
        *x = *x - dot * a;
    }
}

fn fix_sign<F: Real>(v: &mut [F]) {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < F::zero() {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Power iteration with deflation for the top eigenpair of a symmetric PSD
/// matrix, deterministic start at the basis vector of the largest diagonal.
fn dominant_eigen<F: Real>(cov: &Array2<F>, against: Option<&[F]>) -> (F, Vec<F>) {
    let d = cov.nrows();
    let tiny = F::from(1e-300).unwrap();
    let mut start = 0;
    for j in 0..d {
        if cov[[j, j]] > cov[[start, start]] {
            start = j;
        }
    }
    let mut v = vec![F::zero(); d];
    v[start] = F::one();
    if let Some(prev) = against {
        orthogonalize(&mut v, prev);
        if normalize(&mut v) <= tiny {
            // start vector collapsed onto the previous component
            let mut alt = 0;
            for (i, &x) in prev.iter().enumerate() {
                if x.abs() < prev[alt].abs() {
                    alt = i;
                }
            }
            v = vec![F::zero(); d];
            v[alt] = F::one();
            orthogonalize(&mut v, prev);
            normalize(&mut v);
        }
    }
    let tol = F::from(1e-14).unwrap();
    for _ in 0..2000 {
        let mut w = matvec(cov, &v);
        if let Some(prev) = against {
            orthogonalize(&mut w, prev);
        }
        let norm = normalize(&mut w);
        if norm <= tiny {
            // (numerically) zero matrix in the remaining subspace
            return (F::zero(), v);
        }
        let delta = w
            .iter()
            .zip(&v)
            .map(|(&a, &b)| (a - b).abs())
            .fold(F::zero(), F::max);
        v = w;
        if delta < tol {
            break;
        }
    }
    // Rayleigh quotient for the final estimate
    let w = matvec(cov, &v);
    let lambda = v.iter().zip(&w).map(|(&a, &b)| a * b).sum();
    (lambda, v)
}

/// Fits two-component PCA on a `k x d` matrix of chunk mean vectors.
pub fn pca_fit<F: Real>(chunk_means: &Array2<F>) -> Result<PcaModel<F>> {
    let (k, d) = chunk_means.dim();
    if k < 3 {
        return Err(Error::Degenerate(format!(
            "pca_fit needs at least 3 rows, got {k}"
        )));
    }
    if d < 2 {
        return Err(Error::Dimension("pca_fit needs at least 2 features".into()));
    }
    let kf = F::from(k).unwrap();
    let mean_vector: Array1<F> =
        Array1::from_iter((0..d).map(|j| chunk_means.column(j).iter().copied().sum::<F>() / kf));
    let mut centered = chunk_means.clone();
    for mut row in centered.rows_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = *v - mean_vector[j];
        }
    }
    // sample covariance
    let denom = F::from(k - 1).unwrap();
    let mut cov = Array2::zeros((d, d));
    for row in centered.rows() {
        for a in 0..d {
            let ra = row[a];
            for b in a..d {
                cov[[a, b]] += ra * row[b];
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = cov[[a, b]] / denom;
            cov[[a, b]] = v;
            cov[[b, a]] = v;
        }
    }

    let (lambda1, mut v1) = dominant_eigen(&cov, None);
    fix_sign(&mut v1);
    let (lambda2, mut v2) = dominant_eigen(&cov, Some(&v1));
    fix_sign(&mut v2);

    let mut components = Array2::zeros((2, d));
    for j in 0..d {
        components[[0, j]] = v1[j];
        components[[1, j]] = v2[j];
    }
    Ok(PcaModel {
        mean_vector,
        components,
        explained_variance: [lambda1.max(F::zero()), lambda2.max(F::zero())],
    })
}

/// Projects a vector onto the two fitted components.
pub fn pca_project<F: Real>(model: &PcaModel<F>, vector: &[F]) -> Result<[F; 2]> {
    let d = model.mean_vector.len();
    if vector.len() != d {
        return Err(Error::Dimension(format!(
            "vector length {} does not match model dimension {d}",
            vector.len()
        )));
    }
    let centered: Vec<F> = vector
        .iter()
        .zip(model.mean_vector.iter())
        .map(|(&v, &m)| v - m)
        .collect();
    let mut out = [F::zero(); 2];
    for c in 0..2 {
        out[c] = model
            .components
            .row(c)
            .iter()
            .zip(&centered)
            .map(|(&a, &b)| a * b)
            .sum();
    }
    Ok(out)
}
