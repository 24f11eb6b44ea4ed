//! Core metadescriptor: per-chunk frequency signatures, variance-ranked
//! frequency selection, metadescription assembly and chunk visualization.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ChunkedStream;
use crate::signal::{dft_real_half, idft_single_component};
use crate::Real;

/// Per-chunk average of the sample half-spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySignature<F> {
    pub values: Vec<F>,
}

/// Selected-frequency representation of a whole stream.
///
/// `r` is `k x n`: one row per chunk, one column per selected frequency, in
/// descending-variance order. `variances` covers the full half-spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadescription<F> {
    pub r: Array2<F>,
    pub selected: Vec<usize>,
    pub variances: Vec<F>,
    pub n: usize,
    pub d: usize,
}

/// `n x n` spatial-domain rendering of one chunk's selected frequencies.
pub type ChunkImage<F> = Array2<F>;

/// Averages the sample spectra of one chunk. The mean row is accumulated in
/// a fixed order before the transform, which equals the per-row-spectrum mean
/// by linearity.
pub fn chunk_frequency_signature<F: Real>(chunk: &Array2<F>) -> Result<FrequencySignature<F>> {
    let (rows, d) = chunk.dim();
    if rows == 0 {
        return Err(Error::Dimension("empty chunk".into()));
    }
    if d < 2 {
        return Err(Error::Dimension(format!("d must be >= 2, got {d}")));
    }
    let scale = F::from(rows).unwrap();
    let mut mean = vec![F::zero(); d];
    for row in chunk.rows() {
        for (acc, &v) in mean.iter_mut().zip(row.iter()) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v = *v / scale;
    }
    let spectrum = dft_real_half(&mean)?;
    Ok(FrequencySignature {
        values: spectrum.values,
    })
}

/// Ranks frequency components by population variance across the signature
/// sequence and returns the indices of the `n` largest, ties broken toward
/// the lower index, together with the full variance vector.
pub fn select_frequencies<F: Real>(
    signatures: &[FrequencySignature<F>],
    n: usize,
) -> Result<(Vec<usize>, Vec<F>)> {
    if signatures.len() < 2 {
        return Err(Error::Degenerate(
            "frequency selection needs at least 2 signatures".into(),
        ));
    }
    let h = signatures[0].values.len();
    if signatures.iter().any(|s| s.values.len() != h) {
        return Err(Error::Dimension("signatures differ in length".into()));
    }
    if n == 0 || n > h {
        return Err(Error::Config(format!(
            "n must be in 1..={h}, got {n}"
        )));
    }
    let k = F::from(signatures.len()).unwrap();
    let variances: Vec<F> = (0..h)
        .map(|f| {
            let mean = signatures.iter().map(|s| s.values[f]).sum::<F>() / k;
            signatures
                .iter()
                .map(|s| {
                    let delta = s.values[f] - mean;
                    delta * delta
                })
                .sum::<F>()
                / k
        })
        .collect();
    let mut order: Vec<usize> = (0..h).collect();
    order.sort_by(|&a, &b| {
        variances[b]
            .partial_cmp(&variances[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    order.truncate(n);
    Ok((order, variances))
}

/// Builds the metadescription from precomputed per-chunk signatures; `d` is
/// the feature-vector length the signatures came from. This is the memory-lean
/// entry point for streams too large to hold in full.
pub fn metadescribe_signatures<F: Real>(
    signatures: &[FrequencySignature<F>],
    n: usize,
    d: usize,
) -> Result<Metadescription<F>> {
    if signatures.len() < 2 {
        return Err(Error::Degenerate(
            "metadescription needs at least 2 chunks".into(),
        ));
    }
    if signatures[0].values.len() != crate::signal::spectrum_len(d) {
        return Err(Error::Dimension(format!(
            "signature length {} inconsistent with d = {d}",
            signatures[0].values.len()
        )));
    }
    let (selected, variances) = select_frequencies(signatures, n)?;
    let mut r = Array2::zeros((signatures.len(), n));
    for (t, signature) in signatures.iter().enumerate() {
        for (j, &f) in selected.iter().enumerate() {
            r[[t, j]] = signature.values[f];
        }
    }
    Ok(Metadescription {
        r,
        selected,
        variances,
        n,
        d,
    })
}

/// Builds the metadescription of a chunk sequence.
pub fn metadescribe_chunks<F: Real>(chunks: &[Array2<F>], n: usize) -> Result<Metadescription<F>> {
    if chunks.is_empty() {
        return Err(Error::Degenerate(
            "metadescription needs at least 2 chunks".into(),
        ));
    }
    let d = chunks[0].ncols();
    let signatures: Vec<FrequencySignature<F>> = chunks
        .par_iter()
        .map(chunk_frequency_signature)
        .collect::<Result<_>>()?;
    metadescribe_signatures(&signatures, n, d)
}

pub fn metadescribe<F: Real>(stream: &ChunkedStream<F>, n: usize) -> Result<Metadescription<F>> {
    metadescribe_chunks(&stream.chunks, n)
}

/// Renders one chunk as an `n x n` image: row `j` is the first `n` samples of
/// the inverse transform of the `j`-th selected coefficient.
pub fn render_chunk_image<F: Real>(
    meta: &Metadescription<F>,
    chunk_index: usize,
) -> Result<ChunkImage<F>> {
    let k = meta.r.nrows();
    if chunk_index >= k {
        return Err(Error::Index(format!(
            "chunk_index {chunk_index} out of range for {k} chunks"
        )));
    }
    let n = meta.n;
    let mut image = Array2::zeros((n, n));
    for (j, &f) in meta.selected.iter().enumerate() {
        let row = idft_single_component(meta.r[[chunk_index, j]], f, meta.d, n)?;
        for (col, v) in row.into_iter().enumerate() {
            image[[j, col]] = v;
        }
    }
    Ok(image)
}

/// Serialized form of a metadescription; also used by the baseline
/// metadescriptors, which omit `selected` and `variances`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DescriptionFile<F> {
    pub n: usize,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variances: Option<Vec<F>>,
    #[serde(rename = "R")]
    pub r: Vec<Vec<F>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<Vec<usize>>,
}

impl<F: Real> DescriptionFile<F> {
    pub fn from_metadescription(
        meta: &Metadescription<F>,
        ground_truth: Option<Vec<usize>>,
    ) -> Self {
        DescriptionFile {
            n: meta.n,
            d: meta.d,
            selected: Some(meta.selected.clone()),
            variances: Some(meta.variances.clone()),
            r: meta.r.rows().into_iter().map(|row| row.to_vec()).collect(),
            ground_truth,
        }
    }

    /// Baseline form with a raw representation matrix only.
    pub fn from_matrix(r: &Array2<F>, d: usize, ground_truth: Option<Vec<usize>>) -> Self {
        DescriptionFile {
            n: r.ncols(),
            d,
            selected: None,
            variances: None,
            r: r.rows().into_iter().map(|row| row.to_vec()).collect(),
            ground_truth,
        }
    }

    pub fn matrix(&self) -> Result<Array2<F>> {
        let k = self.r.len();
        let n = self.r.first().map_or(0, |row| row.len());
        if k == 0 || n == 0 {
            return Err(Error::Degenerate("empty representation matrix".into()));
        }
        if self.r.iter().any(|row| row.len() != n) {
            return Err(Error::Format("ragged representation matrix".into()));
        }
        let mut m = Array2::zeros((k, n));
        for (t, row) in self.r.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[[t, j]] = v;
            }
        }
        Ok(m)
    }

    pub fn into_metadescription(self) -> Result<Metadescription<F>> {
        let r = self.matrix()?;
        let selected = self
            .selected
            .ok_or_else(|| Error::Schema("description lacks selected frequencies".into()))?;
        let variances = self
            .variances
            .ok_or_else(|| Error::Schema("description lacks variances".into()))?;
        if selected.len() != self.n {
            return Err(Error::Schema("selected length differs from n".into()));
        }
        Ok(Metadescription {
            r,
            selected,
            variances,
            n: self.n,
            d: self.d,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_chunk(rows: usize, d: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((rows, d), |_| rng.gen_range(-5.0..5.0))
    }

    /// Oracle: per-row naive DFT, then mean.
    fn naive_signature(chunk: &Array2<f64>) -> Vec<f64> {
        let d = chunk.ncols();
        let h = d / 2;
        let mut acc = vec![0.0; h];
        for row in chunk.rows() {
            let x: Vec<f64> = row.to_vec();
            for f in 0..h {
                let coeff: f64 = (0..d)
                    .map(|t| {
                        x[t] * (std::f64::consts::TAU * f as f64 * t as f64 / d as f64).cos()
                    })
                    .sum();
                acc[f] += coeff;
            }
        }
        acc.iter().map(|v| v / chunk.nrows() as f64).collect()
    }

    #[test]
    fn identical_rows_reduce_to_the_row_spectrum() {
        let x: Vec<f64> = vec![1.0, -2.0, 0.5, 3.0, -1.0, 0.0, 2.0, 1.5];
        let mut chunk = Array2::zeros((5, 8));
        for mut row in chunk.rows_mut() {
            for (j, v) in x.iter().enumerate() {
                row[j] = *v;
            }
        }
        let sig = chunk_frequency_signature(&chunk).unwrap();
        let spec = signal::dft_real_half(&x).unwrap();
        for (a, b) in sig.values.iter().zip(&spec.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn opposite_rows_cancel() {
        let x: Vec<f64> = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let mut chunk = Array2::zeros((2, 6));
        for (j, v) in x.iter().enumerate() {
            chunk[[0, j]] = *v;
            chunk[[1, j]] = -*v;
        }
        let sig = chunk_frequency_signature(&chunk).unwrap();
        assert!(sig.values.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn signature_matches_per_row_oracle() {
        let chunk = random_chunk(50, 16, 4);
        let sig = chunk_frequency_signature(&chunk).unwrap();
        let oracle = naive_signature(&chunk);
        for (a, b) in sig.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    fn signatures_from(values: &[Vec<f64>]) -> Vec<FrequencySignature<f64>> {
        values
            .iter()
            .map(|v| FrequencySignature { values: v.clone() })
            .collect()
    }

    #[test]
    fn exhaustive_selection_covers_all_indices() {
        let sigs = signatures_from(&[vec![1.0, 2.0, 3.0], vec![0.0, 5.0, 1.0]]);
        let (selected, _) = select_frequencies(&sigs, 3).unwrap();
        let mut sorted = selected.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn zero_variance_ties_break_toward_low_indices() {
        let sigs = signatures_from(&[vec![1.0; 5], vec![1.0; 5], vec![1.0; 5]]);
        let (selected, variances) = select_frequencies(&sigs, 3).unwrap();
        assert_eq!(selected, vec![0, 1, 2]);
        assert!(variances.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn alternating_component_wins_selection() {
        let mut sigs = Vec::new();
        for i in 0..6 {
            let mut v = vec![3.0f64; 8];
            v[5] = if i % 2 == 0 { 1.0 } else { -1.0 };
            sigs.push(FrequencySignature { values: v });
        }
        let (selected, variances) = select_frequencies(&sigs, 2).unwrap();
        assert_eq!(selected[0], 5);
        assert!((variances[5] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn selection_rejects_bad_parameters() {
        let sigs = signatures_from(&[vec![1.0, 2.0]]);
        assert!(matches!(
            select_frequencies(&sigs, 1),
            Err(Error::Degenerate(_))
        ));
        let sigs = signatures_from(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(
            select_frequencies(&sigs, 3),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn stationary_stream_gives_identical_rows() {
        let chunk = random_chunk(10, 12, 7);
        let chunks = vec![chunk.clone(), chunk.clone(), chunk];
        let meta = metadescribe_chunks(&chunks, 4).unwrap();
        for j in 0..4 {
            assert!((meta.r[[0, j]] - meta.r[[1, j]]).abs() < 1e-12);
            assert!((meta.r[[0, j]] - meta.r[[2, j]]).abs() < 1e-12);
        }
    }

    #[test]
    fn metadescription_matches_end_to_end_oracle() {
        let chunks: Vec<Array2<f64>> = (0..8).map(|i| random_chunk(12, 16, 100 + i)).collect();
        let n = 5;
        let meta = metadescribe_chunks(&chunks, n).unwrap();

        // independent pipeline: naive signature, population variance, top-n
        let sigs: Vec<Vec<f64>> = chunks.iter().map(naive_signature).collect();
        let h = sigs[0].len();
        let k = sigs.len() as f64;
        let vars: Vec<f64> = (0..h)
            .map(|f| {
                let mean = sigs.iter().map(|s| s[f]).sum::<f64>() / k;
                sigs.iter().map(|s| (s[f] - mean).powi(2)).sum::<f64>() / k
            })
            .collect();
        let mut order: Vec<usize> = (0..h).collect();
        order.sort_by(|&a, &b| vars[b].partial_cmp(&vars[a]).unwrap().then(a.cmp(&b)));
        assert_eq!(meta.selected, order[..n].to_vec());
        for (f, (a, b)) in meta.variances.iter().zip(&vars).enumerate() {
            assert!((a - b).abs() < 1e-9, "variance mismatch at {f}");
        }
        for t in 0..chunks.len() {
            for (j, &f) in meta.selected.iter().enumerate() {
                assert!((meta.r[[t, j]] - sigs[t][f]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn r_is_a_column_subset_of_full_signatures() {
        let chunks: Vec<Array2<f64>> = (0..6).map(|i| random_chunk(9, 14, 40 + i)).collect();
        let meta = metadescribe_chunks(&chunks, 3).unwrap();
        for (t, chunk) in chunks.iter().enumerate() {
            let sig = chunk_frequency_signature(chunk).unwrap();
            for (j, &f) in meta.selected.iter().enumerate() {
                assert_eq!(meta.r[[t, j]], sig.values[f]);
            }
        }
    }

    #[test]
    fn scaling_the_stream_preserves_selection_and_scales_r() {
        let chunks: Vec<Array2<f64>> = (0..7).map(|i| random_chunk(8, 12, 70 + i)).collect();
        let meta = metadescribe_chunks(&chunks, 4).unwrap();
        let alpha = 3.5;
        let scaled: Vec<Array2<f64>> = chunks.iter().map(|c| c.map(|v| v * alpha)).collect();
        let meta_scaled = metadescribe_chunks(&scaled, 4).unwrap();
        assert_eq!(meta.selected, meta_scaled.selected);
        for t in 0..chunks.len() {
            for j in 0..4 {
                assert!((meta_scaled.r[[t, j]] - alpha * meta.r[[t, j]]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn permuting_chunks_permutes_rows_of_r() {
        let chunks: Vec<Array2<f64>> = (0..5).map(|i| random_chunk(6, 10, 90 + i)).collect();
        let meta = metadescribe_chunks(&chunks, 3).unwrap();
        let perm = [3usize, 0, 4, 1, 2];
        let permuted: Vec<Array2<f64>> = perm.iter().map(|&i| chunks[i].clone()).collect();
        let meta_p = metadescribe_chunks(&permuted, 3).unwrap();
        assert_eq!(meta.selected, meta_p.selected);
        for (new_t, &old_t) in perm.iter().enumerate() {
            for j in 0..3 {
                assert!((meta_p.r[[new_t, j]] - meta.r[[old_t, j]]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn image_rows_follow_the_inverse_transform() {
        let chunks: Vec<Array2<f64>> = (0..6).map(|i| random_chunk(10, 34, 10 + i)).collect();
        let meta = metadescribe_chunks(&chunks, 16).unwrap();
        let image = render_chunk_image(&meta, 2).unwrap();
        assert_eq!(image.dim(), (16, 16));
        for (j, &f) in meta.selected.iter().enumerate() {
            let expect =
                idft_single_component(meta.r[[2, j]], f, meta.d, 16).unwrap();
            for (col, e) in expect.iter().enumerate() {
                assert_eq!(image[[j, col]], *e);
            }
        }
        assert!(matches!(
            render_chunk_image(&meta, 6),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn zero_coefficient_renders_a_zero_row_and_dc_a_constant_row() {
        let chunks: Vec<Array2<f64>> = (0..4).map(|i| random_chunk(5, 8, 20 + i)).collect();
        let mut meta = metadescribe_chunks(&chunks, 2).unwrap();
        meta.selected = vec![0, 1];
        meta.r[[1, 0]] = 4.0;
        meta.r[[1, 1]] = 0.0;
        let image = render_chunk_image(&meta, 1).unwrap();
        for col in 0..2 {
            assert!((image[[0, col]] - 0.5).abs() < 1e-12); // DC: v/d = 4/8
            assert_eq!(image[[1, col]], 0.0);
        }
    }

    #[test]
    fn description_file_round_trips() {
        let chunks: Vec<Array2<f64>> = (0..5).map(|i| random_chunk(6, 12, 30 + i)).collect();
        let meta = metadescribe_chunks(&chunks, 3).unwrap();
        let file = DescriptionFile::from_metadescription(&meta, Some(vec![0, 0, 1, 1, 1]));
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.contains("\"R\":"));
        let parsed: DescriptionFile<f64> = serde_json::from_str(&text).unwrap();
        let back = parsed.into_metadescription().unwrap();
        assert_eq!(back, meta);
    }
}
