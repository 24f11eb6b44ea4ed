//! Seeded synthetic nonstationary stream generator.
//!
//! Each concept is a two-component Gaussian mixture with centers drawn from a
//! seeded standard normal in `d` dimensions and unit component covariance.
//! Drift boundaries are evenly spaced; sudden drifts switch concepts at the
//! boundary, gradual drifts sample each point from the emerging concept with
//! a sigmoid-scheduled probability, incremental drifts sample from a mixture
//! whose centers are the convex blend of the two transitioning concepts.
//!
//! Chunk randomness derives from `(seed, chunk_index)`, so chunks may be
//! generated in parallel with schedule-independent output.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::{derive_seed, tag};
use crate::Real;

/// Gaussian components per concept.
const COMPONENTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftType {
    Sudden,
    Gradual,
    Incremental,
}

impl std::str::FromStr for DriftType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sudden" => Ok(DriftType::Sudden),
            "gradual" => Ok(DriftType::Gradual),
            "incremental" => Ok(DriftType::Incremental),
            other => Err(Error::Config(format!("unknown drift type: {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamConfig {
    pub n_chunks: usize,
    pub chunk_size: usize,
    pub n_features: usize,
    pub n_drifts: usize,
    pub drift_type: DriftType,
    pub recurring: bool,
    pub seed: u64,
}

impl StreamConfig {
    fn validate(&self) -> Result<()> {
        if self.n_chunks == 0 || self.chunk_size == 0 || self.n_features == 0 {
            return Err(Error::Config(
                "n_chunks, chunk_size and n_features must be positive".into(),
            ));
        }
        if self.n_drifts + 1 > self.n_chunks {
            return Err(Error::Config(format!(
                "n_drifts + 1 = {} exceeds n_chunks = {}",
                self.n_drifts + 1,
                self.n_chunks
            )));
        }
        Ok(())
    }
}

/// Generated stream: `n_chunks` matrices of shape `chunk_size x n_features`
/// plus the per-chunk concept ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticStream<F> {
    pub chunks: Vec<Array2<F>>,
    pub ground_truth: Vec<usize>,
    pub config: StreamConfig,
}

/// Sigmoid transition weight of `chunk_index` against a drift `boundary`.
/// `width -> 0` degenerates to a step.
pub fn concept_weight(chunk_index: usize, boundary: usize, width: f64) -> f64 {
    let z = (chunk_index as f64 - boundary as f64) / width;
    1.0 / (1.0 + (-z).exp())
}

/// Evenly spaced drift boundaries: `round((i+1) * n_chunks / (n_drifts+1))`.
pub fn drift_boundaries(n_chunks: usize, n_drifts: usize) -> Vec<usize> {
    let segments = (n_drifts + 1) as f64;
    (0..n_drifts)
        .map(|i| ((i + 1) as f64 * n_chunks as f64 / segments).round() as usize)
        .collect()
}

/// Concept 0 draws a base center profile; every later concept rearranges the
/// same profile along the feature axis with a seeded permutation. Concepts
/// therefore differ in how values are laid out across features — which the
/// frequency transform is sensitive to — while any statistic that aggregates
/// symmetrically over attributes sees identically distributed chunks.
fn draw_centers(seed: u64, concept: usize, d: usize) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, tag::CONCEPT, 0));
    let base =
        Array2::from_shape_fn((COMPONENTS, d), |_| rng.sample::<f64, _>(StandardNormal));
    if concept == 0 {
        return base;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, tag::CONCEPT, concept as u64));
    let mut perm: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    Array2::from_shape_fn((COMPONENTS, d), |(c, j)| base[[c, perm[j]]])
}

fn sample_row<F: Real>(rng: &mut ChaCha8Rng, centers: &Array2<f64>, out: &mut [F]) {
    let component = rng.gen_range(0..COMPONENTS);
    for (j, slot) in out.iter_mut().enumerate() {
        let noise: f64 = rng.sample(StandardNormal);
        *slot = F::from(centers[[component, j]] + noise).unwrap();
    }
}

fn generate_chunk<F: Real>(
    config: &StreamConfig,
    centers: &[Array2<f64>],
    boundaries: &[usize],
    width: f64,
    t: usize,
) -> Array2<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, tag::CHUNK, t as u64));
    let d = config.n_features;
    let base = boundaries.iter().filter(|&&b| b <= t).count();
    let mut chunk = Array2::zeros((config.chunk_size, d));

    let transition = if boundaries.is_empty() || config.drift_type == DriftType::Sudden {
        None
    } else {
        // nearest boundary governs the active transition
        let (i, &b) = boundaries
            .iter()
            .enumerate()
            .min_by_key(|(_, &b)| (b as i64 - t as i64).abs())
            .unwrap();
        Some((i, i + 1, concept_weight(t, b, width)))
    };

    match (config.drift_type, transition) {
        (DriftType::Sudden, _) | (_, None) => {
            for mut row in chunk.rows_mut() {
                sample_row(&mut rng, &centers[base], row.as_slice_mut().unwrap());
            }
        }
        (DriftType::Gradual, Some((prev, next, w))) => {
            for mut row in chunk.rows_mut() {
                let concept = if rng.gen::<f64>() < w { next } else { prev };
                sample_row(&mut rng, &centers[concept], row.as_slice_mut().unwrap());
            }
        }
        (DriftType::Incremental, Some((prev, next, w))) => {
            let blended = centers[next].map(|v| v * w) + centers[prev].map(|v| v * (1.0 - w));
            for mut row in chunk.rows_mut() {
                sample_row(&mut rng, &blended, row.as_slice_mut().unwrap());
            }
        }
    }
    chunk
}

/// Deterministic chunk-at-a-time view of a stream configuration. Chunk `t`
/// depends only on `(config, t)`, so callers may generate chunks lazily, in
/// parallel, or out of order without changing the data.
pub struct StreamSampler {
    config: StreamConfig,
    centers: Vec<Array2<f64>>,
    boundaries: Vec<usize>,
    width: f64,
}

impl StreamSampler {
    pub fn new(config: StreamConfig) -> Result<Self> {
        config.validate()?;
        let n_concepts = config.n_drifts + 1;
        let mut centers: Vec<Array2<f64>> = (0..n_concepts)
            .map(|j| draw_centers(config.seed, j, config.n_features))
            .collect();
        if config.recurring && config.n_drifts > 0 {
            centers[n_concepts - 1] = centers[0].clone();
        }
        let boundaries = drift_boundaries(config.n_chunks, config.n_drifts);
        let width = config.n_chunks as f64 / (10.0 * n_concepts as f64);
        Ok(StreamSampler {
            config,
            centers,
            boundaries,
            width,
        })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.config
    }

    /// The `t`-th chunk (`chunk_size x n_features`).
    pub fn chunk<F: Real>(&self, t: usize) -> Result<Array2<F>> {
        if t >= self.config.n_chunks {
            return Err(Error::Index(format!(
                "chunk index {t} out of range 0..{}",
                self.config.n_chunks
            )));
        }
        Ok(generate_chunk(
            &self.config,
            &self.centers,
            &self.boundaries,
            self.width,
            t,
        ))
    }

    /// Ground-truth concept identifier of the `t`-th chunk.
    pub fn concept(&self, t: usize) -> usize {
        let n_concepts = self.config.n_drifts + 1;
        let seg = self.boundaries.iter().filter(|&&b| b <= t).count();
        if self.config.recurring && self.config.n_drifts > 0 && seg == n_concepts - 1 {
            0
        } else {
            seg
        }
    }

    pub fn ground_truth(&self) -> Vec<usize> {
        (0..self.config.n_chunks).map(|t| self.concept(t)).collect()
    }
}

/// Generates a stream deterministically from its configuration.
pub fn make_stream<F: Real>(config: StreamConfig) -> Result<SyntheticStream<F>> {
    let sampler = StreamSampler::new(config)?;
    let chunks: Vec<Array2<F>> = (0..config.n_chunks)
        .into_par_iter()
        .map(|t| sampler.chunk(t).expect("index in range"))
        .collect();
    let ground_truth = sampler.ground_truth();
    Ok(SyntheticStream {
        chunks,
        ground_truth,
        config,
    })
}
