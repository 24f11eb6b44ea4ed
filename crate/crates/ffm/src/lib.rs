//! Frequency Filtering Metadescriptor (FFM) for post-hoc characterization of
//! nonstationary data streams.
//!
//! The pipeline turns a chunked sample stream into a compact metadescription:
//! each chunk is summarized by the real half-spectrum of its samples, the
//! frequency components with the largest variance across chunks are retained,
//! and the resulting chunk representation is clustered into concepts. The
//! crate also ships the comparison metadescriptors (statistical metafeatures
//! and two-component PCA), clustering validity metrics, a seeded drifting
//! stream generator and raster export of chunk visualizations.
//!
//! All numeric kernels are generic over the scalar type through [`Real`];
//! concrete `f32`/`f64` aliases for the main types live at the crate root.

use std::fmt::Display;
use std::iter::Sum;

use num_traits::{Float, NumAssign};
use rustfft::FftNum;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub mod baselines;
pub mod clustering;
pub mod error;
pub mod imaging;
pub mod ingest;
pub mod metadescriptor;
pub mod metrics;
pub mod seeding;
pub mod signal;
pub mod streamgen;

pub use error::{Error, Result};

/// Scalar type the numeric pipeline is generic over.
///
/// Implemented by `f32` and `f64`; the blanket impl picks up any float that
/// satisfies the transform and serialization bounds.
pub trait Real:
    Float + FftNum + NumAssign + Sum + Display + Serialize + DeserializeOwned
{
}

impl<T> Real for T where
    T: Float + FftNum + NumAssign + Sum + Display + Serialize + DeserializeOwned
{
}

pub type RealSpectrum32 = signal::RealSpectrum<f32>;
pub type RealSpectrum64 = signal::RealSpectrum<f64>;
pub type SyntheticStream32 = streamgen::SyntheticStream<f32>;
pub type SyntheticStream64 = streamgen::SyntheticStream<f64>;
pub type ChunkedStream32 = ingest::ChunkedStream<f32>;
pub type ChunkedStream64 = ingest::ChunkedStream<f64>;
pub type Metadescription32 = metadescriptor::Metadescription<f32>;
pub type Metadescription64 = metadescriptor::Metadescription<f64>;
pub type ClusteringResult32 = clustering::ClusteringResult<f32>;
pub type ClusteringResult64 = clustering::ClusteringResult<f64>;
