//! Discrete Fourier transform primitives used by the metadescriptor.
//!
//! The forward transform is unnormalized (`X[f] = sum_t x[t] cos(2 pi f t / d)`
//! in its retained real part); the inverse carries the `1/d` factor. Only the
//! first `floor(d/2)` real coefficients are kept, so `values[0]` is the sum of
//! the input vector.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::Real;

/// Real parts of the first `floor(d/2)` DFT coefficients of a length-`d`
/// feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpectrum<F> {
    pub values: Vec<F>,
    /// Original feature-vector length `d`.
    pub source_dim: usize,
}

/// Number of retained coefficients for a feature vector of length `d`.
pub fn spectrum_len(d: usize) -> usize {
    d / 2
}

/// Forward transform: real parts of DFT coefficients `0..floor(d/2)`.
pub fn dft_real_half<F: Real>(x: &[F]) -> Result<RealSpectrum<F>> {
    let d = x.len();
    if d < 2 {
        return Err(Error::Dimension(format!(
            "dft_real_half requires d >= 2, got {d}"
        )));
    }
    if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite entry at position {pos}"
        )));
    }
    let mut buf: Vec<Complex<F>> = x
        .iter()
        .map(|&v| Complex::new(v, F::zero()))
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(d);
    fft.process(&mut buf);
    let values = buf[..spectrum_len(d)].iter().map(|c| c.re).collect();
    Ok(RealSpectrum {
        values,
        source_dim: d,
    })
}

/// Inverse transform of a single retained coefficient.
///
/// Builds a length-`d` spectrum that is zero apart from `value` at
/// `freq_index` (plus its conjugate mirror at `d - freq_index` for
/// `freq_index > 0`, keeping the inverse real), applies the `1/d`-normalized
/// inverse DFT and returns the first `n_out` samples. In closed form this is
/// `value/d` for the DC coefficient and `2 value/d * cos(2 pi f t / d)`
/// otherwise.
pub fn idft_single_component<F: Real>(
    value: F,
    freq_index: usize,
    d: usize,
    n_out: usize,
) -> Result<Vec<F>> {
    if d == 0 {
        return Err(Error::Dimension("d must be positive".into()));
    }
    if freq_index >= spectrum_len(d) {
        return Err(Error::Index(format!(
            "freq_index {freq_index} not below floor(d/2) = {}",
            spectrum_len(d)
        )));
    }
    if n_out == 0 || n_out > d {
        return Err(Error::Dimension(format!(
            "n_out must be in 1..={d}, got {n_out}"
        )));
    }
    let dd = F::from(d).unwrap();
    if freq_index == 0 {
        return Ok(vec![value / dd; n_out]);
    }
    let tau = F::from(std::f64::consts::TAU).unwrap();
    let amp = (F::one() + F::one()) * value / dd;
    let samples = (0..n_out)
        .map(|t| {
            // reduce f*t mod d before the angle for accuracy at large t
            let phase = F::from((freq_index * t) % d).unwrap() / dd;
            amp * (tau * phase).cos()
        })
        .collect();
    Ok(samples)
}
