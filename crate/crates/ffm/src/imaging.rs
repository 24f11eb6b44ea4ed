//! Binary PGM (P5) export of chunk images and image strips.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::Real;

fn scale_to_byte<F: Real>(v: F, min: F, range: F) -> u8 {
    if range > F::zero() {
        let norm = (v - min) / range;
        (norm * F::from(255.0).unwrap())
            .round()
            .to_u8()
            .unwrap_or(255)
    } else {
        128
    }
}

fn write_p5(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    write!(file, "P5\n{width} {height}\n255\n")?;
    file.write_all(pixels)?;
    Ok(())
}

/// Writes one image as binary PGM, rescaled over its own min/max; a constant
/// image maps to mid-gray.
pub fn write_pgm<F: Real>(image: &Array2<F>, path: impl AsRef<Path>) -> Result<()> {
    let (h, w) = image.dim();
    if h == 0 || w == 0 {
        return Err(Error::Dimension("empty image".into()));
    }
    let min = image.iter().copied().fold(F::infinity(), F::min);
    let max = image.iter().copied().fold(F::neg_infinity(), F::max);
    let range = max - min;
    let pixels: Vec<u8> = image
        .iter()
        .map(|&v| scale_to_byte(v, min, range))
        .collect();
    write_p5(path.as_ref(), w, h, &pixels)
}

/// Tiles images left to right, wrapping every `columns` images, with 1-pixel
/// black separators and black padding tiles. Rescaling is global across all
/// images so tiles stay visually comparable.
pub fn write_strip<F: Real>(
    images: &[Array2<F>],
    columns: usize,
    path: impl AsRef<Path>,
) -> Result<()> {
    if images.is_empty() {
        return Err(Error::Degenerate("no images to tile".into()));
    }
    if columns == 0 {
        return Err(Error::Config("columns must be positive".into()));
    }
    let (th, tw) = images[0].dim();
    if th == 0 || tw == 0 {
        return Err(Error::Dimension("empty image".into()));
    }
    if images.iter().any(|img| img.dim() != (th, tw)) {
        return Err(Error::Dimension("images differ in size".into()));
    }
    let min = images
        .iter()
        .flat_map(|img| img.iter().copied())
        .fold(F::infinity(), F::min);
    let max = images
        .iter()
        .flat_map(|img| img.iter().copied())
        .fold(F::neg_infinity(), F::max);
    let range = max - min;

    let rows = images.len().div_ceil(columns);
    let width = columns * tw + (columns - 1);
    let height = rows * th + (rows - 1);
    let mut pixels = vec![0u8; width * height];
    for (idx, image) in images.iter().enumerate() {
        let tile_row = idx / columns;
        let tile_col = idx % columns;
        let y0 = tile_row * (th + 1);
        let x0 = tile_col * (tw + 1);
        for r in 0..th {
            for c in 0..tw {
                pixels[(y0 + r) * width + x0 + c] = scale_to_byte(image[[r, c]], min, range);
            }
        }
    }
    write_p5(path.as_ref(), width, height, &pixels)
}
