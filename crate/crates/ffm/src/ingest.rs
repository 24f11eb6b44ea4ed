//! Loading and storing fixed-size chunked streams.
//!
//! Two on-disk forms are supported: a CSV subset (comma separated, decimal
//! reals, optional header and label column) and a raw little-endian `f32`
//! row-major binary with a JSON sidecar
//! `{"rows":int,"features":int,"chunk_size":int,"ground_truth":[int,...]?}`.
//! Rows that do not form an entire chunk are discarded.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::streamgen::SyntheticStream;
use crate::Real;

/// Ordered sequence of equally shaped data chunks.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkedStream<F> {
    pub chunks: Vec<Array2<F>>,
    pub chunk_size: usize,
    pub n_features: usize,
    pub source_name: String,
    /// Per-chunk concept identifiers, when known.
    pub ground_truth: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawSidecar {
    pub rows: usize,
    pub features: usize,
    pub chunk_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<Vec<usize>>,
}

impl<F: Real> From<SyntheticStream<F>> for ChunkedStream<F> {
    fn from(stream: SyntheticStream<F>) -> Self {
        ChunkedStream {
            chunk_size: stream.config.chunk_size,
            n_features: stream.config.n_features,
            source_name: "synthetic".into(),
            ground_truth: Some(stream.ground_truth),
            chunks: stream.chunks,
        }
    }
}

fn partition_rows<F: Real>(
    rows: Vec<Vec<F>>,
    chunk_size: usize,
    d: usize,
    source_name: &str,
) -> Result<ChunkedStream<F>> {
    let n_chunks = rows.len() / chunk_size;
    if n_chunks == 0 {
        return Err(Error::EmptyStream(format!(
            "{} rows cannot form a chunk of size {chunk_size}",
            rows.len()
        )));
    }
    let chunks = (0..n_chunks)
        .map(|c| {
            let mut chunk = Array2::zeros((chunk_size, d));
            for (i, row) in rows[c * chunk_size..(c + 1) * chunk_size].iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    chunk[[i, j]] = v;
                }
            }
            chunk
        })
        .collect();
    Ok(ChunkedStream {
        chunks,
        chunk_size,
        n_features: d,
        source_name: source_name.to_string(),
        ground_truth: None,
    })
}

/// Reads a CSV file into fixed-size chunks, discarding the trailing partial
/// chunk and (optionally) dropping a label column.
pub fn read_chunked_csv<F: Real>(
    path: impl AsRef<Path>,
    chunk_size: usize,
    has_header: bool,
    label_column: Option<usize>,
) -> Result<ChunkedStream<F>> {
    if chunk_size == 0 {
        return Err(Error::Config("chunk_size must be positive".into()));
    }
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Format(format!("{e}")))?;

    let mut rows: Vec<Vec<F>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let row_no = idx + 1;
        let record = record.map_err(|e| Error::Format(format!("row {row_no}: {e}")))?;
        let cols = record.len();
        match width {
            None => width = Some(cols),
            Some(w) if w != cols => {
                return Err(Error::Format(format!(
                    "ragged row {row_no}: expected {w} columns, found {cols}"
                )))
            }
            _ => {}
        }
        if let Some(label) = label_column {
            if label >= cols {
                return Err(Error::Format(format!(
                    "label column {label} out of range for {cols} columns"
                )));
            }
        }
        let mut row = Vec::with_capacity(cols - label_column.map_or(0, |_| 1));
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == label_column {
                continue;
            }
            let value: f64 = cell.trim().parse().map_err(|e| Error::Parse {
                row: row_no,
                column: col + 1,
                message: format!("{e}"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    row: row_no,
                    column: col + 1,
                    message: "non-finite value".into(),
                });
            }
            row.push(F::from(value).unwrap());
        }
        rows.push(row);
    }
    let d = rows.first().map_or(0, |r| r.len());
    if d == 0 {
        return Err(Error::EmptyStream("no data rows".into()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    partition_rows(rows, chunk_size, d, &name)
}

fn read_sidecar(path: &Path) -> Result<RawSidecar> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

/// Reads a raw little-endian `f32` row-major stream described by its sidecar.
pub fn read_raw_f32<F: Real>(
    data_path: impl AsRef<Path>,
    sidecar_path: impl AsRef<Path>,
) -> Result<ChunkedStream<F>> {
    let data_path = data_path.as_ref();
    let sidecar = read_sidecar(sidecar_path.as_ref())?;
    if sidecar.rows == 0 || sidecar.features == 0 || sidecar.chunk_size == 0 {
        return Err(Error::Schema(
            "rows, features and chunk_size must be positive".into(),
        ));
    }
    let bytes = fs::read(data_path)?;
    let expected = sidecar.rows * sidecar.features * 4;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "data file is {} bytes, sidecar implies {expected}",
            bytes.len()
        )));
    }
    let mut values = bytes
        .chunks_exact(4)
        .map(|b| F::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])).unwrap());
    let rows: Vec<Vec<F>> = (0..sidecar.rows)
        .map(|_| (0..sidecar.features).map(|_| values.next().unwrap()).collect())
        .collect();
    let name = data_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut stream = partition_rows(rows, sidecar.chunk_size, sidecar.features, &name)?;
    if let Some(gt) = sidecar.ground_truth {
        stream.ground_truth = Some(gt.into_iter().take(stream.chunks.len()).collect());
    }
    Ok(stream)
}

/// Writes chunks as raw little-endian `f32` plus a JSON sidecar; the inverse
/// of [`read_raw_f32`].
pub fn write_raw_f32<F: Real>(
    chunks: &[Array2<F>],
    ground_truth: Option<&[usize]>,
    data_path: impl AsRef<Path>,
    sidecar_path: impl AsRef<Path>,
) -> Result<()> {
    if chunks.is_empty() {
        return Err(Error::Degenerate("nothing to write: no chunks".into()));
    }
    let (chunk_size, features) = chunks[0].dim();
    if chunks.iter().any(|c| c.dim() != (chunk_size, features)) {
        return Err(Error::Dimension("chunks differ in shape".into()));
    }
    let rows = chunks.len() * chunk_size;
    let mut bytes = Vec::with_capacity(rows * features * 4);
    for chunk in chunks {
        for row in chunk.rows() {
            for &v in row.iter() {
                let v32 = v.to_f32().ok_or_else(|| {
                    Error::InvalidInput("value not representable as f32".into())
                })?;
                bytes.extend_from_slice(&v32.to_le_bytes());
            }
        }
    }
    fs::write(data_path, bytes)?;
    let sidecar = RawSidecar {
        rows,
        features,
        chunk_size,
        ground_truth: ground_truth.map(|g| g.to_vec()),
    };
    fs::write(sidecar_path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

impl<F: Real> ChunkedStream<F> {
    pub fn write_raw(
        &self,
        data_path: impl AsRef<Path>,
        sidecar_path: impl AsRef<Path>,
    ) -> Result<()> {
        write_raw_f32(
            &self.chunks,
            self.ground_truth.as_deref(),
            data_path,
            sidecar_path,
        )
    }
}
