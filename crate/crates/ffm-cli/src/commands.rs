//! Implementations of the single-shot subcommands.

use std::path::{Path, PathBuf};

use clap::Args;
use ffm::baselines::{ced_metafeatures, pca_fit, pca_project};
use ffm::clustering::{identify_concept_count, kmeans, normalize_minmax};
use ffm::ingest::{read_raw_f32, ChunkedStream};
use ffm::metadescriptor::{metadescribe, render_chunk_image, DescriptionFile};
use ffm::metrics::external_clustering_scores;
use ffm::streamgen::{make_stream, StreamConfig};
use ffm::{Error, Result};
use ndarray::Array2;

/// Sidecar path convention: `<data path>.json`.
pub fn sidecar_path(data_path: &Path) -> PathBuf {
    let mut s = data_path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub chunks: usize,
    #[arg(long)]
    pub chunk_size: usize,
    #[arg(long)]
    pub features: usize,
    #[arg(long)]
    pub drifts: usize,
    #[arg(long)]
    pub drift_type: ffm::streamgen::DriftType,
    #[arg(long)]
    pub seed: u64,
    /// Make the final segment reuse the first concept.
    #[arg(long)]
    pub recurring: bool,
    /// Output data path; the sidecar goes to `<out>.json`.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn generate(args: GenerateArgs) -> Result<()> {
    let config = StreamConfig {
        n_chunks: args.chunks,
        chunk_size: args.chunk_size,
        n_features: args.features,
        n_drifts: args.drifts,
        drift_type: args.drift_type,
        recurring: args.recurring,
        seed: args.seed,
    };
    let stream: ChunkedStream<f64> = make_stream(config)?.into();
    stream.write_raw(&args.out, sidecar_path(&args.out))
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DescribeMethod {
    Ffm,
    Ced,
    Pca,
}

#[derive(Args)]
pub struct DescribeArgs {
    /// Raw f32 data path; the sidecar is read from `<in>.json`.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Number of retained frequency components (ffm method only).
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub method: DescribeMethod,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn describe(args: DescribeArgs) -> Result<()> {
    let stream: ChunkedStream<f64> = read_raw_f32(&args.input, sidecar_path(&args.input))?;
    let gt = stream.ground_truth.clone();
    let d = stream.n_features;
    let file = match args.method {
        DescribeMethod::Ffm => {
            let meta = metadescribe(&stream, args.n)?;
            DescriptionFile::from_metadescription(&meta, gt)
        }
        DescribeMethod::Ced => {
            let rows: Vec<[f64; 10]> = stream
                .chunks
                .iter()
                .map(|c| ced_metafeatures(c).map(|v| v.values))
                .collect::<Result<_>>()?;
            let mut r = Array2::zeros((rows.len(), 10));
            for (i, row) in rows.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    r[[i, j]] = v;
                }
            }
            DescriptionFile::from_matrix(&r, d, gt)
        }
        DescribeMethod::Pca => {
            let r = pca_representation(&stream.chunks)?;
            DescriptionFile::from_matrix(&r, d, gt)
        }
    };
    write_json(&file, &args.out)
}

/// Chunk means projected onto their two principal components (`k x 2`).
pub fn pca_representation(chunks: &[Array2<f64>]) -> Result<Array2<f64>> {
    let k = chunks.len();
    let d = chunks.first().map_or(0, |c| c.ncols());
    let mut means = Array2::zeros((k, d));
    for (i, chunk) in chunks.iter().enumerate() {
        let rows = chunk.nrows() as f64;
        for j in 0..d {
            means[[i, j]] = chunk.column(j).sum() / rows;
        }
    }
    pca_from_means(&means)
}

/// PCA representation built directly from precomputed chunk means.
pub fn pca_from_means(means: &Array2<f64>) -> Result<Array2<f64>> {
    let model = pca_fit(means)?;
    let mut r = Array2::zeros((means.nrows(), 2));
    for (i, row) in means.rows().into_iter().enumerate() {
        let p = pca_project(&model, row.as_slice().unwrap())?;
        r[[i, 0]] = p[0];
        r[[i, 1]] = p[1];
    }
    Ok(r)
}

#[derive(Args)]
pub struct ClusterArgs {
    /// Metadescription JSON produced by `describe`.
    #[arg(long)]
    pub meta: PathBuf,
    #[arg(long)]
    pub concepts: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub replications: usize,
    /// Labels CSV path; external scores go to `<out>.scores.json` when the
    /// description carries ground truth.
    #[arg(long)]
    pub out: PathBuf,
}

fn read_description(path: &Path) -> Result<DescriptionFile<f64>> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

pub fn cluster(args: ClusterArgs) -> Result<()> {
    let file = read_description(&args.meta)?;
    let r = file.matrix()?;
    let normalized = normalize_minmax(&r);
    let result = kmeans(&normalized, args.concepts, args.seed, args.replications, 300)?;

    let mut csv = String::from("chunk,label\n");
    for (i, &label) in result.labels.iter().enumerate() {
        csv.push_str(&format!("{i},{label}\n"));
    }
    std::fs::write(&args.out, csv)?;

    if let Some(truth) = &file.ground_truth {
        let scores: ffm::metrics::ExternalScores<f64> =
            external_clustering_scores(truth, &result.labels)?;
        let mut scores_path = args.out.as_os_str().to_owned();
        scores_path.push(".scores.json");
        write_json(&scores, Path::new(&scores_path))?;
    }
    Ok(())
}

#[derive(Args)]
pub struct IdentifyArgs {
    #[arg(long)]
    pub meta: PathBuf,
    #[arg(long)]
    pub c_min: usize,
    #[arg(long)]
    pub c_max: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub replications: usize,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn identify(args: IdentifyArgs) -> Result<()> {
    let file = read_description(&args.meta)?;
    let r = file.matrix()?;
    let report = identify_concept_count(&r, args.c_min, args.c_max, args.seed, args.replications)?;
    write_json(&report, &args.out)
}

#[derive(Args)]
pub struct VisualizeArgs {
    #[arg(long)]
    pub meta: PathBuf,
    /// Chunk indices as a comma-separated list of numbers and inclusive
    /// ranges, e.g. `0,5,10-20`.
    #[arg(long)]
    pub chunks: String,
    #[arg(long, default_value_t = 10)]
    pub columns: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// Expands `0,5,10-20` into an index list, preserving order.
pub fn parse_chunk_list(spec: &str) -> Result<Vec<usize>> {
    let mut indices = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            return Err(Error::Config("empty entry in chunk list".into()));
        }
        match token.split_once('-') {
            None => indices.push(
                token
                    .parse()
                    .map_err(|_| Error::Config(format!("bad chunk index {token:?}")))?,
            ),
            Some((lo, hi)) => {
                let lo: usize = lo
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad range start in {token:?}")))?;
                let hi: usize = hi
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad range end in {token:?}")))?;
                if hi < lo {
                    return Err(Error::Config(format!("descending range {token:?}")));
                }
                indices.extend(lo..=hi);
            }
        }
    }
    Ok(indices)
}

pub fn visualize(args: VisualizeArgs) -> Result<()> {
    let file = read_description(&args.meta)?;
    let meta = file.into_metadescription()?;
    let indices = parse_chunk_list(&args.chunks)?;
    if indices.is_empty() {
        return Err(Error::Config("no chunks selected".into()));
    }
    let images: Vec<Array2<f64>> = indices
        .iter()
        .map(|&i| render_chunk_image(&meta, i))
        .collect::<Result<_>>()?;
    ffm::imaging::write_strip(&images, args.columns, &args.out)
}
