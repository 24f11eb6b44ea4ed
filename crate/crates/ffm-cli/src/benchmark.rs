//! Benchmark experiments: drift-type robustness, the method comparison grid,
//! and concept-count identification at scale.
//!
//! All randomness flows from `--seed`; per-stream seeds are derived from the
//! configuration index and replica so runs are byte-identical regardless of
//! scheduling or worker count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use ffm::clustering::{identify_concept_count, kmeans, normalize_minmax};
use ffm::metadescriptor::{chunk_frequency_signature, metadescribe_signatures, FrequencySignature};
use ffm::metrics::{external_clustering_scores, paired_t_test, ExternalScores};
use ffm::seeding::{derive_seed, tag};
use ffm::streamgen::{DriftType, StreamConfig, StreamSampler};
use ffm::{Error, Result};
use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

const KMEANS_REPLICATIONS: usize = 10;
const ALPHA: f64 = 0.05;

#[derive(Args)]
pub struct BenchmarkArgs {
    /// Experiment number: 1 (method grid), 2 (drift types), 3 (concept count).
    #[arg(long)]
    pub experiment: u8,
    /// Replicas per configuration; defaults to 3 for experiment 1 and 10
    /// otherwise.
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Run the correlation-based baseline even on wide streams (its cost is
    /// quadratic in the feature count, so it is skipped at full width by
    /// default).
    #[arg(long)]
    pub force_ced: bool,
    /// Scale overrides for smoke runs; the manifest records their use.
    #[arg(long)]
    pub chunks: Option<usize>,
    #[arg(long)]
    pub chunk_size: Option<usize>,
    #[arg(long)]
    pub features: Option<usize>,
}

/// One stream's evaluation under one method.
struct StreamScore {
    config_label: String,
    replica: usize,
    seed: u64,
    method: &'static str,
    scores: ExternalScores<f64>,
}

#[derive(Serialize)]
struct ManifestRun {
    config_label: String,
    stream: StreamConfig,
    replica: usize,
    methods: Vec<String>,
    skipped_methods: Vec<String>,
}

#[derive(Serialize)]
struct Manifest {
    experiment: u8,
    base_seed: u64,
    replicas: usize,
    kmeans_replications: usize,
    alpha: f64,
    scale_overrides: BTreeMap<String, usize>,
    runs: Vec<ManifestRun>,
}

/// Per-chunk quantities gathered in one streaming pass: frequency signature,
/// chunk mean, and (optionally) the statistical metafeature vector.
struct ChunkSummaries {
    signatures: Vec<FrequencySignature<f64>>,
    means: Array2<f64>,
    ced: Option<Array2<f64>>,
    ground_truth: Vec<usize>,
}

fn summarize_stream(config: StreamConfig, with_ced: bool) -> Result<ChunkSummaries> {
    let sampler = StreamSampler::new(config)?;
    let per_chunk: Vec<(FrequencySignature<f64>, Vec<f64>, Option<[f64; 10]>)> = (0..config
        .n_chunks)
        .into_par_iter()
        .map(|t| {
            let chunk: Array2<f64> = sampler.chunk(t)?;
            let signature = chunk_frequency_signature(&chunk)?;
            let rows = chunk.nrows() as f64;
            let mean: Vec<f64> = (0..chunk.ncols())
                .map(|j| chunk.column(j).sum() / rows)
                .collect();
            let ced = if with_ced {
                Some(ffm::baselines::ced_metafeatures(&chunk)?.values)
            } else {
                None
            };
            Ok((signature, mean, ced))
        })
        .collect::<Result<_>>()?;

    let k = per_chunk.len();
    let d = config.n_features;
    let mut signatures = Vec::with_capacity(k);
    let mut means = Array2::zeros((k, d));
    let mut ced = with_ced.then(|| Array2::zeros((k, 10)));
    for (i, (signature, mean, ced_row)) in per_chunk.into_iter().enumerate() {
        signatures.push(signature);
        for (j, v) in mean.into_iter().enumerate() {
            means[[i, j]] = v;
        }
        if let (Some(m), Some(row)) = (ced.as_mut(), ced_row) {
            for (j, &v) in row.iter().enumerate() {
                m[[i, j]] = v;
            }
        }
    }
    Ok(ChunkSummaries {
        signatures,
        means,
        ced,
        ground_truth: sampler.ground_truth(),
    })
}

fn cluster_and_score(
    r: &Array2<f64>,
    truth: &[usize],
    concepts: usize,
    seed: u64,
) -> Result<ExternalScores<f64>> {
    let normalized = normalize_minmax(r);
    let result = kmeans(&normalized, concepts, seed, KMEANS_REPLICATIONS, 300)?;
    external_clustering_scores(truth, &result.labels)
}

fn evaluate_stream(
    config: StreamConfig,
    config_label: &str,
    replica: usize,
    n: usize,
    with_ced: bool,
    out: &mut Vec<StreamScore>,
) -> Result<()> {
    let summaries = summarize_stream(config, with_ced)?;
    let truth = &summaries.ground_truth;
    let concepts = config.n_drifts + 1;

    let meta = metadescribe_signatures(&summaries.signatures, n, config.n_features)?;
    let mut push = |method: &'static str, scores: ExternalScores<f64>| {
        out.push(StreamScore {
            config_label: config_label.to_string(),
            replica,
            seed: config.seed,
            method,
            scores,
        })
    };
    push(
        "ffm",
        cluster_and_score(&meta.r, truth, concepts, config.seed)?,
    );
    let pca_r = crate::commands::pca_from_means(&summaries.means)?;
    push(
        "pca",
        cluster_and_score(&pca_r, truth, concepts, config.seed)?,
    );
    if let Some(ced_r) = &summaries.ced {
        push(
            "ced",
            cluster_and_score(ced_r, truth, concepts, config.seed)?,
        );
    }
    Ok(())
}

fn write_scores_csv(scores: &[StreamScore], path: &Path) -> Result<()> {
    let mut text =
        String::from("config,replica,seed,method,nmi,adjusted_rand,completeness,homogeneity\n");
    for s in scores {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.config_label,
            s.replica,
            s.seed,
            s.method,
            s.scores.nmi,
            s.scores.adjusted_rand,
            s.scores.completeness,
            s.scores.homogeneity
        ));
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn write_aggregate_csv(scores: &[StreamScore], path: &Path) -> Result<()> {
    let mut groups: BTreeMap<(String, &'static str), Vec<&StreamScore>> = BTreeMap::new();
    for s in scores {
        groups
            .entry((s.config_label.clone(), s.method))
            .or_default()
            .push(s);
    }
    let mut text = String::from(
        "config,method,replicas,nmi_mean,nmi_std,ari_mean,ari_std,\
         completeness_mean,completeness_std,homogeneity_mean,homogeneity_std\n",
    );
    for ((label, method), group) in &groups {
        let col = |f: fn(&ExternalScores<f64>) -> f64| -> (f64, f64) {
            let values: Vec<f64> = group.iter().map(|s| f(&s.scores)).collect();
            mean_std(&values)
        };
        let (nm, ns) = col(|s| s.nmi);
        let (am, as_) = col(|s| s.adjusted_rand);
        let (cm, cs) = col(|s| s.completeness);
        let (hm, hs) = col(|s| s.homogeneity);
        text.push_str(&format!(
            "{label},{method},{},{nm},{ns},{am},{as_},{cm},{cs},{hm},{hs}\n",
            group.len()
        ));
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Paired t-tests on per-replica NMI for every method pair within each
/// configuration, mirroring the aggregate table's layout.
fn write_ttests_csv(scores: &[StreamScore], path: &Path) -> Result<()> {
    let mut groups: BTreeMap<(String, &'static str), Vec<f64>> = BTreeMap::new();
    for s in scores {
        groups
            .entry((s.config_label.clone(), s.method))
            .or_default()
            .push(s.scores.nmi);
    }
    let mut labels: Vec<String> = groups.keys().map(|(l, _)| l.clone()).collect();
    labels.dedup();
    let mut text = String::from("config,method_a,method_b,t,p,significant\n");
    for label in labels {
        let methods: Vec<&'static str> = groups
            .keys()
            .filter(|(l, _)| *l == label)
            .map(|(_, m)| *m)
            .collect();
        for (i, &a) in methods.iter().enumerate() {
            for &b in &methods[i + 1..] {
                let va = &groups[&(label.clone(), a)];
                let vb = &groups[&(label.clone(), b)];
                if va.len() != vb.len() || va.len() < 2 {
                    continue;
                }
                let r = paired_t_test(va, vb, ALPHA)?;
                text.push_str(&format!(
                    "{label},{a},{b},{},{},{}\n",
                    r.t, r.p, r.significant
                ));
            }
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn apply_overrides(config: &mut StreamConfig, args: &BenchmarkArgs) {
    if let Some(v) = args.chunks {
        config.n_chunks = v;
    }
    if let Some(v) = args.chunk_size {
        config.chunk_size = v;
    }
    if let Some(v) = args.features {
        config.n_features = v;
    }
}

fn overrides_map(args: &BenchmarkArgs) -> BTreeMap<String, usize> {
    let mut map = BTreeMap::new();
    if let Some(v) = args.chunks {
        map.insert("chunks".into(), v);
    }
    if let Some(v) = args.chunk_size {
        map.insert("chunk_size".into(), v);
    }
    if let Some(v) = args.features {
        map.insert("features".into(), v);
    }
    map
}

/// Experiment 1: retained-component count x chunk size x drift count, sudden
/// drifts on wide streams.
fn experiment_1(args: &BenchmarkArgs, replicas: usize, out_dir: &Path) -> Result<Manifest> {
    let mut scores = Vec::new();
    let mut runs = Vec::new();
    let mut config_index = 0u64;
    for &n in &[1usize, 2, 4, 8, 16] {
        for &chunk_size in &[50usize, 100, 200] {
            for &drifts in &[1usize, 3, 5, 7, 9] {
                let mut base = StreamConfig {
                    n_chunks: 500,
                    chunk_size,
                    n_features: 500,
                    n_drifts: drifts,
                    drift_type: DriftType::Sudden,
                    recurring: false,
                    seed: 0,
                };
                apply_overrides(&mut base, args);
                let with_ced = args.force_ced || base.n_features < 100;
                let label = format!("n{n}_cs{chunk_size}_d{drifts}");
                for replica in 0..replicas {
                    let mut config = base;
                    config.seed = derive_seed(
                        args.seed,
                        tag::STREAM,
                        config_index * 10_000 + replica as u64,
                    );
                    evaluate_stream(config, &label, replica, n, with_ced, &mut scores)?;
                    runs.push(ManifestRun {
                        config_label: label.clone(),
                        stream: config,
                        replica,
                        methods: if with_ced {
                            vec!["ffm".into(), "pca".into(), "ced".into()]
                        } else {
                            vec!["ffm".into(), "pca".into()]
                        },
                        skipped_methods: if with_ced {
                            vec![]
                        } else {
                            vec!["ced (quadratic in feature count; pass --force-ced)".into()]
                        },
                    });
                }
                config_index += 1;
            }
        }
    }
    write_scores_csv(&scores, &out_dir.join("streams.csv"))?;
    write_aggregate_csv(&scores, &out_dir.join("aggregate.csv"))?;
    write_ttests_csv(&scores, &out_dir.join("ttests.csv"))?;
    Ok(Manifest {
        experiment: 1,
        base_seed: args.seed,
        replicas,
        kmeans_replications: KMEANS_REPLICATIONS,
        alpha: ALPHA,
        scale_overrides: overrides_map(args),
        runs,
    })
}

/// Experiment 2: all three drift types on a fixed stream shape, FFM against
/// both baselines.
fn experiment_2(args: &BenchmarkArgs, replicas: usize, out_dir: &Path) -> Result<Manifest> {
    let mut scores = Vec::new();
    let mut runs = Vec::new();
    for (config_index, &drift_type) in [DriftType::Sudden, DriftType::Gradual, DriftType::Incremental]
        .iter()
        .enumerate()
    {
        let mut base = StreamConfig {
            n_chunks: 1000,
            chunk_size: 256,
            n_features: 64,
            n_drifts: 3,
            drift_type,
            recurring: false,
            seed: 0,
        };
        apply_overrides(&mut base, args);
        let label = format!("{drift_type:?}").to_lowercase();
        for replica in 0..replicas {
            let mut config = base;
            config.seed = derive_seed(
                args.seed,
                tag::STREAM,
                config_index as u64 * 10_000 + replica as u64,
            );
            evaluate_stream(config, &label, replica, 8, true, &mut scores)?;
            runs.push(ManifestRun {
                config_label: label.clone(),
                stream: config,
                replica,
                methods: vec!["ffm".into(), "pca".into(), "ced".into()],
                skipped_methods: vec![],
            });
        }
    }
    write_scores_csv(&scores, &out_dir.join("streams.csv"))?;
    write_aggregate_csv(&scores, &out_dir.join("aggregate.csv"))?;
    write_ttests_csv(&scores, &out_dir.join("ttests.csv"))?;
    Ok(Manifest {
        experiment: 2,
        base_seed: args.seed,
        replicas,
        kmeans_replications: KMEANS_REPLICATIONS,
        alpha: ALPHA,
        scale_overrides: overrides_map(args),
        runs,
    })
}

#[derive(Serialize)]
struct IdentifyRow {
    concepts: usize,
    replica: usize,
    seed: u64,
    best_c: usize,
    correct: bool,
    scores: BTreeMap<usize, f64>,
}

/// Experiment 3: silhouette-based concept-count identification on large
/// chunks.
fn experiment_3(args: &BenchmarkArgs, replicas: usize, out_dir: &Path) -> Result<Manifest> {
    let mut rows: Vec<IdentifyRow> = Vec::new();
    let mut runs = Vec::new();
    for (config_index, &concepts) in [2usize, 4, 6].iter().enumerate() {
        let mut base = StreamConfig {
            n_chunks: 500,
            chunk_size: 400,
            n_features: 500,
            n_drifts: concepts - 1,
            drift_type: DriftType::Sudden,
            recurring: false,
            seed: 0,
        };
        apply_overrides(&mut base, args);
        for replica in 0..replicas {
            let mut config = base;
            config.seed = derive_seed(
                args.seed,
                tag::STREAM,
                config_index as u64 * 10_000 + replica as u64,
            );
            let summaries = summarize_stream(config, false)?;
            let meta = metadescribe_signatures(&summaries.signatures, 16, config.n_features)?;
            let report =
                identify_concept_count(&meta.r, 2, 11, config.seed, KMEANS_REPLICATIONS)?;
            rows.push(IdentifyRow {
                concepts,
                replica,
                seed: config.seed,
                best_c: report.best_c,
                correct: report.best_c == concepts,
                scores: report.scores,
            });
            runs.push(ManifestRun {
                config_label: format!("c{concepts}"),
                stream: config,
                replica,
                methods: vec!["ffm".into()],
                skipped_methods: vec![],
            });
        }
    }
    let mut text = String::from("concepts,replica,seed,best_c,correct\n");
    for row in &rows {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            row.concepts, row.replica, row.seed, row.best_c, row.correct
        ));
    }
    std::fs::write(out_dir.join("identified.csv"), text)?;
    let mut report = serde_json::to_string_pretty(&rows)?;
    report.push('\n');
    std::fs::write(out_dir.join("identified.json"), report)?;
    Ok(Manifest {
        experiment: 3,
        base_seed: args.seed,
        replicas,
        kmeans_replications: KMEANS_REPLICATIONS,
        alpha: ALPHA,
        scale_overrides: overrides_map(args),
        runs,
    })
}

pub fn run(args: BenchmarkArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out_dir)?;
    let replicas = args
        .replicas
        .unwrap_or(if args.experiment == 1 { 3 } else { 10 });
    if replicas == 0 {
        return Err(Error::Config("replicas must be positive".into()));
    }
    let manifest = match args.experiment {
        1 => experiment_1(&args, replicas, &args.out_dir)?,
        2 => experiment_2(&args, replicas, &args.out_dir)?,
        3 => experiment_3(&args, replicas, &args.out_dir)?,
        other => {
            return Err(Error::Config(format!(
                "experiment must be 1, 2 or 3, got {other}"
            )))
        }
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(args.out_dir.join("manifest.json"), text)?;
    Ok(())
}
