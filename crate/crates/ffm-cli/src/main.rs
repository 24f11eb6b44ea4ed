//! `ffm` command-line front end: stream generation, metadescription,
//! clustering, concept-count identification, visualization, and the
//! benchmark experiment driver.

mod benchmark;
mod commands;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "ffm",
    version,
    about = "Frequency-domain metadescription of chunked data streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic drifting stream as raw f32 plus a JSON sidecar.
    Generate(commands::GenerateArgs),
    /// Compute a metadescription of an ingested stream.
    Describe(commands::DescribeArgs),
    /// Cluster a metadescription into concepts.
    Cluster(commands::ClusterArgs),
    /// Search for the concept count by silhouette score.
    Identify(commands::IdentifyArgs),
    /// Render selected chunks of a metadescription as a PGM image strip.
    Visualize(commands::VisualizeArgs),
    /// Run one of the benchmark experiments end to end.
    Benchmark(benchmark::BenchmarkArgs),
}

/// Applies the FFM_THREADS cap (0 or unset = automatic) to the global worker
/// pool before any parallel work runs.
fn init_threads() -> ffm::Result<()> {
    match std::env::var("FFM_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .map_err(|_| ffm::Error::Config(format!("FFM_THREADS must be an integer, got {raw:?}")))?;
            if n == 0 {
                return Ok(());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| ffm::Error::Config(format!("thread pool: {e}")))
        }
    }
}

fn run() -> ffm::Result<()> {
    init_threads()?;
    match Cli::parse().command {
        Command::Generate(args) => commands::generate(args),
        Command::Describe(args) => commands::describe(args),
        Command::Cluster(args) => commands::cluster(args),
        Command::Identify(args) => commands::identify(args),
        Command::Visualize(args) => commands::visualize(args),
        Command::Benchmark(args) => benchmark::run(args),
    }
}

fn main() {
    if let Err(e) = run() {
        // single-line, machine-parsable diagnostic
        let msg = e.to_string().replace('\n', " ");
        eprintln!("error: {msg}");
        std::process::exit(1);
    }
}
