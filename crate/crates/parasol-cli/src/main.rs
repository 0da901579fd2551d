//! `parasol` — command-line workbench for scalable asynchronous Bayesian
//! optimization.
//!
//! The CLI is a client of the HTTP service: `run` and
//! `bench-proposal-cost` talk to a server given via `--server`, or spin up
//! an in-process one on an ephemeral port when none is given. `serve` runs
//! the service in the foreground.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use parasol_api::{BenchRequest, ExperimentRequest};
use parasol_client::Client;
use parasol_core::experiment::load_config;
use parasol_server::EmbeddedServer;

#[derive(Parser)]
#[command(
    name = "parasol",
    version,
    about = "Scalable asynchronous Bayesian optimization: samplers, simulator, and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service in the foreground until interrupted.
    Serve(ServeArgs),
    /// Run a batch experiment from a config file and write CSV outputs.
    Run(RunArgs),
    /// Measure proposal wall-clock cost against observation-history size.
    BenchProposalCost(BenchArgs),
}

#[derive(Args)]
struct ServeArgs {
    /// Address to bind, e.g. 127.0.0.1:7711.
    #[arg(long, default_value = "127.0.0.1:7711")]
    addr: String,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file (TOML; see README for the keys).
    #[arg(long)]
    config: PathBuf,
    /// Objective override: hartmann18, hartmann6, or mlp-surrogate.
    #[arg(long)]
    objective: Option<String>,
    /// Sampler override: async-tpe, classic-tpe, parallel-ts, or random.
    #[arg(long)]
    sampler: Option<String>,
    /// Number of simulated parallel workers.
    #[arg(long)]
    workers: Option<usize>,
    /// Simulated time budget in seconds.
    #[arg(long)]
    budget: Option<f64>,
    /// Number of independent trials to aggregate.
    #[arg(long)]
    trials: Option<usize>,
    /// Good/bad split quantile for the TPE samplers.
    #[arg(long)]
    gamma: Option<f64>,
    /// Base seed; trial i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for trace_<i>.csv and the aggregate CSVs.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Charge measured proposal wall time to the simulated clock
    /// (makes traces non-reproducible).
    #[arg(long)]
    measure_overhead: bool,
    /// Base URL of a running server; default is an in-process server.
    #[arg(long)]
    server: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    /// Sampler to measure: async-tpe, classic-tpe, parallel-ts, or random.
    #[arg(long)]
    sampler: String,
    /// Largest history size; sizes double from 100 up to this value.
    #[arg(long, default_value_t = 1000)]
    max_n: usize,
    /// Objective supplying the search space and observation pool.
    #[arg(long, default_value = "hartmann18")]
    objective: String,
    /// Timed repetitions per size (the median is reported).
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Base URL of a running server; default is an in-process server.
    #[arg(long)]
    server: Option<String>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Serve(args) => serve(args),
        Command::Run(args) => run(args),
        Command::BenchProposalCost(args) => bench(args),
    }
}

/// Connect to `--server`, or start an in-process server whose lifetime is
/// tied to the returned guard.
fn connect(server: Option<String>) -> Result<(Client, Option<EmbeddedServer>)> {
    match server {
        Some(url) => {
            let client = Client::new(url.clone())?;
            client
                .health()
                .with_context(|| format!("no parasol server reachable at {url}"))?;
            Ok((client, None))
        }
        None => {
            let embedded = EmbeddedServer::start().context("failed to start in-process server")?;
            let client = Client::new(embedded.url())?;
            Ok((client, Some(embedded)))
        }
    }
}

fn serve(args: ServeArgs) -> Result<()> {
    tracing_subscriber::fmt().with_target(false).init();
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.addr)
            .await
            .with_context(|| format!("failed to bind {}", args.addr))?;
        println!("listening on http://{}", listener.local_addr()?);
        parasol_server::serve_with_shutdown(listener, async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .context("server error")
    })
}

fn run(args: RunArgs) -> Result<()> {
    let mut config = load_config(&args.config)
        .with_context(|| format!("failed to load config {}", args.config.display()))?;
    if let Some(objective) = args.objective {
        config.objective = objective;
    }
    if let Some(sampler) = args.sampler {
        config.sampler = sampler;
    }
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    if let Some(budget) = args.budget {
        config.budget = budget;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(gamma) = args.gamma {
        config.gamma = gamma;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.measure_overhead {
        config.measure_overhead = true;
    }
    let out_dir = args
        .out
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("results"));

    println!(
        "objective={} sampler={} workers={} budget={} trials={} gamma={} seed={} out={}",
        config.objective,
        config.sampler,
        config.workers,
        config.budget,
        config.trials,
        config.gamma,
        config.seed,
        out_dir.display()
    );

    let request = ExperimentRequest {
        objective: config.objective.clone(),
        sampler: config.sampler.clone(),
        workers: config.workers,
        budget: config.budget,
        trials: config.trials,
        gamma: config.gamma,
        seed: config.seed,
        measure_overhead: config.measure_overhead,
    };
    let (client, _server_guard) = connect(args.server)?;
    let response = client.run_experiment(&request)?;

    fs::create_dir_all(&out_dir)
        .with_context(|| format!("failed to create {}", out_dir.display()))?;
    for (i, trace_csv) in response.traces_csv.iter().enumerate() {
        fs::write(out_dir.join(format!("trace_{i}.csv")), trace_csv)?;
    }
    fs::write(
        out_dir.join("aggregate_evals.csv"),
        &response.aggregate_evals_csv,
    )?;
    fs::write(
        out_dir.join("aggregate_time.csv"),
        &response.aggregate_time_csv,
    )?;

    let finals = &response.final_best;
    if finals.is_empty() {
        println!("no trial completed an evaluation within the budget");
    } else {
        let n = finals.len() as f64;
        let mean = finals.iter().sum::<f64>() / n;
        let se = if finals.len() > 1 {
            (finals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
                / n.sqrt()
        } else {
            0.0
        };
        println!(
            "final best objective: mean {mean:.6}, standard error {se:.6} over {} trials",
            finals.len()
        );
    }
    println!(
        "wrote {} trace files and 2 aggregate files to {}",
        response.traces_csv.len(),
        out_dir.display()
    );
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let request = BenchRequest {
        sampler: args.sampler,
        objective: args.objective,
        max_n: args.max_n,
        reps: args.reps,
        seed: args.seed,
    };
    let (client, _server_guard) = connect(args.server)?;
    let response = client.run_bench(&request)?;
    println!("n_obs,seconds");
    for point in &response.points {
        println!("{},{}", point.n_obs, point.seconds);
    }
    eprintln!("log-log slope: {:.3}", response.log_log_slope);
    Ok(())
}
