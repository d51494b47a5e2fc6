use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nrep::experiment::{self, ExperimentConfig, ProjectionMode};
use nrep::ChannelKind;

#[derive(Parser)]
#[command(name = "nrep", version, about = "Noisy RDM sweeps with N-representability projections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a TOML config; flags override config fields.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Shots per measurement group; 0 gives exact expectations.
    #[arg(long)]
    shots: Option<u32>,
    #[arg(long)]
    repetitions: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Decoherence rate; repeat the flag for several rates.
    #[arg(long)]
    rate: Vec<f64>,
    /// Repeat the flag for several channels.
    #[arg(long, value_parser = parse_channel)]
    channel: Vec<ChannelKind>,
    #[arg(long, value_parser = parse_mode)]
    projection: Option<ProjectionMode>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    s.parse().map_err(|e: nrep::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<ProjectionMode, String> {
    s.parse().map_err(|e: nrep::Error| e.to_string())
}

fn run(args: RunArgs) -> nrep::Result<()> {
    let mut cfg = ExperimentConfig::read(&args.config)?;
    if let Some(s) = args.shots {
        cfg.shots = s;
    }
    if let Some(r) = args.repetitions {
        cfg.repetitions = r;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if !args.rate.is_empty() {
        cfg.rates = args.rate;
    }
    if !args.channel.is_empty() {
        cfg.channels = args.channel;
    }
    if let Some(p) = args.projection {
        cfg.projection = p;
    }
    if let Some(a) = args.alpha {
        cfg.projection_config.alpha = a;
    }
    if let Some(m) = args.max_iters {
        cfg.projection_config.max_iterations = m;
    }
    if let Some(o) = args.out {
        cfg.output = o;
    }

    let records = experiment::run(&cfg)?;
    let summary = experiment::summarize(&records);
    experiment::emit(&records, &summary, &cfg, &cfg.output)?;

    println!(
        "{:<10} {:<12} {:>8} {:>12} {:>12} {:>12} {:>5}",
        "geometry", "channel", "rate", "raw err", "best err", "mode err", "best"
    );
    for s in &summary {
        let best = [("D", s.best_d), ("Q", s.best_q), ("G", s.best_g)]
            .iter()
            .filter(|(_, c)| *c > 0)
            .map(|(k, c)| format!("{k}{c}"))
            .collect::<Vec<_>>()
            .join(" ");
        println!(
            "{:<10} {:<12} {:>8.1e} {:>12.3e} {:>12.3e} {:>12.3e} {:>5}",
            s.geometry, s.channel, s.rate, s.raw_mean_error, s.best_mean_error, s.mode_mean_error, best
        );
    }
    log::info!("wrote {} records to {}", records.len(), cfg.output.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
