use anyhow::Context;
use clap::Parser;
use experiments_cli::config::ExperimentConfig;
use experiments_cli::{run, Command};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "semiclass", version, about = "Semiclassical torus experiments")]
struct Cli {
    command: Command,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let text = std::fs::read_to_string(&cli.config).with_context(|| format!("reading {}", cli.config.display()))?;
    let cfg = ExperimentConfig::from_toml(&text)?;
    let report = run(cli.command, &cfg, cli.seed)?;
    report.write(&cli.out).with_context(|| format!("writing {}", cli.out.display()))?;
    println!("{} rows written to {}", report.rows.len(), cli.out.display());
    Ok(())
}
