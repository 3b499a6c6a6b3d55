use std::path::PathBuf;

use anyhow::{bail, Context};
use apmc_sim::scenario::NoiseSpeedName;
use apmc_sim::{builtins, compute_error, resolve_scenario, run_scenario, write_run, Field, Norm, RunOptions, SchemeName};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "apmc", version, about = "Asymptotic-preserving Monte Carlo for kinetic transport")]
struct Cli {
    /// Print the names of the built-in scenarios and exit.
    #[arg(long)]
    list_builtins: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or built-in and write CSV snapshots plus report.json.
    Run {
        /// Path to a scenario JSON file, or the name of a built-in.
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        particles: Option<u64>,
        #[arg(long)]
        replicates: Option<u32>,
        /// standard_mc, apmc, apmc_micromacro, heat_walk, kinetic_ref, diffusion_ref, steady_ref
        #[arg(long)]
        scheme: Option<String>,
        /// unscaled or scaled
        #[arg(long)]
        noise_speed: Option<String>,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory (default: out/<scenario name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in scenario as JSON.
    Show { name: String },
    /// Discrete error between two profile CSV files.
    Error {
        run: PathBuf,
        reference: PathBuf,
        /// l1 or linf
        #[arg(long, default_value = "l1")]
        norm: String,
        /// rho or j
        #[arg(long, default_value = "rho")]
        field: String,
    },
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    if cli.list_builtins {
        for name in builtins::NAMES {
            println!("{name}");
        }
        return Ok(());
    }
    match cli.command {
        None => bail!("no command given; see --help"),
        Some(Command::Show { name }) => {
            let s = builtins::builtin(&name).with_context(|| format!("no built-in named `{name}`"))?;
            println!("{}", s.to_json());
        }
        Some(Command::Error { run, reference, norm, field }) => {
            let norm = Norm::parse(&norm).with_context(|| format!("unknown norm `{norm}`"))?;
            let field = Field::parse(&field).with_context(|| format!("unknown field `{field}`"))?;
            println!("{:.12e}", compute_error(&run, &reference, norm, field)?);
        }
        Some(Command::Run { scenario, seed, particles, replicates, scheme, noise_speed, workers, out }) => {
            let mut s = resolve_scenario(&scenario)?;
            if let Some(v) = seed {
                s.seed = v;
            }
            if let Some(v) = particles {
                s.particles = v;
            }
            if let Some(v) = replicates {
                s.replicates = v;
            }
            if let Some(name) = scheme {
                s.scheme = SchemeName::parse(&name).with_context(|| format!("unknown scheme `{name}`"))?;
            }
            if let Some(n) = noise_speed {
                s.noise_speed = match n.as_str() {
                    "unscaled" => NoiseSpeedName::Unscaled,
                    "scaled" => NoiseSpeedName::Scaled,
                    _ => bail!("unknown noise speed `{n}`"),
                };
            }
            let out = out.unwrap_or_else(|| PathBuf::from("out").join(&s.name));
            let run = run_scenario(&s, &RunOptions { workers })?;
            write_run(&out, &run)?;
            for snap in &run.report.snapshots {
                let e = |f: &Option<apmc_sim::report::FieldErrors>| f.as_ref().map_or("-".into(), |e| format!("{:.4e}", e.l1));
                println!("t = {:<10} rho L1 = {:<12} j L1 = {}", snap.time, e(&snap.rho), e(&snap.j));
            }
            println!("wrote {} ({:.1} s)", out.display(), run.report.runtime_seconds);
        }
    }
    Ok(())
}
