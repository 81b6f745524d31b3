use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qbe_sim::output::INTERPRETATION;
use qbe_sim::{resolve_workers, run_sweep, RunConfig};

#[derive(Parser)]
#[command(name = "qbe-sim", version, about = "Temperature sweeps of the separated quantum Boltzmann solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every T0 in the config and write profiles, reports and the sweep summary.
    Run {
        config: PathBuf,
        /// Overrides `output.directory`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads (also QBE_SIM_WORKERS).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Check a config and print it with every default filled in.
    Validate { config: PathBuf },
}

const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match RunConfig::load(&config) {
            Ok(cfg) => {
                print!("{}", cfg.resolved_toml());
                println!();
                println!("# interpretation");
                for line in INTERPRETATION {
                    println!("#   {line}");
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::Run { config, output, workers } => {
            let cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let workers = match resolve_workers(workers) {
                Ok(w) => w,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let dir = output.unwrap_or_else(|| cfg.output.directory.clone());
            let sweep = match run_sweep(&cfg, &dir, workers) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(3);
                }
            };
            for r in &sweep.summary.runs {
                match &r.error {
                    Some(e) => eprintln!("T0 = {} K: solver failed: {e}", r.t0_kelvin),
                    None => println!(
                        "T0 = {} K: {}{}",
                        r.t0_kelvin,
                        if r.converged { "converged" } else { "NOT converged" },
                        if r.flagged { " (flagged, see report)" } else { "" }
                    ),
                }
            }
            for c in sweep.summary.checks.iter().filter(|c| c.enabled) {
                let verdict = match c.passed {
                    Some(true) => "pass",
                    Some(false) => "FAIL",
                    None => "n/a",
                };
                println!("check {}: {verdict} ({})", c.name, c.detail);
            }
            if let Some(s) = sweep.summary.heat_current_signed_increasing_in_t0 {
                println!("info: signed j_q increasing in T0: {s}");
            }
            println!("outputs in {}", dir.display());
            ExitCode::from(sweep.exit_code() as u8)
        }
    }
}
