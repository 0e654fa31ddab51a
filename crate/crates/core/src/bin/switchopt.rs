use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use switchopt::harness::{cmd_certify, cmd_generate, cmd_run, exit, exit_code};
use switchopt::solvers::Method;

#[derive(Parser)]
#[command(name = "switchopt", version, about = "Switching gradient methods for constrained convex problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random quadratic instance with its reference solution.
    Generate {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment config. SWITCHOPT_SEED overrides the instance seed.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Certify the averaged point of a stored trace.
    Certify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(long)]
        epsilon: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG as u8 } else { 0 });
        }
    };

    let outcome = match cli.command {
        Command::Generate { dim, seed, out } => cmd_generate(dim, seed, &out).map(|_| {
            println!("wrote {}", out.display());
            exit::OK
        }),
        Command::Run { config, out, jobs } => cmd_run(&config, &out, jobs).map(|report| {
            let _ = report.print_summary(std::io::stdout().lock());
            exit::OK
        }),
        Command::Certify {
            instance,
            trace,
            method,
            epsilon,
        } => cmd_certify(&instance, &trace, method, epsilon).map(|cert| {
            println!(
                "{}",
                serde_json::to_string_pretty(&cert).expect("certificates always serialize")
            );
            if cert.passed {
                exit::OK
            } else {
                eprintln!("not an epsilon-solution");
                exit::CERTIFICATION
            }
        }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
