//! Command-line front end: run validated experiment configs, check them
//! without running, and list the available experiment kinds.
//!
//! Exit codes: 0 on success, 1 for any validation or I/O problem, 2 when
//! a runtime invariant fails inside a replica (a detected simulation bug,
//! never a statistical fluctuation).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinlab_core::experiment::{
    emit_csv, run_experiment_with_jobs, write_outputs, ExperimentConfig, ExperimentKind,
};
use spinlab_core::Error;

#[derive(Parser)]
#[command(name = "spinlab", version, about = "Spin-system simulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config; write CSV and JSON-lines results.
    Run {
        /// Path to a JSON experiment config.
        config: PathBuf,
        /// Output base path (overrides the config's `output` field);
        /// `.csv` and `.jsonl` are appended. Without either, the CSV goes
        /// to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace the config's replica count.
        #[arg(long, value_name = "K")]
        replicas_override: Option<u64>,
        /// Replace the config's base seed.
        #[arg(long, value_name = "S")]
        seed_override: Option<u64>,
        /// Worker thread count; defaults to the available hardware.
        /// Affects scheduling only, never results.
        #[arg(long, value_name = "J")]
        jobs: Option<usize>,
    },
    /// Parse and validate a config without running it.
    Validate {
        /// Path to a JSON experiment config.
        config: PathBuf,
    },
    /// List the experiment kinds a config may name.
    ListExperiments,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems are validation errors (exit 1); --help and
            // --version are successes. Clap's own exit() would use 2,
            // which is reserved for invariant failures.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvariantViolation(_) => 2,
        _ => 1,
    }
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig, Error> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            config,
            out,
            replicas_override,
            seed_override,
            jobs,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(replicas) = replicas_override {
                cfg.replicas = replicas;
            }
            if let Some(seed) = seed_override {
                cfg.seed = seed;
            }
            cfg.validate()?;
            let records = run_experiment_with_jobs(&cfg, jobs)?;
            eprintln!(
                "{}: {} replicas on {} in {:.2}s",
                cfg.experiment,
                cfg.replicas,
                cfg.graph,
                records.iter().map(|r| r.wall_clock_seconds).sum::<f64>()
            );
            let base = out.or_else(|| cfg.output.as_deref().map(PathBuf::from));
            match base {
                Some(base) => {
                    let (csv_path, jsonl_path) = write_outputs(&records, &base)?;
                    println!("wrote {}", csv_path.display());
                    println!("wrote {}", jsonl_path.display());
                }
                None => print!("{}", emit_csv(&records)?),
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            cfg.validate()?;
            println!(
                "ok: {} on {} ({} replicas, {} probes, seed {})",
                cfg.experiment,
                cfg.graph,
                cfg.replicas,
                cfg.probes.len(),
                cfg.seed
            );
            Ok(())
        }
        Command::ListExperiments => {
            for kind in ExperimentKind::ALL {
                println!("{:<22} {}", kind.name(), kind.description());
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_failures_map_to_exit_two_and_the_rest_to_one() {
        assert_eq!(
            exit_code_for(&Error::InvariantViolation("breach".to_string())),
            2
        );
        assert_eq!(exit_code_for(&Error::invalid("p", "out of range")), 1);
        let io = Error::Io(std::io::Error::other("disk"));
        assert_eq!(exit_code_for(&io), 1);
        let parse = serde_json::from_str::<ExperimentConfig>("{")
            .map_err(Error::from)
            .unwrap_err();
        assert_eq!(exit_code_for(&parse), 1);
    }
}
