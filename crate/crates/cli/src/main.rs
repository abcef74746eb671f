use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spc_cli::{
    check_corpus, corpus_dir, exit_code, read_matrix, result_json, result_text, run_file, EXIT_DIAGNOSTICS,
    EXIT_ENGINE,
};
use spc_core::engine::RunOptions;
use spc_core::logic::DEFAULT_CAP;
use spc_core::measure::factorize_demo;
use spc_core::result::Backend;
use spc_core::scalar::parse_rational;

#[derive(Parser)]
#[command(name = "spc", version, about = "Count weighted models of semiring programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program's count query.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "auto")]
        backend: Backend,
        /// Monte Carlo samples.
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        /// Largest enumeration space to accept.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Check every bundled example against its expected value.
    CorpusCheck {
        #[arg(long)]
        json: bool,
        /// Corpus directory (default: $SPC_CORPUS_DIR or the bundled one).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Factorize a CSV matrix into rank-k factors by gradient descent.
    Factorize {
        csv: PathBuf,
        #[arg(long, short, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 5000)]
        steps: usize,
        #[arg(long, default_value = "1/100")]
        rate: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { file, backend, samples, seed, json, cap } => {
            let opts = RunOptions { backend, samples, seed, cap };
            match run_file(&file, &opts) {
                Ok((_, r)) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&result_json(&file.display().to_string(), &r)).unwrap());
                    } else {
                        print!("{}", result_text(&r));
                    }
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code(&e)
                }
            }
        }
        Command::CorpusCheck { json, dir } => {
            let dir = dir.unwrap_or_else(corpus_dir);
            match check_corpus(&dir) {
                Ok(reports) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&reports).unwrap());
                    } else {
                        for r in &reports {
                            let status = if r.passed { "ok  " } else { "FAIL" };
                            print!("{status} {}: expected {}, got {}", r.file, r.expected, r.actual);
                            match &r.message {
                                Some(m) => println!(" ({m})"),
                                None => println!(),
                            }
                        }
                        let failed = reports.iter().filter(|r| !r.passed).count();
                        println!("{} cases, {failed} failed", reports.len());
                    }
                    i32::from(reports.iter().any(|r| !r.passed))
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_DIAGNOSTICS
                }
            }
        }
        Command::Factorize { csv, k, steps, rate, seed, json } => {
            let Some(rate) = parse_rational(&rate) else {
                eprintln!("error: --rate `{rate}` is not a number");
                return ExitCode::from(EXIT_DIAGNOSTICS as u8);
            };
            match read_matrix(&csv) {
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_DIAGNOSTICS
                }
                Ok(m) => match factorize_demo(&m, k, steps, &rate, seed) {
                    Ok(f) => {
                        let r = f.to_result();
                        if json {
                            println!("{}", serde_json::to_string_pretty(&result_json(&csv.display().to_string(), &r)).unwrap());
                        } else {
                            print!("{}", result_text(&r));
                        }
                        0
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        EXIT_ENGINE
                    }
                },
            }
        }
    };
    ExitCode::from(code as u8)
}
