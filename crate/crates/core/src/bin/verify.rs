use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hausdorff_mixed::bank::{bank_to_toml, builtin_bank, default_bank, load_bank};
use hausdorff_mixed::geometry::{Quadrature, Window};
use hausdorff_mixed::oracle::{oracle_case, oracle_cases, run_oracle};
use hausdorff_mixed::theorems::{parse_theorem_list, TheoremId};
use hausdorff_mixed::verify::{run_suite, sharpness_search, BankSource, SuiteConfig, EXIT_CONFIG, EXIT_DIVERGENT};
use hausdorff_mixed::Error;

#[derive(Parser)]
#[command(name = "verify", about = "Check Hausdorff-operator inequalities on banks of test functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the checks and write JSON/CSV reports.
    Run {
        /// Comma-separated theorem ids, or `all`.
        #[arg(long, default_value = "all")]
        theorems: String,
        /// `builtin` or a path to a TOML case bank.
        #[arg(long, default_value = "builtin")]
        bank: String,
        /// Keep only cases in this dimension.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 64)]
        radial_panels: usize,
        #[arg(long, default_value_t = 32)]
        angular_nodes: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        threads: Option<usize>,
        /// Skip the half-resolution error estimate.
        #[arg(long)]
        no_err_est: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Coordinate ascent of the ratio over the first field's radial parameters.
    Sharpness {
        #[arg(long)]
        theorem: TheoremId,
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// Seed case id (default: the first built-in case).
        #[arg(long)]
        case: Option<String>,
    },
    /// Compare polar and Cartesian evaluation of H_Φ f on ℝ².
    Oracle {
        /// Case id, or `all`.
        #[arg(long, default_value = "all")]
        case: String,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Write the built-in bank as TOML.
    Bank {
        #[arg(long, default_value = "all")]
        theorems: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn config_error(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_CONFIG as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run {
            theorems,
            bank,
            n,
            radial_panels,
            angular_nodes,
            tol,
            threads,
            no_err_est,
            out,
            csv,
        } => {
            let theorems = match parse_theorem_list(&theorems) {
                Ok(t) => t,
                Err(e) => return config_error(e),
            };
            let bank = if bank == "builtin" {
                BankSource::Builtin
            } else {
                let path = PathBuf::from(bank);
                if !path.is_file() {
                    return config_error(Error::InvalidInput(format!("bank file {} not found", path.display())));
                }
                BankSource::Toml(path)
            };
            let cfg = SuiteConfig {
                theorems,
                bank,
                dim: n,
                radial_panels,
                angular_nodes,
                tol,
                threads,
                error_estimate: !no_err_est,
                json_out: out,
                csv_out: csv,
            };
            let report = match run_suite(&cfg) {
                Ok(r) => r,
                Err(e) if matches!(e, Error::Io(_)) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
                Err(e) => return config_error(e),
            };
            for c in &report.cases {
                println!(
                    "{:<5} {:<28} ratio={:.6e} {}{}",
                    c.theorem.as_str(),
                    c.case,
                    c.ratio,
                    if c.pass { "PASS" } else { "FAIL" },
                    if c.anomaly { " anomaly" } else { "" }
                );
            }
            for e in &report.errors {
                println!("{:<5} {:<28} ERROR {}", e.theorem.as_str(), e.case, e.error);
            }
            let s = &report.suite;
            println!(
                "{} checks: {} passed, {} failed, {} errors ({} divergent), {} anomalies",
                s.checks, s.passed, s.failed, s.errors, s.divergent, s.anomalies
            );
            ExitCode::from(report.exit_code() as u8)
        }
        Cmd::Sharpness { theorem, budget, case } => {
            let bank = default_bank(theorem);
            let seed = match case {
                Some(id) => bank.into_iter().find(|c| c.id == id),
                None => bank.into_iter().next(),
            };
            let Some(seed) = seed else {
                return config_error(Error::InvalidInput("no such seed case".into()));
            };
            match sharpness_search(&seed, budget, &Quadrature::default()) {
                Ok(s) => {
                    println!("seed {} ratio {:.9e}", seed.id, s.seed_ratio);
                    println!("best ratio {:.9e} after {} evaluations", s.best_ratio, s.evaluations);
                    println!("{}", serde_json::to_string_pretty(&s.best_case.fields[0]).unwrap_or_default());
                    ExitCode::SUCCESS
                }
                Err(e) if e.is_divergence() => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_DIVERGENT as u8)
                }
                Err(e) => config_error(e),
            }
        }
        Cmd::Oracle { case, points, seed } => {
            let cases = if case == "all" {
                oracle_cases()
            } else {
                match oracle_case(&case) {
                    Ok(c) => vec![c],
                    Err(e) => return config_error(e),
                }
            };
            let q = match Quadrature::new(Window::default(), 64, 32) {
                Ok(q) => q,
                Err(e) => return config_error(e),
            };
            let mut worst: f64 = 0.0;
            for c in &cases {
                match run_oracle(c, points, seed, &q) {
                    Ok(rep) => {
                        println!("{} max relative difference {:.3e}", rep.case, rep.max_err);
                        worst = worst.max(rep.max_err);
                    }
                    Err(e) => return config_error(e),
                }
            }
            if worst < 1e-6 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Cmd::Bank { theorems, out } => {
            let theorems = match parse_theorem_list(&theorems) {
                Ok(t) => t,
                Err(e) => return config_error(e),
            };
            let text = match bank_to_toml(&builtin_bank(&theorems)) {
                Ok(t) => t,
                Err(e) => return config_error(e),
            };
            match out {
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, text) {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                    // Round-trip so a broken file is reported immediately.
                    if let Err(e) = load_bank(&p) {
                        return config_error(e);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
    }
}
