use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use twincurve_cli::config::{self, BudgetOverrides};
use twincurve_cli::query::{self, LValueRequest};
use twincurve_cli::report::{self, ReportRequest};
use twincurve_cli::sweep::{self, Check, SweepParams};
use twincurve_cli::{advisor, verify, CliError, EXIT_OK};

#[derive(Parser)]
#[command(name = "twincurve", version, about = "Arithmetic of the twin-prime curves y^2 = x(x + e p D)(x + e q D)")]
struct Cli {
    /// Budget file (default: ./twincurve.toml if present).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Largest prime any enumeration may reach.
    #[arg(long, global = true)]
    max_prime: Option<u64>,
    /// Largest |disc| for imaginary class groups.
    #[arg(long, global = true)]
    max_disc_imag: Option<u64>,
    /// Largest disc for real class groups.
    #[arg(long, global = true)]
    max_disc_real: Option<u64>,
    /// Largest L-series truncation.
    #[arg(long, global = true)]
    max_terms: Option<u64>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, allow_hyphen_values = true)]
    epsilon: i64,
    #[arg(long)]
    p: u64,
    /// Defaults to p + 2.
    #[arg(long)]
    q: Option<u64>,
    #[arg(long = "D", alias = "d", default_value_t = 1, allow_hyphen_values = true)]
    d: i128,
}

impl SpecArgs {
    fn q(&self) -> u64 {
        self.q.unwrap_or(self.p + 2)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full arithmetic report for one curve.
    Report {
        #[command(flatten)]
        spec: SpecArgs,
        /// Add the norm-index breakdown over Q(sqrt(mu |D|)); repeatable.
        #[arg(long, allow_hyphen_values = true)]
        mu: Vec<i64>,
        /// Include L(E, 1).
        #[arg(long)]
        l_value: bool,
    },
    /// Table-versus-oracle sweep; writes CSV.
    Sweep {
        #[arg(long, default_value_t = 500)]
        p_max: u64,
        #[arg(long, default_value_t = 50)]
        d_max: u64,
        /// Largest prime for the anomalous check.
        #[arg(long, default_value_t = 1000)]
        l_max: u64,
        /// Comma-separated subset of counts, delta, rootnumbers, anomalous, partition.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        /// CSV destination (default: stdout, with the summary on stderr).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// L-value, derivative integral, or twisted value at s = 1.
    Lvalue {
        #[command(flatten)]
        spec: SpecArgs,
        /// Integral of order r (0, 1 or 2).
        #[arg(long)]
        derivative: Option<u32>,
        /// Twisted value over Q(sqrt(mu |D|)).
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<i64>,
        /// Truncation point (default: chosen from the decay rate).
        #[arg(long)]
        terms: Option<u64>,
    },
    /// Class group of a fundamental discriminant.
    Classgroup {
        #[arg(long, allow_hyphen_values = true)]
        disc: i128,
        /// Also report the S-class group for S = {2, p, p + 2, infinity}.
        #[arg(long)]
        p: Option<u64>,
        /// With --p, also bound the 2-Selmer rank of the twist by disc.
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<i64>,
    },
    /// Conditional rank conclusions from verified and asserted hypotheses.
    Advisor {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<i64>,
        /// Facts to assert, comma-separated or repeated.
        #[arg(long)]
        assume: Vec<String>,
    },
    /// Run the acceptance criteria.
    Verify {
        /// Criterion numbers 1-10; default all.
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<u8>,
    },
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce(&T) -> String) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    if json {
        serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Usage(e.to_string()))?;
        writeln!(out)?;
    } else {
        write!(out, "{}", text(value))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let flags = BudgetOverrides {
        prime_enumeration: cli.max_prime,
        class_group_imaginary: cli.max_disc_imag,
        class_group_real: cli.max_disc_real,
        series_truncation: cli.max_terms,
    };
    let budgets = config::resolve(cli.config.as_deref(), flags)?;
    let json = cli.json;
    match cli.command {
        Command::Report { spec, mu, l_value } => {
            let req = ReportRequest { epsilon: spec.epsilon, p: spec.p, q: spec.q(), d: spec.d, mus: mu, with_l_value: l_value };
            let r = report::build(&req, &budgets)?;
            emit(json, &r, report::render_text)
        }
        Command::Sweep { p_max, d_max, l_max, checks, csv } => {
            let checks = if checks.is_empty() {
                Check::ALL.to_vec()
            } else {
                checks.iter().map(|c| Check::parse(c.trim())).collect::<Result<_, _>>()?
            };
            let params = SweepParams { p_max, d_max, l_max, checks };
            let (rows, result) = sweep::run(&params, &budgets)?;
            let bytes = sweep::to_csv(&rows)?;
            let summary = if json {
                serde_json::to_string_pretty(&result).map_err(|e| CliError::Usage(e.to_string()))? + "\n"
            } else {
                format!("{} rows, {} passed, {} failed\n", result.rows_total, result.passed, result.failed)
            };
            match csv {
                Some(path) => {
                    std::fs::write(&path, bytes)?;
                    print!("{summary}");
                }
                None => {
                    std::io::stdout().lock().write_all(&bytes)?;
                    eprint!("{summary}");
                }
            }
            if result.failed > 0 {
                return Err(CliError::ChecksFailed(result.failed));
            }
            Ok(())
        }
        Command::Lvalue { spec, derivative, mu, terms } => {
            let req = LValueRequest { epsilon: spec.epsilon, p: spec.p, q: spec.q(), d: spec.d, derivative, mu, terms };
            let o = query::lvalue(&req, &budgets)?;
            emit(json, &o, query::render_lvalue)
        }
        Command::Classgroup { disc, p, epsilon } => {
            let o = query::classgroup(disc, p.map(|p| (p, p + 2)), epsilon, &budgets)?;
            emit(json, &o, query::render_classgroup)
        }
        Command::Advisor { spec, mu, assume } => {
            let facts = advisor::parse_facts(&assume)?;
            let a = advisor::advise(spec.epsilon, spec.p, spec.q(), spec.d, mu, &facts)?;
            emit(json, &a, advisor::render_text)
        }
        Command::Verify { criterion } => {
            if let Some(bad) = criterion.iter().find(|&&c| !(1..=10).contains(&c)) {
                return Err(CliError::Usage(format!("no criterion {bad}; expected 1-10")));
            }
            let r = verify::run_all(&criterion, &budgets);
            emit(json, &r, |r| r.criteria.iter().map(|c| c.line() + "\n").collect())?;
            if r.failed > 0 {
                return Err(CliError::ChecksFailed(r.failed));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("twincurve: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
