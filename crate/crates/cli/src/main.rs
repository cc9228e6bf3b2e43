use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonjordan::run::{self, GroupMode, Produced};
use nonjordan::verify::{verify, VerifyOptions};
use nonjordan::wire::{self, Body};
use nonjordan_core::construction::LiftMode;
use nonjordan_core::heisenberg::BRUTE_FORCE_BUDGET;
use nonjordan_core::isotropic::ENUMERATION_BUDGET;
use nonjordan_core::olshanskii::SEARCH_ATTEMPTS;
use nonjordan_core::BigRational;

/// Builds and checks exact certificates for Heisenberg p-group actions on
/// torus bundles.
#[derive(Parser, Debug)]
#[command(name = "nonjordan", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Write the document here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0, value_name = "U64")]
    seed: u64,
    /// Cap on exhaustive work: group elements for `group`, subspaces for
    /// `olshanskii` and `verify`.
    #[arg(long, global = true, value_name = "N")]
    budget: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the Chern cancellation pipeline for (n, r, p).
    Certify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Prime; the least admissible one is used when omitted.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_enum, default_value_t = Lift::LeastNonnegative)]
        lift: Lift,
    },
    /// Order and largest abelian subgroups of the Heisenberg group.
    Group {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = Mode::Structural)]
        mode: Mode,
    },
    /// Search for symplectic forms with no common isotropic subspace of
    /// dimension floor(4n/r)+2.
    Olshanskii {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        p: u64,
        /// Number of random families to try.
        #[arg(long, default_value_t = SEARCH_ATTEMPTS)]
        attempts: u64,
    },
    /// Table of λ bounds over 1 <= n <= max-n, 1 <= r <= max-r.
    LambdaTable {
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        max_r: usize,
        /// Report the first (n, r) with bound below this, e.g. `11/20`.
        #[arg(long, value_parser = wire::parse_rational)]
        eps: Option<BigRational>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Re-check a stored certificate.
    Verify {
        #[arg(value_name = "PATH", required_unless_present = "input", conflicts_with = "input")]
        path: Option<PathBuf>,
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
    },
    /// Least admissible prime for n.
    FindPrime {
        #[arg(long)]
        n: usize,
        /// The prime must not divide this.
        #[arg(long, default_value_t = 1)]
        h: u64,
        #[arg(long, default_value_t = 1)]
        min: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Lift {
    LeastNonnegative,
    Symmetric,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Structural,
    Brute,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn finish(produced: Produced, global: &Global, csv: bool) -> ExitCode {
    let text = match (&produced.doc.certificate, csv) {
        (Body::LambdaTable(body), true) => run::lambda_csv(body),
        _ => wire::to_json(&produced.doc),
    };
    if let Err(e) = emit(global.out.as_deref(), &text) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match produced.failure {
        None => {
            eprintln!("PASS");
            ExitCode::SUCCESS
        }
        Some(reason) => {
            eprintln!("FAIL: {reason}");
            ExitCode::from(1)
        }
    }
}

fn run_verify(path: &Path, global: &Global) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let doc = match wire::from_json(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: malformed certificate: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = VerifyOptions { budget: global.budget.unwrap_or(ENUMERATION_BUDGET) };
    let report = verify(&doc, &opts);
    let mut lines = String::new();
    for f in &report.findings {
        if f.passed {
            lines.push_str(&format!("ok   {}\n", f.name));
        } else {
            lines.push_str(&format!("FAIL {}: {}\n", f.name, f.detail));
        }
    }
    if let Err(e) = emit(global.out.as_deref(), &lines) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match report.first_failure() {
        None => {
            eprintln!("PASS");
            ExitCode::SUCCESS
        }
        Some(f) => {
            eprintln!("FAIL: {}: {}", f.name, f.detail);
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let produced = match &cli.command {
        Command::Certify { n, r, p, lift } => {
            let mode = match lift {
                Lift::LeastNonnegative => LiftMode::LeastNonnegative,
                Lift::Symmetric => LiftMode::Symmetric,
            };
            run::certify(*n, *r, *p, mode, g.seed)
        }
        Command::Group { n, p, mode } => {
            let mode = match mode {
                Mode::Structural => GroupMode::Structural,
                Mode::Brute => GroupMode::Brute,
            };
            run::group(*n, *p, mode, g.budget.unwrap_or(BRUTE_FORCE_BUDGET), g.seed)
        }
        Command::Olshanskii { n, r, p, attempts } => {
            run::olshanskii(*n, *r, *p, g.seed, g.budget.unwrap_or(ENUMERATION_BUDGET), *attempts)
        }
        Command::LambdaTable { max_n, max_r, eps, format } => {
            return match run::lambda_table(*max_n, *max_r, eps.clone(), g.seed) {
                Ok(p) => finish(p, g, matches!(format, Format::Csv)),
                Err(e) => fail(&e),
            };
        }
        Command::Verify { path, input } => {
            let path = path.as_ref().or(input.as_ref()).expect("clap requires one");
            return run_verify(path, g);
        }
        Command::FindPrime { n, h, min } => run::find_prime(*n, *h, *min, g.seed),
    };
    match produced {
        Ok(p) => finish(p, g, false),
        Err(e) => fail(&e),
    }
}

fn fail(e: &nonjordan_core::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(run::exit_code(e))
}
