use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use exegesis::laws::{self, Fault, LawsConfig};
use exegesis::report::{self, ReportError};
use exegesis::specfile::{self, SpecFile};

/// Decide Hoare-triple readings over finite relational models.
#[derive(Parser)]
#[command(name = "exegesis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a spec file.
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Verify the algebraic laws over small models.
    Laws(LawsArgs),
    /// Print every reading of one triple with partners and bug witness.
    Matrix {
        file: PathBuf,
        #[arg(long)]
        triple: String,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate one equation check and its transformer counterpart.
    Kat {
        file: PathBuf,
        #[arg(long)]
        equation: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct LawsArgs {
    /// Enumerate every model up to --max-size states (the default).
    #[arg(long, conflicts_with = "random")]
    exhaustive: bool,
    /// Sample random models of --max-size states.
    #[arg(long)]
    random: bool,
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
    #[arg(long, hide = true, value_enum)]
    inject_fault: Option<FaultArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    DemonicAsLiberal,
}

fn load(path: &Path) -> Result<SpecFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let cap = specfile::state_cap_from_env()?;
    specfile::load(&text, cap).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(text: String) {
    print!("{text}");
}

fn run(cli: Cli) -> Result<bool, String> {
    let err = |e: ReportError| e.to_string();
    match cli.command {
        Command::Check { file, json } => {
            let spec = load(&file)?;
            let r = report::run_all(&spec).map_err(err)?;
            emit(if json {
                report::to_json(&r)
            } else {
                report::render_run(&r)
            });
            Ok(r.passed)
        }
        Command::Matrix { file, triple, json } => {
            let spec = load(&file)?;
            let r = report::run_matrix(&spec, &triple).map_err(err)?;
            emit(if json {
                report::to_json(&r)
            } else {
                report::render_check(&r)
            });
            Ok(r.passed)
        }
        Command::Kat {
            file,
            equation,
            json,
        } => {
            let spec = load(&file)?;
            let r = report::run_named_kat(&spec, &equation).map_err(err)?;
            emit(if json {
                report::to_json(&r)
            } else {
                report::render_check(&r)
            });
            Ok(r.passed)
        }
        Command::Laws(a) => {
            let mut config = if a.random {
                LawsConfig::random(a.samples, a.seed, a.max_size.unwrap_or(6))
            } else {
                LawsConfig::exhaustive(a.max_size.unwrap_or(3))
            };
            config.fault = a
                .inject_fault
                .map(|FaultArg::DemonicAsLiberal| Fault::DemonicAsLiberal);
            let r = laws::run_laws(&config).map_err(|e| e.to_string())?;
            emit(if a.json {
                report::to_json(&r)
            } else {
                laws::render_laws(&r)
            });
            Ok(r.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
