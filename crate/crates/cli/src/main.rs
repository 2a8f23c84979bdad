use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use cspdich::suites::SuiteConfig;
use cspdich_cli::{check, classify, eval, reduce, CliError, CliResult};

#[derive(Parser)]
#[command(name = "cspdich", version, about = "Classify, evaluate and reduce weighted Boolean #CSP instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report class memberships and the complexity verdict for the signatures of a file.
    #[command(group(ArgGroup::new("table").args(["relations", "signatures"])))]
    Classify {
        path: PathBuf,
        /// Use the relation table; every signature must be 0/1-valued.
        #[arg(long)]
        relations: bool,
        /// Use the weighted signature table.
        #[arg(long)]
        signatures: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compute the partition function exactly or approximate it by sampling.
    #[command(group(ArgGroup::new("evaluator").args(["auto", "bb2", "wnc", "brute"])))]
    #[command(group(ArgGroup::new("mode").args(["exact", "approx"])))]
    Eval {
        path: PathBuf,
        /// Exact rational value (the default).
        #[arg(long)]
        exact: bool,
        /// Fastest applicable exact evaluator (the default).
        #[arg(long)]
        auto: bool,
        /// Basically binary signatures, every variable of degree at most 2.
        #[arg(long)]
        bb2: bool,
        /// Weighted-NEQ-conj signatures.
        #[arg(long)]
        wnc: bool,
        /// Enumerate all configurations.
        #[arg(long)]
        brute: bool,
        /// Randomised approximation within exp(eps) with probability 3/4.
        #[arg(long, requires = "eps", conflicts_with = "evaluator")]
        approx: bool,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Apply a transformation and write the output with its certificate.
    Reduce {
        path: PathBuf,
        /// One of two-sim-eq, three-sim-eq, simulate-pins, weights-to-signatures,
        /// signatures-to-weights, encode-pow2, holant, flip-gadget, compose-im,
        /// hmax, monomer-dimer.
        transform: String,
        #[arg(short, long)]
        out: PathBuf,
        /// Certificate path; defaults to OUT with extension `.cert.json`.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Recompute both partition functions and check the certificate.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        options: reduce::Options,
    },
    /// Run a property suite.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 3)]
        arity_max: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn seed_or_default(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        eprintln!("warning: no --seed given, using seed 0");
        0
    })
}

fn apply_arity_cap() -> CliResult<()> {
    if let Ok(value) = std::env::var("CSPDICH_ARITY_CAP") {
        let cap: usize = value
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("CSPDICH_ARITY_CAP=`{value}` is not a number")))?;
        cspdich::algebra::set_arity_cap(cap);
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<String> {
    apply_arity_cap()?;
    match cli.command {
        Command::Classify {
            path,
            relations,
            signatures,
            json,
        } => {
            let mode = match (relations, signatures) {
                (true, _) => classify::Mode::Relations,
                (_, true) => classify::Mode::Signatures,
                _ => classify::Mode::Auto,
            };
            classify::run(&path, mode, json)
        }
        Command::Eval {
            path,
            bb2,
            wnc,
            brute,
            approx,
            eps,
            seed,
            json,
            ..
        } => {
            let mode = if approx {
                let epsilon = eps.expect("clap requires --eps with --approx");
                if !(epsilon > 0.0 && epsilon.is_finite()) {
                    return Err(CliError::input(format!("--eps {epsilon} must be positive")));
                }
                eval::Mode::Approx {
                    epsilon,
                    seed: seed_or_default(seed),
                }
            } else {
                eval::Mode::Exact(match (bb2, wnc, brute) {
                    (true, _, _) => eval::Exact::Bb2,
                    (_, true, _) => eval::Exact::Wnc,
                    (_, _, true) => eval::Exact::Brute,
                    _ => eval::Exact::Auto,
                })
            };
            eval::run(&path, mode, json)
        }
        Command::Reduce {
            path,
            transform,
            out,
            certificate,
            verify,
            options,
        } => reduce::run(&path, &transform, &options, &out, certificate.as_deref(), verify),
        Command::Check {
            suite,
            arity_max,
            trials,
            seed,
        } => {
            let cfg = SuiteConfig {
                arity_max,
                trials,
                seed: seed_or_default(seed),
            };
            check::run(&suite, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(text) => {
            print!("{text}");
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
