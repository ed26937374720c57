//! `mixdisc`: mixed discriminants of PSD matrices from the command line.
//!
//! Exit codes: 0 success, 1 failed assertion, 2 schema error, 3 domain error
//! (e.g. a matrix that is not PSD), 4 dimension or search limit.

mod commands;
mod io;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixdisc::discriminant::Algorithm;
use mixdisc::matrix::MAX_DIM;
use mixdisc::positivity::SearchConfig;
use mixdisc::suites::SuiteParams;
use mixdisc::{Rational, Tolerance};

use commands::{EllipsoidOp, Output};
use io::{field_of, CliError, CliResult, Field, Reader};

#[derive(Parser)]
#[command(name = "mixdisc", version, about = "Mixed discriminants of positive semidefinite matrices")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Arithmetic backend; defaults to the input file's field.
    #[arg(long, value_enum, global = true)]
    backend: Option<Backend>,
    /// Relative tolerance for the float backend.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_REL)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest accepted matrix dimension (at most 12).
    #[arg(long, global = true, default_value_t = MAX_DIM)]
    max_dim: usize,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Perm,
    Polar,
    Auto,
}

impl From<Algo> for Algorithm {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Perm => Algorithm::Perm,
            Algo::Polar => Algorithm::Polar,
            Algo::Auto => Algorithm::Auto,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Mixed discriminant of an n-tuple, or the coefficients of det(Σ λⱼAⱼ).
    Compute {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::Auto)]
        algo: Algo,
        /// Print every coefficient of the determinant expansion.
        #[arg(long)]
        expand: bool,
        /// Comma-separated λ's at which to evaluate the expansion.
        #[arg(long)]
        lambdas: Option<String>,
    },
    /// Decide whether the mixed discriminant is positive, with a certificate.
    Positivity {
        input: PathBuf,
        /// Bound on the random combination coefficients.
        #[arg(long, default_value_t = 1000)]
        coeff_bound: i64,
        /// Random attempts before exhaustive search.
        #[arg(long, default_value_t = 20)]
        retries: usize,
        /// Largest number of tuples the exhaustive search may try.
        #[arg(long, default_value_t = 1_000_000)]
        exhaustive_bound: u128,
    },
    /// Operations on centered ellipsoids given by their matrices.
    Ellipsoid {
        #[arg(value_enum)]
        op: EllipsoidOp,
        input: PathBuf,
        #[arg(long)]
        lambdas: Option<String>,
        #[arg(long)]
        direction: Option<String>,
    },
    /// Run randomized verification suites.
    Verify {
        #[arg(value_parser = ["oracle", "prop1", "eq7", "lemmas", "harness", "all"])]
        suite: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Audit a candidate functional against the characterization hypotheses.
    Harness {
        input: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        /// Sampled tuples; each also draws one additivity trial per slot.
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

fn reader(run: &RunArgs, field: Field) -> Reader {
    Reader { field, cap: run.max_dim.min(MAX_DIM), tol: Tolerance::with_rel(run.tol) }
}

fn backend(run: &RunArgs, field: Field) -> Backend {
    run.backend.unwrap_or(match field {
        Field::Rational => Backend::Exact,
        Field::Float64 => Backend::Float,
    })
}

fn execute(cli: &Cli) -> CliResult<Output> {
    let run = &cli.run;
    if !(run.tol.is_finite() && run.tol >= 0.0) {
        return Err(CliError::schema("--tol must be a nonnegative number"));
    }
    match &cli.command {
        Command::Compute { input, algo, expand, lambdas } => {
            let doc = io::read_json(input)?;
            let rd = reader(run, field_of(&doc)?);
            let algo = Algorithm::from(*algo);
            match backend(run, rd.field) {
                Backend::Exact => commands::compute::<Rational>(&doc, &rd, algo, *expand, lambdas.as_deref()),
                Backend::Float => commands::compute::<f64>(&doc, &rd, algo, *expand, lambdas.as_deref()),
            }
        }
        Command::Positivity { input, coeff_bound, retries, exhaustive_bound } => {
            let doc = io::read_json(input)?;
            let rd = reader(run, field_of(&doc)?);
            if *coeff_bound < 1 {
                return Err(CliError::schema("--coeff-bound must be at least 1"));
            }
            let cfg = SearchConfig { coeff_bound: *coeff_bound, retries: *retries, seed: run.seed, exhaustive_bound: *exhaustive_bound };
            match backend(run, rd.field) {
                Backend::Exact => commands::positivity::<Rational>(&doc, &rd, &cfg),
                Backend::Float => commands::positivity::<f64>(&doc, &rd, &cfg),
            }
        }
        Command::Ellipsoid { op, input, lambdas, direction } => {
            let doc = io::read_json(input)?;
            let rd = reader(run, field_of(&doc)?);
            let (l, d) = (lambdas.as_deref(), direction.as_deref());
            match backend(run, rd.field) {
                Backend::Exact => commands::ellipsoid::<Rational>(*op, &doc, &rd, l, d),
                Backend::Float => commands::ellipsoid::<f64>(*op, &doc, &rd, l, d),
            }
        }
        Command::Verify { suite, n, trials } => {
            commands::verify(suite, &SuiteParams { n: *n, trials: *trials, seed: run.seed })
        }
        Command::Harness { input, n, trials } => {
            if run.backend == Some(Backend::Float) {
                return Err(CliError::schema("harness audits run in exact arithmetic only"));
            }
            let doc = io::read_json(input)?;
            commands::harness(&doc, &reader(run, Field::Rational), *n, *trials, run.seed)
        }
    }
}

fn write(value: &serde_json::Value, out: Option<&Path>) -> ExitCode {
    match io::emit(value, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mixdisc: cannot write output: {e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.run.out.as_deref();
    match execute(&cli) {
        Ok(output) => {
            for line in &output.human {
                eprintln!("{line}");
            }
            let written = write(&output.json, out);
            if written != ExitCode::SUCCESS {
                written
            } else if output.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("mixdisc: {}", e.message);
            let _ = write(&e.to_json(), out);
            ExitCode::from(e.exit_code())
        }
    }
}
