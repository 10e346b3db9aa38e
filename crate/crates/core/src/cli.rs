//! `stardisc` command line.
//!
//! Exit codes: 0 success, 1 internal failure or rejected certificate,
//! 2 invalid input, 3 `certify` refuted the discrepancy claim.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::adversary::{
    self, verify_certificate, CertificateRecord, ChainCertificate, ChainResult,
};
use crate::bench::{self, BenchConfig};
use crate::discrepancy::{self, ExactOptions, DEFAULT_MAX_CORNERS};
use crate::error::Error;
use crate::generators::{generate, GeneratorKind, GeneratorSpec};
use crate::point_set::PointSet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_REFUTED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "stardisc", version)]
#[command(about = "Star discrepancy evaluation and chain certificates for D* <= epsilon claims")]
struct Cli {
    /// Worker threads for exact discrepancy and bench sweeps (results do not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a point set as CSV
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to a file instead of standard output
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Star discrepancy of a point set
    Disc {
        /// Point file, or `-` for standard input
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        /// Number of sampled corners for `--method sample`
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest critical grid enumerated by `--method exact`
        #[arg(long, default_value_t = DEFAULT_MAX_CORNERS)]
        max_corners: u64,
    },
    /// Run the chain adversary: certificate (exit 0) or violation witness (exit 3)
    Certify {
        /// Point file, or `-` for standard input
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = adversary::DEFAULT_BETA)]
        beta: f64,
    },
    /// Re-check a stored certificate against a point file
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Bracket N*(d, epsilon) with generator sweeps
    Bench {
        #[arg(long)]
        d: usize,
        /// One or more comma-separated values; one row each
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, value_enum)]
        generators: Vec<KindArg>,
        #[arg(long = "n-grid", value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = adversary::DEFAULT_BETA)]
        beta: f64,
        /// Seed for the random generator
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_CORNERS)]
        max_corners: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Random,
    Halton,
    Hammersley,
    Grid,
}

impl From<KindArg> for GeneratorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Random => GeneratorKind::Random,
            KindArg::Halton => GeneratorKind::Halton,
            KindArg::Hammersley => GeneratorKind::Hammersley,
            KindArg::Grid => GeneratorKind::Grid,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Exact,
    Sample,
}

/// An error tagged with the flag it came from.
struct Failure {
    flag: Option<&'static str>,
    error: Error,
    code: i32,
}

impl Failure {
    fn invalid(flag: &'static str, error: Error) -> Self {
        Self {
            flag: Some(flag),
            error,
            code: EXIT_INVALID,
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match error {
            Error::SoundnessViolation(_) => EXIT_FAILURE,
            _ => EXIT_INVALID,
        };
        Self {
            flag: None,
            error,
            code,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self {
            flag: None,
            error: Error::Io(e),
            code: EXIT_FAILURE,
        }
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_INVALID
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    match dispatch(cli, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = match f.flag {
                Some(flag) => writeln!(stderr, "error: {flag}: {}", f.error),
                None => writeln!(stderr, "error: {}", f.error),
            };
            f.code
        }
    }
}

fn read_points(path: &Path, stdin: &mut dyn Read) -> Result<PointSet, Failure> {
    let parsed = if path == Path::new("-") {
        PointSet::read_csv(stdin)
    } else {
        PointSet::from_csv_path(path)
    };
    parsed.map_err(|e| Failure::invalid("--input", e))
}

fn dispatch(
    cli: Cli,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    if cli.threads == Some(0) {
        return Err(Failure::invalid(
            "--threads",
            Error::Precondition("thread count must be positive".into()),
        ));
    }
    match cli.command {
        Command::Gen {
            kind,
            n,
            d,
            seed,
            output,
        } => {
            let spec = GeneratorSpec::new(kind.into(), n, d).with_seed(seed);
            let points = generate(&spec).map_err(|e| Failure::invalid("--kind/--n/--d", e))?;
            match output {
                Some(path) => {
                    let file =
                        File::create(&path).map_err(|e| Failure::invalid("--output", e.into()))?;
                    let mut out = BufWriter::new(file);
                    points.write_csv(&mut out, Some(&spec.describe()))?;
                    out.flush()?;
                }
                None => points.write_csv(&mut *stdout, Some(&spec.describe()))?,
            }
            Ok(EXIT_OK)
        }

        Command::Disc {
            input,
            method,
            samples,
            seed,
            max_corners,
        } => {
            let points = read_points(&input, stdin)?;
            let result = match method {
                MethodArg::Exact => discrepancy::star_discrepancy_exact(
                    &points,
                    &ExactOptions {
                        max_corners,
                        threads: cli.threads,
                    },
                )
                .map_err(|e| match e {
                    Error::GridTooLarge { .. } => Failure::invalid("--max-corners", e),
                    e => Failure::invalid("--input", e),
                })?,
                MethodArg::Sample => discrepancy::star_discrepancy_sampled(&points, samples, seed)
                    .map_err(|e| match e {
                        Error::ZeroTrials => Failure::invalid("--samples", e),
                        e => Failure::invalid("--input", e),
                    })?,
            };
            serde_json::to_writer_pretty(&mut *stdout, &result).map_err(Error::from)?;
            writeln!(stdout)?;
            Ok(EXIT_OK)
        }

        Command::Certify {
            input,
            epsilon,
            beta,
        } => {
            let points = read_points(&input, stdin)?;
            let params =
                adversary::ChainParameters::new(points.dim(), epsilon, beta).map_err(|e| {
                    let flag = match e {
                        Error::NonpositiveEpsilon(_) => "--epsilon",
                        Error::UnsoundBeta { .. } => "--beta",
                        _ => "--input",
                    };
                    Failure::invalid(flag, e)
                })?;
            if points.is_empty() {
                return Err(Failure::invalid("--input", Error::EmptyPointSet));
            }
            match adversary::run_chain(&points, &params)? {
                ChainResult::Certificate(cert) => {
                    writeln!(stdout, "{}", cert.to_json()?)?;
                    writeln!(
                        stderr,
                        "certificate: chain of length k = {} (guaranteed {}), so n >= {}",
                        cert.k,
                        params.guaranteed_chain_length(),
                        cert.k
                    )?;
                    Ok(EXIT_OK)
                }
                ChainResult::Refuted {
                    witness,
                    partial_chain,
                } => {
                    serde_json::to_writer_pretty(&mut *stdout, &witness).map_err(Error::from)?;
                    writeln!(stdout)?;
                    writeln!(
                        stderr,
                        "refuted after {} step(s): local discrepancy {} > epsilon = {epsilon}",
                        partial_chain.len(),
                        witness.excess
                    )?;
                    Ok(EXIT_REFUTED)
                }
            }
        }

        Command::Verify { input, certificate } => {
            let points = read_points(&input, stdin)?;
            let text = std::fs::read_to_string(&certificate)
                .map_err(|e| Failure::invalid("--certificate", e.into()))?;
            let record: CertificateRecord = serde_json::from_str(&text)
                .map_err(|e| Failure::invalid("--certificate", e.into()))?;
            let failures = match ChainCertificate::try_from(record) {
                Ok(cert) => verify_certificate(&points, &cert).failures,
                Err(e) => vec![format!("unusable parameters: {e}")],
            };
            let valid = failures.is_empty();
            let report = serde_json::json!({ "valid": valid, "failures": failures });
            writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&report).map_err(Error::from)?
            )?;
            Ok(if valid { EXIT_OK } else { EXIT_FAILURE })
        }

        Command::Bench {
            d,
            epsilon,
            generators,
            n_grid,
            beta,
            seed,
            max_corners,
            json,
        } => {
            let mut rows = Vec::with_capacity(epsilon.len());
            for eps in epsilon {
                let kinds: Vec<GeneratorKind> = generators.iter().map(|&k| k.into()).collect();
                let mut config = BenchConfig::new(d, eps, &kinds, n_grid.clone());
                config.beta = beta;
                config.exact = ExactOptions {
                    max_corners,
                    threads: cli.threads,
                };
                for spec in &mut config.generators {
                    spec.seed = seed;
                }
                let row = bench::bench_inverse_discrepancy(&config).map_err(|e| {
                    let flag = match e {
                        Error::NonpositiveEpsilon(_) => "--epsilon",
                        Error::UnsoundBeta { .. } => "--beta",
                        Error::DimensionTooSmall(_) => "--d",
                        _ => "--n-grid",
                    };
                    Failure::invalid(flag, e)
                })?;
                if row.cap_exceeded {
                    writeln!(
                        stderr,
                        "warning: epsilon = {eps}: some cells exceeded --max-corners"
                    )?;
                }
                rows.push(row);
            }
            if json {
                bench::write_json(&rows, &mut *stdout)?;
            } else {
                bench::write_csv(&rows, &mut *stdout)?;
            }
            Ok(EXIT_OK)
        }
    }
}
