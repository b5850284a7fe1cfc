//! Command-line front end.
//!
//! Data artifacts go to `--out` or standard output; diagnostics and timings
//! go to the error stream. Exit status is 0 on success, 1 when a check fails
//! or a command errors, and 2 on usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::annealed::{annealed_exact, annealed_monte_carlo};
use crate::closedform;
use crate::coin::ChiralityVector;
use crate::environment::{Environment, EnvironmentFile, EnvironmentSpec, PhaseMeasure};
use crate::error::{Error, Result};
use crate::evolve::{evolve_to, Distribution};
use crate::io;
use crate::limit::{convergence_report, LimitDensity, WalkSource};
use crate::pathsum::{PathSum, DEFAULT_CAP};
use crate::verify::{run_suite, Suite, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qwre",
    version,
    about = "Quantum walks with site-dependent phase coins"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Position distribution at time n by state-vector evolution.
    Evolve {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        env: EnvArgs,
        #[command(flatten)]
        qubit: QubitArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Position distribution at time n by enumerating all paths.
    Paths {
        #[arg(long)]
        n: usize,
        /// Refuse walks longer than this (the cost is 2^n).
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        env: EnvArgs,
        #[command(flatten)]
        qubit: QubitArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// P/Q/R/S coefficients of the summed path product for l left and m right moves.
    ClosedForm {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        env: EnvArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Limit density of X_n / n sampled on a uniform interior grid.
    LimitDensity {
        #[command(flatten)]
        env: EnvArgs,
        /// Average over the origin measure of --env instead of sampling it.
        #[arg(long, requires = "env_file")]
        annealed: bool,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Environment-averaged distribution at time n.
    Annealed {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        env: EnvArgs,
        /// Estimate by Monte Carlo with this many environments instead of exactly.
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        qubit: QubitArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// KS distance and moments of X_n / n against the limit, over several n.
    Converge {
        /// Comma-separated, strictly ascending times.
        #[arg(long = "n", value_delimiter = ',')]
        n_values: Vec<usize>,
        #[command(flatten)]
        env: EnvArgs,
        #[command(flatten)]
        qubit: QubitArg,
        /// Exit nonzero unless the KS distance strictly decreases.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the cross-check suites.
    Verify {
        /// Suite to run; repeatable. All suites when omitted.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Largest n for path enumeration.
        #[arg(long, default_value_t = 12)]
        cap: usize,
        /// Random environments per check.
        #[arg(long, default_value_t = 100)]
        environments: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct EnvArgs {
    /// The same phase at every site.
    #[arg(long, conflicts_with = "env_file", allow_hyphen_values = true)]
    pub omega0: Option<f64>,
    /// Environment file (JSON). Without this or --omega0 the walk is Hadamard.
    #[arg(long = "env", id = "env_file")]
    pub env_file: Option<PathBuf>,
    /// Overrides the seed stored in the environment file.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct QubitArg {
    /// Initial chirality as re_L,im_L,re_R,im_R. Defaults to (1, i)/√2.
    #[arg(long, allow_hyphen_values = true)]
    pub qubit: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl EnvArgs {
    fn spec_and_seed(&self) -> Result<(EnvironmentSpec, u64)> {
        if let Some(path) = &self.env_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
            let file = EnvironmentFile::from_json(&text)?;
            let seed = self.seed.unwrap_or(file.seed);
            return Ok((file.spec(), seed));
        }
        let at = self.omega0.unwrap_or(0.0);
        Ok((
            EnvironmentSpec::iid(PhaseMeasure::Delta { at }),
            self.seed.unwrap_or(0),
        ))
    }

    /// A realized environment covering every site a walk of length `n` visits.
    fn environment(&self, n: usize) -> Result<Environment> {
        let (spec, seed) = self.spec_and_seed()?;
        spec.sample(n, seed)
    }
}

impl QubitArg {
    fn parse(&self) -> Result<ChiralityVector> {
        let Some(text) = &self.qubit else {
            return Ok(ChiralityVector::symmetric());
        };
        let parts = text
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::config(format!("qubit must be four numbers, got {text:?}")))?;
        let [lr, li, rr, ri] = parts[..] else {
            return Err(Error::config(format!(
                "qubit must be four numbers, got {text:?}"
            )));
        };
        let q = ChiralityVector::new(Complex64::new(lr, li), Complex64::new(rr, ri));
        q.ensure_normalized()
            .map_err(|e| Error::config(e.to_string()))?;
        Ok(q)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let (code, sink): (i32, &mut dyn Write) = if e.use_stderr() {
                (EXIT_USAGE, stderr)
            } else {
                (EXIT_OK, stdout)
            };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(Outcome::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Outcome::Failed(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
    }
}

enum Outcome {
    Usage(String),
    Failed(Error),
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(msg) => Outcome::Usage(msg),
            other => Outcome::Failed(other),
        }
    }
}

impl From<std::io::Error> for Outcome {
    fn from(e: std::io::Error) -> Self {
        Outcome::Failed(Error::Io(e))
    }
}

fn emit(
    output: &OutputArgs,
    stdout: &mut dyn Write,
    write: impl FnOnce(&mut dyn Write, Format) -> Result<()>,
) -> Result<()> {
    match &output.out {
        Some(path) => {
            let mut file = BufWriter::new(create(path)?);
            write(&mut file, output.format)?;
            file.flush()?;
        }
        None => write(stdout, output.format)?,
    }
    Ok(())
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::Io(io_context(e, path)))
}

fn io_context(e: std::io::Error, path: &Path) -> std::io::Error {
    std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

fn emit_distribution(output: &OutputArgs, stdout: &mut dyn Write, d: &Distribution) -> Result<()> {
    emit(output, stdout, |w, f| match f {
        Format::Csv => io::write_distribution_csv(w, d),
        Format::Json => io::write_distribution_json(w, d),
    })
}

fn report_mass(stderr: &mut dyn Write, d: &Distribution, started: Instant) -> Result<()> {
    let total = d.total();
    writeln!(
        stderr,
        "time={} total_mass={} |1-total|={:.3e} runtime={:.3}s",
        d.time(),
        io::format_float(total),
        (1.0 - total).abs(),
        started.elapsed().as_secs_f64()
    )?;
    Ok(())
}

fn execute(
    command: Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> std::result::Result<i32, Outcome> {
    let started = Instant::now();
    match command {
        Command::Evolve {
            n,
            env,
            qubit,
            output,
        } => {
            let d = evolve_to(qubit.parse()?, &env.environment(n)?, n)?;
            emit_distribution(&output, stdout, &d)?;
            report_mass(stderr, &d, started)?;
        }
        Command::Paths {
            n,
            cap,
            env,
            qubit,
            output,
        } => {
            let d = if n == 0 {
                evolve_to(qubit.parse()?, &Environment::hadamard(), 0)?
            } else {
                PathSum::with_cap(cap).oracle_distribution(
                    &env.environment(n)?,
                    n,
                    qubit.parse()?,
                )?
            };
            emit_distribution(&output, stdout, &d)?;
            report_mass(stderr, &d, started)?;
        }
        Command::ClosedForm { l, m, env, output } => {
            let c = closedform::closed_form_coefficients(l, m, &env.environment(l + m)?)?;
            emit(&output, stdout, |w, f| match f {
                Format::Csv => io::write_coefficients_csv(w, &c),
                Format::Json => io::write_coefficients_json(w, &c),
            })?;
        }
        Command::LimitDensity {
            env,
            annealed,
            points,
            output,
        } => {
            let density = if annealed {
                let (spec, _) = env.spec_and_seed()?;
                LimitDensity::annealed(spec.measure_at(0))?
            } else {
                LimitDensity::quenched(env.environment(0)?.phase(0))?
            };
            let table = io::DensityTable::sample(&density, points)?;
            emit(&output, stdout, |w, f| match f {
                Format::Csv => io::write_density_csv(w, &table),
                Format::Json => io::write_density_json(w, &table),
            })?;
            writeln!(
                stderr,
                "sine_coefficient={} mean={} variance={} total_mass={}",
                table.sine_coefficient,
                table.mean,
                table.variance,
                density.total_mass()
            )?;
        }
        Command::Annealed {
            n,
            env,
            samples,
            qubit,
            output,
        } => {
            let (spec, seed) = env.spec_and_seed()?;
            let q = qubit.parse()?;
            let d = match samples {
                Some(k) => {
                    let est = annealed_monte_carlo(&spec, n, q, k, seed)?;
                    let worst = est.std_errors.iter().copied().fold(0.0, f64::max);
                    writeln!(stderr, "samples={k} max_std_error={worst:.3e}")?;
                    est.mean
                }
                None => annealed_exact(&spec, n, q, seed)?,
            };
            emit_distribution(&output, stdout, &d)?;
            report_mass(stderr, &d, started)?;
        }
        Command::Converge {
            n_values,
            env,
            qubit,
            strict,
            output,
        } => {
            if n_values.is_empty() {
                return Err(Outcome::Usage("--n needs at least one time".into()));
            }
            let largest = *n_values.iter().max().unwrap_or(&0);
            let source = WalkSource::Environment(env.environment(largest)?);
            let report =
                convergence_report(&source, &n_values, qubit.parse()?).map_err(|e| match e {
                    Error::InvalidArgument(msg) => Outcome::Usage(msg),
                    other => Outcome::Failed(other),
                })?;
            emit(&output, stdout, |w, f| match f {
                Format::Csv => io::write_convergence_csv(w, &io::convergence_rows(&report)),
                Format::Json => io::write_convergence_json(w, &report),
            })?;
            let decreasing = report.ks_strictly_decreasing();
            writeln!(
                stderr,
                "limit_mean={} limit_variance={} ks_strictly_decreasing={decreasing} runtime={:.3}s",
                report.limit_mean,
                report.limit_variance,
                started.elapsed().as_secs_f64()
            )
            ?;
            if strict && !decreasing {
                writeln!(stderr, "KS distance does not strictly decrease")?;
                return Ok(EXIT_FAILURE);
            }
        }
        Command::Verify {
            suites,
            cap,
            environments,
            seed,
        } => {
            let selected = if suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suites
                    .iter()
                    .map(|s| s.parse::<Suite>())
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Outcome::Usage(e.to_string()))?
            };
            let config = VerifyConfig {
                cap,
                environments,
                seed,
            };
            config
                .validate()
                .map_err(|e| Outcome::Usage(e.to_string()))?;
            let mut all_passed = true;
            for suite in selected {
                let t = Instant::now();
                let report = run_suite(suite, &config)?;
                all_passed &= report.passed();
                writeln!(stdout, "{report} runtime={:.3}s", t.elapsed().as_secs_f64())?;
            }
            return Ok(if all_passed { EXIT_OK } else { EXIT_FAILURE });
        }
    }
    Ok(EXIT_OK)
}

/// Runs with the process arguments and standard streams.
pub fn main_with_std() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    code
}
