//! Command-line grammar and validation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use hypercubic_core::asymptotics::CountMethod;
use hypercubic_core::exactarith::gcd;
use hypercubic_core::forms::SurfaceSpec;
use hypercubic_core::oracle::HeightBound;
use hypercubic_core::verify::{parse_suite, Suite};

use crate::CliError;

/// Brute-force enumeration refuses larger bounds unless `--force` is given.
pub const BRUTE_CAP_SURFACE: i64 = 80;
pub const BRUTE_CAP_THREEFOLD: i64 = 30;

pub const DEFAULT_RADIUS: i64 = 1000;
pub const DEFAULT_TAMAGAWA_RADIUS: i64 = 100;
pub const DEFAULT_PRIMES: u64 = 100;
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Count,
    Constant,
    Converge,
    Tamagawa,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SurfaceArg {
    Cayley,
    Threefold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Fiber,
    Brute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Rational points of bounded height on t0 t1 t2 + t3 (t0^2 + a t1^2) = 0
/// and t0^2 t2 + t1^2 t3 + t0 t1 t4 = 0.
#[derive(Debug, Parser)]
#[command(name = "hypercubic", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    #[arg(long, value_enum)]
    pub surface: Option<SurfaceArg>,

    /// Squarefree nonzero parameter of the Cayley surface.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<i64>,

    #[arg(long, allow_negative_numbers = true, conflicts_with = "bounds")]
    pub bound: Option<i64>,

    /// Comma-separated height bounds.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub bounds: Option<Vec<i64>>,

    /// Truncation radius of the leading-constant series (mu^2 + lambda^2 <= R^2).
    #[arg(long, allow_negative_numbers = true)]
    pub radius: Option<i64>,

    #[arg(long, value_enum, default_value = "fiber")]
    pub method: MethodArg,

    /// Recount with the other method and fail on any mismatch.
    #[arg(long)]
    pub check: bool,

    /// Largest prime in the local-density table and the Euler product.
    #[arg(long)]
    pub primes: Option<u64>,

    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<i64>,

    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<i64>,

    #[arg(long)]
    pub quad_tol: Option<f64>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    #[arg(long)]
    pub threads: Option<usize>,

    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Lift the brute-force bound caps (can be very slow).
    #[arg(long)]
    pub force: bool,

    /// Run a single verification suite.
    #[arg(long)]
    pub suite: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub surface: Option<SurfaceSpec>,
    pub bounds: Vec<HeightBound>,
    pub radius: Option<i64>,
    pub method: CountMethod,
    pub check: bool,
    pub primes: u64,
    pub pair: (i64, i64),
    pub quad_tol: f64,
    pub format: Format,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub force: bool,
    pub suite: Option<Suite>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn surface(cli: &Cli) -> Result<Option<SurfaceSpec>, CliError> {
    match (cli.surface, cli.a) {
        (None, Some(_)) => Err(usage("--a needs --surface cayley")),
        (None, None) => Ok(None),
        (Some(SurfaceArg::Threefold), Some(_)) => Err(usage("--a only applies to --surface cayley")),
        (Some(SurfaceArg::Threefold), None) => Ok(Some(SurfaceSpec::threefold())),
        (Some(SurfaceArg::Cayley), None) => Err(usage("--surface cayley needs --a")),
        (Some(SurfaceArg::Cayley), Some(a)) => {
            if a == 0 {
                return Err(usage("a must be squarefree and nonzero, got 0"));
            }
            SurfaceSpec::cayley(a)
                .map(Some)
                .map_err(|_| usage(format!("a must be squarefree, got {a}")))
        }
    }
}

fn bounds(cli: &Cli) -> Result<Vec<HeightBound>, CliError> {
    let raw: Vec<i64> = match (&cli.bound, &cli.bounds) {
        (Some(b), _) => vec![*b],
        (None, Some(bs)) => bs.clone(),
        (None, None) => Vec::new(),
    };
    let mut out = raw
        .into_iter()
        .map(|b| {
            HeightBound::new(b).map_err(|_| {
                usage(format!("bounds must be integers in 1..={}, got {b}", HeightBound::MAX))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_by_key(|b| b.b());
    out.dedup();
    Ok(out)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let surface = surface(&cli)?;
        let bounds = bounds(&cli)?;
        if let Some(r) = cli.radius {
            if r < 1 {
                return Err(usage(format!("radius must be >= 1, got {r}")));
            }
        }
        let primes = cli.primes.unwrap_or(DEFAULT_PRIMES);
        if primes < 2 {
            return Err(usage(format!("--primes must be >= 2, got {primes}")));
        }
        let pair = (cli.mu.unwrap_or(1), cli.lambda.unwrap_or(0));
        if pair == (0, 0) || gcd(pair.0, pair.1) != 1 {
            return Err(usage(format!(
                "(mu, lambda) must be a primitive pair, got ({}, {})",
                pair.0, pair.1
            )));
        }
        let quad_tol = cli.quad_tol.unwrap_or(DEFAULT_QUAD_TOL);
        if !(quad_tol > 0.0 && quad_tol.is_finite()) {
            return Err(usage(format!("--quad-tol must be positive, got {quad_tol}")));
        }
        if cli.threads == Some(0) {
            return Err(usage("--threads must be >= 1"));
        }
        let suite = cli
            .suite
            .as_deref()
            .map(parse_suite)
            .transpose()
            .map_err(|e| usage(e.to_string()))?;
        let method = match cli.method {
            MethodArg::Fiber => CountMethod::Fiber,
            MethodArg::Brute => CountMethod::Brute,
        };
        let default_format = match cli.command {
            Command::Converge => Format::Csv,
            _ => Format::Text,
        };

        let needs_surface = matches!(cli.command, Command::Count | Command::Constant | Command::Converge);
        if needs_surface && surface.is_none() {
            return Err(usage("--surface cayley|threefold is required"));
        }
        if matches!(cli.command, Command::Count | Command::Converge) && bounds.is_empty() {
            return Err(usage("--bound or --bounds is required"));
        }

        Ok(RunConfig {
            command: cli.command,
            surface,
            bounds,
            radius: cli.radius,
            method,
            check: cli.check,
            primes,
            pair,
            quad_tol,
            format: cli.format.unwrap_or(default_format),
            threads: cli.threads,
            out: cli.out,
            force: cli.force,
            suite,
        })
    }
}

/// The brute-force cap for `spec`.
pub fn brute_cap(spec: &SurfaceSpec) -> i64 {
    if spec.cayley_parameter().is_some() {
        BRUTE_CAP_SURFACE
    } else {
        BRUTE_CAP_THREEFOLD
    }
}
