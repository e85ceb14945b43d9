//! `radix`: validity checks, expansions, constructions and scans for integer
//! number systems with arbitrary digit sets.
//!
//! Exit status is 0 on success or a valid system, 1 when the input system
//! (or family) fails a semantic requirement, and 2 on malformed input.

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use radix_core::constructions::{self, Family};
use radix_core::expansions::{self, Expansion};
use radix_core::rewrite::{self, DEFAULT_STATE_CAP};
use radix_core::{json, minus_two, orbits, ConstructionError, ExpansionError, PreNumberSystem};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "radix",
    version,
    about = "Integer number systems with arbitrary digit sets"
)]
struct Cli {
    /// Worker threads for scans (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SystemArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
    base: BigInt,
    /// Comma-separated digits, e.g. `--digits=-1,0,1`.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_int, required = true)]
    digits: Vec<BigInt>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the system is a number system.
    Check(SystemArgs),
    /// Minimal expansion of a value, optionally padded.
    Expand {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        value: BigInt,
        #[arg(long)]
        pad_to: Option<usize>,
    },
    /// Attractor and its cycles.
    Attractor(SystemArgs),
    /// Digits along the cycle through 0.
    ZeroExpansion(SystemArgs),
    /// The n-fold system and its validity.
    Nfold {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        n: u32,
    },
    /// Digits occurring in the expansions of 0, u-1, u, u+1.
    Badset {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        u: BigInt,
    },
    /// Shifted systems d -> d - u b^k for k = 1..kmax, one JSON line each.
    Family {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        replace: BigInt,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        u: BigInt,
        #[arg(long)]
        kmax: u32,
    },
    /// Translations t in [tmin, tmax] that keep the number system property.
    TranslateScan {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_hyphen_values = true)]
        tmin: i64,
        #[arg(long, allow_hyphen_values = true)]
        tmax: i64,
        /// Keep the digit 0 fixed and move the others.
        #[arg(long)]
        keep_zero: bool,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Exhaustive run of the rewrite map for one shifted family.
    RewriteVerify {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        replace: BigInt,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        u: BigInt,
        #[arg(long)]
        k: u32,
    },
    /// Classify all base -2 pairs min <= d < D <= max.
    Minus2Scan {
        #[arg(long, allow_hyphen_values = true)]
        min: i64,
        #[arg(long, allow_hyphen_values = true)]
        max: i64,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Zero-expansion length for every zero digit of absolute value <= bound.
    ZeroDigitScan {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_int)]
        bound: BigInt,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: Format,
    },
}

fn parse_int(s: &str) -> Result<BigInt, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{s}` is not an integer"))
}

enum Failure {
    /// Semantic failure, exit 1.
    Invalid(String),
    /// Malformed input, exit 2.
    Input(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn construction(e: ConstructionError) -> Failure {
    match e {
        ConstructionError::ShiftOutOfRange { .. }
        | ConstructionError::NotADigit { .. }
        | ConstructionError::BadExponent
        | ConstructionError::System(_) => input(e),
        other => Failure::Invalid(other.to_string()),
    }
}

fn build(args: &SystemArgs) -> Result<PreNumberSystem, Failure> {
    PreNumberSystem::new(args.base.clone(), args.digits.iter().cloned()).map_err(input)
}

fn ints(values: &[BigInt]) -> Value {
    json::ints(values.iter())
}

fn emit(out: &mut impl Write, v: &Value) -> io::Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    out.write_all(b"\n")
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn state_cap() -> Result<u64, Failure> {
    match std::env::var("RADIX_STATE_CAP") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("RADIX_STATE_CAP=`{s}` is not a count"))),
        Err(_) => Ok(DEFAULT_STATE_CAP),
    }
}

fn family_from(sys: &SystemArgs, replace: &BigInt, u: &BigInt, k: u32) -> Result<Family, Failure> {
    Family::new(build(sys)?, replace.clone(), u.clone(), k).map_err(construction)
}

fn run(cmd: Command, out: &mut impl Write) -> Result<ExitCode, Failure> {
    match cmd {
        Command::Check(args) => {
            let sys = build(&args)?;
            let verdict = orbits::check(&sys);
            let zero = expansions::zero_expansion(&sys)
                .ok()
                .map(|e| ints(&e.digit_values()));
            let report = &verdict.attractor;
            emit(
                out,
                &json!({
                    "valid": verdict.valid,
                    "attractor": json::ints(report.members.iter()),
                    "cycles": report.cycles.iter().map(|c| ints(c)).collect::<Vec<_>>(),
                    "zero_expansion": zero,
                }),
            )?;
            Ok(status(verdict.valid))
        }
        Command::Expand { sys, value, pad_to } => {
            let sys = build(&sys)?;
            let e = match expansions::expand(&sys, &value) {
                Ok(e) => e,
                Err(e @ ExpansionError::NotRepresentable { .. }) => {
                    return Err(Failure::Invalid(e.to_string()))
                }
                Err(e) => return Err(input(e)),
            };
            let e: Expansion = match pad_to {
                Some(target) => expansions::pad(&sys, &e, target).map_err(|err| match err {
                    ExpansionError::NoZeroExpansion => Failure::Invalid(err.to_string()),
                    other => input(other),
                })?,
                None => e,
            };
            emit(out, &e.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Attractor(args) => {
            let sys = build(&args)?;
            let report = orbits::attractor(&sys);
            let b = orbits::bounds(&sys);
            let (lo, hi) = b.attractor_range();
            let mut v = report.to_json();
            v["interval"] = json!([json::int(&lo), json::int(&hi)]);
            emit(out, &v)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ZeroExpansion(args) => {
            let sys = build(&args)?;
            let e =
                expansions::zero_expansion(&sys).map_err(|e| Failure::Invalid(e.to_string()))?;
            emit(out, &e.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Nfold { sys, n } => {
            if n == 0 {
                return Err(Failure::Input("n must be at least 1".into()));
            }
            let sys = build(&sys)?;
            let folded = constructions::nfold(&sys, n);
            let valid = orbits::is_number_system(&folded);
            emit(
                out,
                &json!({
                    "base": json::int(folded.base()),
                    "digits": json::ints(folded.digit_values()),
                    "valid": valid,
                    "predicate": constructions::nfold_validity_predicate(&sys, n),
                }),
            )?;
            Ok(status(valid))
        }
        Command::Badset { sys, u } => {
            let sys = build(&sys)?;
            let bad = constructions::bad_set(&sys, &u).map_err(construction)?;
            emit(out, &bad.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Family {
            sys,
            replace,
            u,
            kmax,
        } => {
            let mut all_valid = true;
            for k in 1..=kmax {
                let family = family_from(&sys, &replace, &u, k)?;
                let shifted = constructions::shift_family(&family).map_err(construction)?;
                let valid = orbits::is_number_system(&shifted);
                all_valid &= valid;
                emit(
                    out,
                    &json!({
                        "family": family.to_json(),
                        "digits": json::ints(shifted.digit_values()),
                        "valid": valid,
                    }),
                )?;
                out.flush()?;
            }
            Ok(status(all_valid))
        }
        Command::TranslateScan {
            sys,
            tmin,
            tmax,
            keep_zero,
            format,
        } => {
            let sys = build(&sys)?;
            let ts =
                constructions::translate_scan(&sys, tmin, tmax, keep_zero).map_err(construction)?;
            match format {
                Format::Json => emit(out, &json!({ "t": ts }))?,
                Format::Tsv | Format::Jsonl => {
                    for t in ts {
                        if format == Format::Tsv {
                            writeln!(out, "{t}")?;
                        } else {
                            emit(out, &json!({ "t": t }))?;
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::RewriteVerify { sys, replace, u, k } => {
            let family = family_from(&sys, &replace, &u, k)?;
            let trace = rewrite::verify_criterion(&family, state_cap()?).map_err(|e| match e {
                rewrite::RewriteError::StateSpaceTooLarge { .. } => input(e),
                other => Failure::Invalid(other.to_string()),
            })?;
            emit(out, &trace.to_json())?;
            Ok(status(trace.all_escape))
        }
        Command::Minus2Scan { min, max, format } => {
            if format == Format::Json {
                return Err(Failure::Input("minus2-scan writes tsv or jsonl".into()));
            }
            for v in minus_two::minus2_scan(min, max) {
                match format {
                    Format::Tsv if v.valid => writeln!(out, "{}", v.to_tsv())?,
                    Format::Jsonl => emit(out, &v.to_json())?,
                    _ => {}
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ZeroDigitScan { sys, bound, format } => {
            let sys = build(&sys)?;
            if &bound < sys.modulus() {
                return Err(Failure::Input("bound must be at least |b|".into()));
            }
            let scan = expansions::zero_digit_length_scan(&sys, &bound);
            for (z, len) in scan {
                match format {
                    Format::Tsv => match len {
                        Some(l) => writeln!(out, "{z}\t{l}")?,
                        None => writeln!(out, "{z}\t-")?,
                    },
                    _ => emit(out, &json!({ "zero_digit": json::int(&z), "length": len }))?,
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("global pool is configured once");
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out).and_then(|code| {
        out.flush()?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(fail) => {
            let _ = out.flush();
            let (msg, code) = match fail {
                Failure::Invalid(m) => (m, 1),
                Failure::Input(m) => (m, 2),
                Failure::Io(e) => (e.to_string(), 2),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
