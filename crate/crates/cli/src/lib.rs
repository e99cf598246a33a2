//! Command-line front end: one-shot rolls, a REPL, the enumeration verifier
//! and the NdN timing ladder.
//!
//! Everything runs through [`run`], which takes its streams as arguments so
//! the binary and the tests drive exactly the same code.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use dicenote::oracle::{self, Outcome};
use dicenote::perf;
use dicenote::report::{error_json, result_json};
use dicenote::{Error, Limits, RandomSource, SeededSource, Session};
use num_traits::ToPrimitive;
use serde_json::json;

/// Environment variable overriding the reroll/explosion chain limit.
pub const LIMIT_ENV: &str = "DICE_LIMIT_L";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USER_ERROR: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "dicenote", version, about = "Roll, check and time dice notation")]
pub struct Cli {
    /// Seed for the random generator; rolls are reproducible under a seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// File of `#NAME = expr` definitions loaded before anything runs.
    #[arg(long, global = true)]
    pub macros: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Roll one expression.
    Roll {
        #[arg(allow_hyphen_values = true)]
        expression: String,
    },
    /// Read expressions line by line; macro definitions persist.
    Repl,
    /// Compare sampled rolls with the exact enumerated distribution.
    Verify {
        #[arg(allow_hyphen_values = true)]
        expression: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Time the NdN ladder and print CSV.
    Bench {
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    pub seed: Option<u64>,
    pub format: Format,
    pub macros_file: Option<PathBuf>,
    pub limits: Limits,
    /// Show a prompt in the REPL.
    pub interactive: bool,
}

impl CliConfig {
    /// Builds a config from parsed flags and the raw `DICE_LIMIT_L` value.
    pub fn new(cli: Cli, limit_env: Option<&str>) -> Result<Self, String> {
        let mut limits = Limits::default();
        if let Some(raw) = limit_env {
            let chain = raw
                .trim()
                .parse()
                .map_err(|_| format!("{LIMIT_ENV} must be a non-negative integer, got {raw:?}"))?;
            limits = limits.with_chain(chain);
        }
        Ok(CliConfig {
            command: cli.command,
            seed: cli.seed,
            format: cli.format,
            macros_file: cli.macros,
            limits,
            interactive: false,
        })
    }

    /// Parses `args` (including the program name) against the environment.
    pub fn from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        let env = std::env::var(LIMIT_ENV).ok();
        CliConfig::new(cli, env.as_deref())
            .map_err(|m| clap::Error::raw(clap::error::ErrorKind::ValueValidation, m + "\n"))
    }

    fn rng(&self) -> SeededSource {
        match self.seed {
            Some(seed) => SeededSource::new(seed),
            None => SeededSource::from_entropy(),
        }
    }
}

/// Runs one command and returns the process exit code.
pub fn run(
    config: &CliConfig,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let mut session = Session::new().with_limits(config.limits);
    if let Some(path) = &config.macros_file {
        let loaded = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read macro file {}: {e}", path.display()))
            .and_then(|text| session.macros.load_str(&text).map_err(|e| e.to_string()));
        if let Err(message) = loaded {
            let _ = writeln!(stderr, "error: {message}");
            return EXIT_USER_ERROR;
        }
    }
    let outcome = match &config.command {
        Command::Roll { expression } => {
            let mut rng = config.rng();
            roll(config, &mut session, expression, &mut rng, stdout, stderr)
        }
        Command::Repl => repl(config, &mut session, stdin, stdout, stderr),
        Command::Verify {
            expression,
            samples,
        } => verify(config, &session, expression, *samples, stdout, stderr),
        Command::Bench { trials } => bench(config, *trials, stdout, stderr),
    };
    outcome.unwrap_or_else(|e| {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        EXIT_USER_ERROR
    })
}

fn exit_code(error: &Error) -> i32 {
    if error.is_limit() {
        EXIT_LIMIT
    } else {
        EXIT_USER_ERROR
    }
}

/// `error[CODE]: message`, followed by the source with a caret under the span.
pub fn render_diagnostic(source: &str, error: &Error) -> String {
    let mut out = format!("error[{}]: {error}\n", error.code());
    if let Some(span) = error.span() {
        let column = |byte: usize| {
            source
                .get(..byte.min(source.len()))
                .map_or(byte, |s| s.chars().count())
        };
        let start = column(span.start);
        let width = column(span.end).saturating_sub(start).max(1);
        out.push_str(&format!("  {source}\n  {}{}\n", " ".repeat(start), "^".repeat(width)));
    }
    out
}

fn roll(
    config: &CliConfig,
    session: &mut Session,
    expression: &str,
    rng: &mut dyn RandomSource,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> std::io::Result<i32> {
    match session.roll(expression, rng) {
        Ok(result) => {
            match config.format {
                Format::Text => {
                    if !result.values.is_empty() {
                        writeln!(stdout, "{}", result.values)?;
                    }
                    for w in &result.warnings {
                        writeln!(stderr, "warning: {w}")?;
                    }
                }
                Format::Json => writeln!(stdout, "{}", result_json(&result))?,
            }
            Ok(EXIT_OK)
        }
        Err(e) => {
            if config.format == Format::Json {
                writeln!(stdout, "{}", error_json(&e))?;
            }
            stderr.write_all(render_diagnostic(expression, &e).as_bytes())?;
            Ok(exit_code(&e))
        }
    }
}

fn repl(
    config: &CliConfig,
    session: &mut Session,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> std::io::Result<i32> {
    let mut rng = config.rng();
    let mut line = String::new();
    loop {
        if config.interactive {
            write!(stdout, "> ")?;
            stdout.flush()?;
        }
        line.clear();
        if stdin.read_line(&mut line)? == 0 {
            break;
        }
        let input = line.trim();
        match input {
            "" => continue,
            ":q" | ":quit" | "exit" | "quit" => break,
            _ => {}
        }
        roll(config, session, input, &mut rng, stdout, stderr)?;
    }
    Ok(EXIT_OK)
}

fn verify(
    config: &CliConfig,
    session: &Session,
    expression: &str,
    samples: u64,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> std::io::Result<i32> {
    let seed = config.seed.unwrap_or(0);
    let checked = session.parse(expression).and_then(|expr| {
        let dist = oracle::enumerate(&expr, &session.macros, &config.limits)?;
        let cmp = oracle::compare(&expr, &session.macros, &config.limits, samples, seed)?;
        Ok((dist, cmp))
    });
    let (dist, cmp) = match checked {
        Ok(v) => v,
        Err(e) => {
            if config.format == Format::Json {
                writeln!(stdout, "{}", error_json(&e))?;
            }
            stderr.write_all(render_diagnostic(expression, &e).as_bytes())?;
            return Ok(exit_code(&e));
        }
    };
    let normalized = oracle::is_normalized(&dist);
    let passed = cmp.passed() && normalized;
    match config.format {
        Format::Text => {
            writeln!(stdout, "outcome\tprobability")?;
            for (outcome, p) in dist.iter() {
                let label = match outcome {
                    Outcome::Values(v) => v.to_string(),
                    Outcome::Error(code) => format!("error {code}"),
                };
                writeln!(stdout, "{label}\t{p}")?;
            }
            writeln!(
                stdout,
                "support {} over {} enumerated paths; total probability {}",
                dist.support_size(),
                dist.evaluations,
                dist.total()
            )?;
            writeln!(
                stdout,
                "chi-square {:.3} with {} degrees of freedom, p = {:.4} ({} samples, seed {seed})",
                cmp.chi_square.statistic, cmp.chi_square.degrees_of_freedom, cmp.chi_square.p_value, samples
            )?;
            writeln!(stdout, "{}", if passed { "PASS" } else { "FAIL" })?;
        }
        Format::Json => {
            let distribution: Vec<_> = dist
                .iter()
                .map(|(outcome, p)| {
                    let key = match outcome {
                        Outcome::Values(v) => json!(v.iter().map(dicenote::report::group_json).collect::<Vec<_>>()),
                        Outcome::Error(code) => json!({ "error": code }),
                    };
                    json!({
                        "outcome": key,
                        "probability": p.to_string(),
                        "approx": p.to_f64(),
                    })
                })
                .collect();
            let doc = json!({
                "expression": expression,
                "distribution": distribution,
                "support": dist.support_size(),
                "paths": dist.evaluations,
                "normalized": normalized,
                "samples": samples,
                "seed": seed,
                "impossible_samples": cmp.impossible,
                "chi_square": cmp.chi_square.statistic,
                "degrees_of_freedom": cmp.chi_square.degrees_of_freedom,
                "p_value": cmp.chi_square.p_value,
                "passed": passed,
            });
            writeln!(stdout, "{doc}")?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn bench(
    config: &CliConfig,
    trials: usize,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> std::io::Result<i32> {
    if trials == 0 {
        writeln!(stderr, "error: --trials must be at least 1")?;
        return Ok(EXIT_USER_ERROR);
    }
    let timings = match perf::time_ladder(trials, config.seed.unwrap_or(0)) {
        Ok(t) => t,
        Err(e) => {
            writeln!(stderr, "error[{}]: {e}", e.code())?;
            return Ok(exit_code(&e));
        }
    };
    stdout.write_all(perf::to_csv(&timings).as_bytes())?;
    let top: Vec<(f64, f64)> = timings[timings.len() - 3..]
        .iter()
        .filter_map(|t| Some((perf::ndn_dice(&t.expression)? as f64, t.mean_ns)))
        .collect();
    writeln!(stderr, "log-log slope over the top three rungs: {:.3}", perf::loglog_slope(&top))?;
    Ok(EXIT_OK)
}
