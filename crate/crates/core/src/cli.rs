//! Command-line front end. [`run`] takes the arguments and output streams
//! and returns the process exit code.

use std::io::Write;
use std::path::Path;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{cost_function, sign_of, SignAnalysis, COST_FUNCTIONS};
use crate::classical::{parse_strategy, DEFAULT_STRATEGY};
use crate::rules::{parse_theory, Theory};
use crate::saturation::{prove_equal, simplify, Report, SaturationParams, SchedulerKind};
use crate::term::{parse_term, Term};
use crate::theories::{bundled_source, stream_optimize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "termsat", version, about = "Term rewriting and equality saturation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Saturate and extract the cheapest equivalent term.
    Simplify(Opts),
    /// Check whether two terms end up in the same class.
    Prove(Opts),
    /// Rewrite classically with a strategy.
    Rewrite(Opts),
    /// Print the sign of an expression.
    Analyze(Opts),
    /// Run the stream-fusion optimizer.
    OptimizeStream(Opts),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SchedulerArg {
    Simple,
    Backoff,
}

#[derive(Args, Debug)]
struct Opts {
    /// Theory file, or @name for a bundled theory. Takes several values;
    /// put positional expressions before it.
    #[arg(long, short, num_args = 1.., action = clap::ArgAction::Append)]
    theory: Vec<String>,
    /// Expression, or @file to read it from a file. Repeatable.
    #[arg(long, short, action = clap::ArgAction::Append, allow_hyphen_values = true)]
    expr: Vec<String>,
    /// Expressions given positionally.
    exprs: Vec<String>,
    #[arg(long, default_value_t = 8)]
    timeout: usize,
    #[arg(long)]
    timelimit_ms: Option<u64>,
    #[arg(long, default_value_t = 5000)]
    matchlimit: usize,
    #[arg(long, default_value_t = 5000)]
    eclasslimit: usize,
    #[arg(long, default_value_t = 15000)]
    enodelimit: usize,
    #[arg(long, value_enum, default_value_t = SchedulerArg::Backoff)]
    scheduler: SchedulerArg,
    #[arg(long, default_value_t = 5)]
    ban_length: usize,
    #[arg(long)]
    threaded: bool,
    /// astsize, astsize_inv or mult_penalty.
    #[arg(long, default_value = "astsize")]
    cost: String,
    #[arg(long, default_value = DEFAULT_STRATEGY)]
    strategy: String,
    /// Sign assumption such as x=+ or k=inf. Repeatable.
    #[arg(long, action = clap::ArgAction::Append)]
    assume: Vec<String>,
    #[arg(long)]
    json: bool,
    #[arg(long, short)]
    verbose: bool,
}

impl Opts {
    fn params(&self) -> SaturationParams {
        SaturationParams {
            timeout: self.timeout,
            timelimit: self.timelimit_ms.map(Duration::from_millis),
            matchlimit: self.matchlimit,
            eclasslimit: self.eclasslimit,
            enodelimit: self.enodelimit,
            goal: None,
            scheduler: match self.scheduler {
                SchedulerArg::Simple => SchedulerKind::Simple,
                SchedulerArg::Backoff => SchedulerKind::Backoff {
                    ban_length: self.ban_length,
                },
            },
            threaded: self.threaded,
            timer: self.verbose || self.json,
            printiter: self.verbose,
        }
    }

    fn theory(&self) -> Result<Theory> {
        let mut parts = Vec::new();
        for spec in &self.theory {
            parts.push(load_theory(spec)?);
        }
        if parts.is_empty() {
            return Ok(Theory::new("empty"));
        }
        Ok(Theory::concat("cli", &parts)?)
    }

    fn terms(&self) -> Result<Vec<Term>> {
        self.expr
            .iter()
            .chain(&self.exprs)
            .map(|src| {
                let text = match src.strip_prefix('@') {
                    Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
                    None => src.clone(),
                };
                parse_term(text.trim()).with_context(|| format!("in expression `{}`", text.trim()))
            })
            .collect()
    }

    fn one_term(&self) -> Result<Term> {
        let mut ts = self.terms()?;
        if ts.len() != 1 {
            bail!("expected one expression, got {}", ts.len());
        }
        Ok(ts.pop().unwrap())
    }
}

fn load_theory(spec: &str) -> Result<Theory> {
    if let Some(name) = spec.strip_prefix('@') {
        let src = bundled_source(name).ok_or_else(|| anyhow!("no bundled theory `{name}`"))?;
        return Ok(parse_theory(name, src)?);
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    let name = Path::new(spec)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("theory");
    parse_theory(name, &text).with_context(|| format!("in {spec}"))
}

fn print_report(out: &mut dyn Write, r: &Report, opts: &Opts) -> Result<()> {
    if opts.json {
        writeln!(out, "{}", r.to_json())?;
    } else {
        write!(out, "{}", r.render(opts.verbose))?;
    }
    Ok(())
}

fn exec(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Simplify(o) => {
            let t = o.one_term()?;
            let th = o.theory()?;
            let cf = cost_function(&o.cost)
                .ok_or_else(|| anyhow!("unknown cost function `{}` (expected one of {})", o.cost, COST_FUNCTIONS.join(", ")))?;
            let (best, report) = simplify(&t, &th, &o.params(), cf.as_ref())?;
            for s in &report.skipped {
                writeln!(err, "warning: skipped in e-graph mode: {s}")?;
            }
            writeln!(out, "{best}")?;
            if o.json {
                print_report(out, &report, &o)?;
            } else if o.verbose {
                write!(err, "{}", report.render(true))?;
            }
            Ok(if report.stop_reason.is_limit() { EXIT_LIMIT } else { EXIT_OK })
        }
        Command::Prove(o) => {
            let ts = o.terms()?;
            let [a, b] = ts.as_slice() else {
                bail!("prove expects two expressions, got {}", ts.len());
            };
            let th = o.theory()?;
            let (equal, report) = prove_equal(a, b, &th, &o.params())?;
            writeln!(out, "{}", if equal { "equal" } else { "unknown" })?;
            print_report(out, &report, &o)?;
            Ok(if equal { EXIT_OK } else { EXIT_UNKNOWN })
        }
        Command::Rewrite(o) => {
            let t = o.one_term()?;
            let th = o.theory()?;
            let s = parse_strategy(&o.strategy, &th, o.threaded)?;
            for name in &s.skipped {
                writeln!(err, "warning: rule {name} skipped in classical mode")?;
            }
            let result = s.rewriter.rewrite(&t).unwrap_or(t);
            writeln!(out, "{result}")?;
            Ok(EXIT_OK)
        }
        Command::Analyze(o) => {
            let t = o.one_term()?;
            let mut a = SignAnalysis::default();
            for spec in &o.assume {
                a.assume_spec(spec).map_err(|e| anyhow!(e))?;
            }
            writeln!(out, "sign = {}", sign_of(&t, a)?)?;
            Ok(EXIT_OK)
        }
        Command::OptimizeStream(o) => {
            let t = o.one_term()?;
            writeln!(out, "{}", stream_optimize(&t, &o.params())?)?;
            Ok(EXIT_OK)
        }
    }
}

pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let to_out = !e.use_stderr();
            let text = e.render().to_string();
            let _ = if to_out { write!(out, "{text}") } else { write!(err, "{text}") };
            return if to_out { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match exec(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}
