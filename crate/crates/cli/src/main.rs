//! `ivinv`: allocate joint ordering costs among agents with interval demand.
//!
//! Exit codes: 0 success, 1 unreadable or malformed input, 2 a situation that
//! parses but fails a rule precondition or a requested property.

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use ivinv_core::format::{parse_situation, ParseOptions, ParsedSituation, TrafficFile};
use ivinv_core::game::covers_all_permutations;
use ivinv_core::properties::{self, Property};
use ivinv_core::report::{AllocationReport, ComparisonReport, ShapleyMode, TableStyle};
use ivinv_core::{fixtures, rules, Error, Rule};

#[derive(Parser)]
#[command(name = "ivinv", version, about = "Interval EOQ inventory games: SOC and Shapley cost allocation")]
struct Cli {
    /// Warn about unknown fields instead of rejecting the file.
    #[arg(long, global = true)]
    lenient: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a situation file and report which rules apply to it.
    Validate {
        /// Situation file, or the name of a bundled one (example1, example2, airports2023).
        file: String,
    },
    /// Allocate the joint cost.
    Allocate {
        file: String,
        #[arg(long, value_enum)]
        rule: AllocRule,
        /// Estimate Shapley shares from this many sampled agent orders.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Check allocation properties of a rule on a situation.
    Properties {
        file: String,
        #[arg(long, value_enum)]
        rule: PropRule,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "cca,iae,tba,bc,core")]
        checks: Vec<Check>,
    },
    /// Derive a situation file from annual passenger statistics.
    Ingest {
        /// Traffic file, or the name of a bundled one (traffic2023).
        traffic: String,
        /// Output path; `-` writes to stdout.
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AllocRule {
    Individual,
    Soc,
    Shapley,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropRule {
    Soc,
    Shapley,
}

impl From<PropRule> for Rule {
    fn from(r: PropRule) -> Rule {
        match r {
            PropRule::Soc => Rule::Soc,
            PropRule::Shapley => Rule::Shapley,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Cca,
    Iae,
    Tba,
    Bc,
    Core,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Csv,
    Json,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 1, error: error.into() }
    }

    fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: error.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse_error() {
            Failure::input(e)
        } else {
            Failure::invalid(e)
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = ParseOptions { lenient: cli.lenient };
    let result = match cli.command {
        Command::Validate { file } => validate(&file, opts),
        Command::Allocate {
            file,
            rule,
            samples,
            seed,
            format,
        } => allocate(&file, opts, rule, samples, seed, format),
        Command::Properties { file, rule, checks } => check_properties(&file, opts, rule.into(), &checks),
        Command::Ingest { traffic, output } => ingest(&traffic, opts, &output),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

/// Reads `arg` from disk, falling back to a bundled file of that name.
fn read_input(arg: &str, bundled: fn(&str) -> Option<&'static str>) -> CliResult<String> {
    let path = Path::new(arg);
    if path.exists() {
        return std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {arg}"))
            .map_err(Failure::input);
    }
    bundled(arg)
        .map(str::to_owned)
        .ok_or_else(|| Failure::input(anyhow!("{arg}: no such file or bundled dataset")))
}

fn load(arg: &str, opts: ParseOptions) -> CliResult<ParsedSituation> {
    let text = read_input(arg, fixtures::situation)?;
    let parsed = parse_situation(&text, opts)
        .map_err(|e| Failure::input(anyhow::Error::new(e).context(format!("{arg}: invalid situation file"))))?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed)
}

fn table_style() -> TableStyle {
    let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
    TableStyle {
        bold_header: !no_color && std::io::stdout().is_terminal(),
    }
}

fn validate(arg: &str, opts: ParseOptions) -> CliResult<u8> {
    let p = load(arg, opts)?;
    let s = &p.situation;
    println!("agents: {}", s.n());
    println!("ordering cost: {}", s.ordering_cost());
    for (i, rec) in p.file.agents.iter().enumerate() {
        println!("  {:<8} m = {:.4}", rec.id, s.frequency(i));
    }
    println!("joint cost w(N) = {:.2}", s.total_cost());
    match s.validate_soc_condition() {
        Ok(r) => println!(
            "SOC-rule condition: {} (max agent ratio {:.4}, aggregate ratio {:.4})",
            if r.holds { "holds" } else { "fails" },
            r.max_agent_ratio(),
            r.aggregate_ratio
        ),
        Err(e) => println!("SOC-rule condition: n/a ({e})"),
    }
    match s.size_monotonic_violation()? {
        None => println!("length game monotone: yes"),
        Some((c, j)) => println!(
            "length game monotone: no (adding agent {} to {c} shrinks the interval)",
            s.agents().label(j)
        ),
    }
    Ok(0)
}

fn allocate(
    arg: &str,
    opts: ParseOptions,
    rule: AllocRule,
    samples: Option<usize>,
    seed: u64,
    format: OutputFormat,
) -> CliResult<u8> {
    let p = load(arg, opts)?;
    let s = &p.situation;
    let names = p.file.names();
    let mode = match samples {
        Some(k) if covers_all_permutations(s.n(), k) => {
            eprintln!(
                "notice: {k} samples cover all {}! agent orders; computing exact Shapley shares",
                s.n()
            );
            ShapleyMode::Exact
        }
        Some(k) => ShapleyMode::Sampled { samples: k, seed },
        None => ShapleyMode::Exact,
    };

    let out = match rule {
        AllocRule::All => {
            let r = ComparisonReport::build(s, &names, mode)?;
            match format {
                OutputFormat::Table => r.to_table(table_style()),
                OutputFormat::Csv => r.to_csv(),
                OutputFormat::Json => r.to_json(),
            }
        }
        single => {
            let (name, alloc) = match single {
                AllocRule::Individual => ("individual", rules::individual_costs(s)),
                AllocRule::Soc => ("soc", rules::interval_soc(s)?),
                AllocRule::Shapley => ("shapley", mode.allocate(s)?),
                AllocRule::All => unreachable!(),
            };
            let r = AllocationReport::new(name, s, &names, &alloc);
            match format {
                OutputFormat::Table => r.to_table(table_style()),
                OutputFormat::Csv => r.to_csv(),
                OutputFormat::Json => r.to_json(),
            }
        }
    };
    print!("{out}");
    if !out.ends_with('\n') {
        println!();
    }
    Ok(0)
}

fn check_properties(arg: &str, opts: ParseOptions, rule: Rule, checks: &[Check]) -> CliResult<u8> {
    let p = load(arg, opts)?;
    let s = &p.situation;
    let alloc = rule.allocate(s)?;
    println!("rule: {rule}");
    let mut all_hold = true;
    let mut seen = Vec::new();
    for &c in checks {
        if seen.contains(&c) {
            continue;
        }
        seen.push(c);
        let report = match c {
            Check::Cca => properties::check_cca(s, &alloc)?,
            Check::Iae => properties::check_iae(rule, s)?,
            Check::Tba => {
                let (a, b) = properties::self_split(s)?;
                properties::check_tba(rule, &a, &b)?
            }
            Check::Bc => match properties::check_bc(rule, s) {
                Err(Error::NotEnoughAgents) => {
                    println!("{:<10} n/a (needs at least two agents)", Property::Bc.to_string());
                    continue;
                }
                r => r?,
            },
            Check::Core => properties::interval_core_contains(&s.materialize_game(), &alloc)?,
        };
        println!("{report}");
        all_hold &= report.holds;
    }
    Ok(if all_hold { 0 } else { 2 })
}

fn ingest(arg: &str, opts: ParseOptions, output: &Path) -> CliResult<u8> {
    let text = read_input(arg, fixtures::traffic)?;
    let (traffic, warnings) = TrafficFile::from_toml_str(&text, opts)
        .map_err(|e| Failure::input(anyhow::Error::new(e).context(format!("{arg}: invalid traffic file"))))?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let file = traffic.ingest().map_err(Failure::input)?;
    let body = file.to_toml_string();
    if output == Path::new("-") {
        print!("{body}");
    } else {
        std::fs::write(output, body)
            .with_context(|| format!("cannot write {}", output.display()))
            .map_err(Failure::input)?;
        eprintln!("wrote {} agents to {}", file.agents.len(), output.display());
    }
    Ok(0)
}
