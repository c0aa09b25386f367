//! Command-line front end behind the `rowland` binary.
//!
//! Data and reports go to `out`, diagnostics to `err`. Exit codes: 0 pass,
//! 1 a failed verdict or divergence, 2 usage/I/O/validation errors,
//! 3 a run stopped by 63-bit overflow (or left inconclusive by it).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::accel::{accel_by_recursion, accel_iterate, AccelRun, AccelStream, Algorithm, Termination};
use crate::engine::{
    GapOrigin, Gate, Generator, GeneratorSpec, IncrementEvent, Preset, PresetParams, SpecWarning, StepKind, StepRule,
    Th3Threshold, ValidSpec,
};
use crate::error::Error;
use crate::numtheory::Nat;
use crate::oeis::{compare_sequences, Comparison, Fetcher, OeisError, OeisId};
use crate::verify::{self, Budget, ClaimReport, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_OVERFLOW: i32 = 3;

const PRESET_HELP: &str =
    "th1, th1a, th2, th2a, th1b, th2b, th3, th4, th5, th6, th7, th7-c7 or th7-c5s3";

#[derive(Debug, Parser)]
#[command(name = "rowland", version, about = "Prime-generating gcd recurrences")]
struct Cli {
    /// TOML file of named specs (`[specs.<name>]` tables).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Terms c(n1), c(n1+1), ... as records.
    Generate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Number of terms, the initial one included.
        #[arg(long)]
        limit: u64,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
    },
    /// Step events (no initial term).
    Increments {
        #[command(flatten)]
        spec: SpecArgs,
        /// Number of records to emit.
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        nontrivial_only: bool,
        /// Never step past this index.
        #[arg(long, default_value_t = 1_000_000_000)]
        max_n: Nat,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
    },
    /// Accelerated prime streams.
    Accel {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        algorithm: u8,
        /// Initial index for algorithms 2 and 3 (defaults 4 and 5).
        #[arg(long)]
        n1: Option<Nat>,
        #[arg(long)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Mode::Iterate)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
    },
    /// Runs one claim checker and prints its report.
    Verify(VerifyArgs),
    /// Wall time of direct simulation against the accelerated stream.
    Bench {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        horizon: Nat,
    },
    /// OEIS b-file download, cache and comparison
    #[command(subcommand)]
    Oeis(OeisCommand),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[command(flatten)]
    spec: SpecArgs,
    /// Largest index checked (for lemma1, the largest n).
    #[arg(long)]
    horizon: Nat,
    #[arg(long, value_enum, default_value_t = ReportFormat::Jsonl)]
    report: ReportFormat,
    /// Run the suite's built-in parameter grid instead of a single spec.
    #[arg(long)]
    grid: bool,
    /// accel-vs-engine: algorithm 1, 2 or 3 (else derived from the preset).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    algorithm: Option<u8>,
    /// theorem7: compare the first reset as 2^0+1 (0) or start at 2^1+1 (1).
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=1))]
    first_exponent: u32,
}

#[derive(Debug, Subcommand)]
enum OeisCommand {
    /// Prints a b-file, fetching it into the cache if needed.
    Fetch {
        id: String,
        #[arg(long)]
        offline: bool,
    },
    /// Compares generated nontrivial increments against a b-file.
    Compare {
        id: String,
        #[command(flatten)]
        spec: SpecArgs,
        /// Compare an accelerated stream instead of a preset.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), conflicts_with = "preset")]
        algorithm: Option<u8>,
        #[arg(long)]
        count: usize,
        /// Engine runs stop at this index.
        #[arg(long, default_value_t = 100_000_000)]
        max_n: Nat,
        #[arg(long, value_enum, default_value_t = Source::Auto)]
        source: Source,
        #[arg(long)]
        offline: bool,
    },
}

#[derive(Debug, Clone, Default, Args)]
struct SpecArgs {
    #[arg(long, help = format!("One of {PRESET_HELP}"))]
    preset: Option<String>,
    /// Named spec from --config; other flags override its values.
    #[arg(long = "spec", value_name = "NAME")]
    spec_name: Option<String>,
    #[arg(long)]
    nu: Option<Nat>,
    #[arg(long)]
    n1: Option<Nat>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    c1: Option<Nat>,
    /// A number, `paper-example`, `stated` or `nu+1` (th3/th4 only).
    #[arg(long)]
    gap_threshold: Option<String>,
    /// Slope for free-form specs and the equivalence suite.
    #[arg(long)]
    slope: Option<Nat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Jsonl,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Iterate,
    Recursion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    PrimeClaim,
    Equivalence,
    AccelVsEngine,
    PrimeFloor,
    Theorem7,
    Lemma1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    /// Accelerated stream when the preset has one, engine otherwise.
    Auto,
    Engine,
    Accel,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error(transparent)]
    Oeis(#[from] OeisError),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("config {}: {message}", path.display())]
    Config { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::Overflow(_)) => EXIT_OVERFLOW,
            _ => EXIT_USAGE,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// One line of `generate`/`increments` output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub n: Nat,
    pub value: Nat,
    pub diff: Option<i64>,
    pub normalized: Option<i64>,
    pub gcd_seen: Option<Nat>,
    /// `initial`, `trivial` or `reset`.
    pub kind: String,
}

impl OutputRecord {
    pub const HEADER: [&'static str; 6] = ["n", "value", "diff", "normalized", "gcd_seen", "kind"];

    pub fn initial(n: Nat, value: Nat) -> Self {
        OutputRecord {
            n,
            value,
            diff: None,
            normalized: None,
            gcd_seen: None,
            kind: "initial".into(),
        }
    }
}

impl From<&IncrementEvent> for OutputRecord {
    fn from(e: &IncrementEvent) -> Self {
        OutputRecord {
            n: e.n,
            value: e.value,
            diff: Some(e.diff),
            normalized: Some(e.normalized),
            gcd_seen: Some(e.gcd_seen),
            kind: match e.kind {
                StepKind::Trivial => "trivial",
                StepKind::Reset => "reset",
            }
            .into(),
        }
    }
}

/// One line of `accel` output: `p_i = lpf(N_i + 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccelRecord {
    pub i: u64,
    pub counter: Nat,
    pub p: Nat,
}

impl AccelRecord {
    pub const HEADER: [&'static str; 3] = ["i", "counter", "p"];
}

enum RecordWriter<'a> {
    Jsonl(&'a mut dyn Write),
    Csv(Box<csv::Writer<&'a mut dyn Write>>),
}

impl<'a> RecordWriter<'a> {
    fn new(out: &'a mut dyn Write, format: Format, header: &[&str]) -> Result<Self, CliError> {
        Ok(match format {
            Format::Jsonl => RecordWriter::Jsonl(out),
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
                w.write_record(header)?;
                RecordWriter::Csv(Box::new(w))
            }
        })
    }

    fn write<T: Serialize>(&mut self, record: &T) -> Result<(), CliError> {
        match self {
            RecordWriter::Jsonl(out) => {
                serde_json::to_writer(&mut *out, record).map_err(io::Error::from)?;
                out.write_all(b"\n")?;
            }
            RecordWriter::Csv(w) => w.serialize(record)?,
        }
        Ok(())
    }

    fn finish(self) -> Result<(), CliError> {
        match self {
            RecordWriter::Jsonl(out) => out.flush()?,
            RecordWriter::Csv(mut w) => w.flush()?,
        }
        Ok(())
    }
}

/// A gap threshold as written in flags or config.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
enum GapValue {
    Number(Nat),
    Name(String),
}

impl GapValue {
    fn parse(s: &str) -> GapValue {
        s.parse().map_or_else(|_| GapValue::Name(s.to_string()), GapValue::Number)
    }
}

/// A named spec in the config file. Preset entries take preset parameters;
/// entries without `preset` are free-form.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct SpecEntry {
    preset: Option<String>,
    nu: Option<Nat>,
    n1: Option<Nat>,
    m: Option<usize>,
    c1: Option<Nat>,
    gap_threshold: Option<GapValue>,
    slope: Option<Nat>,
    rule: Option<StepRule>,
    offset: Option<i64>,
    /// `always`, `gap-at-least`, `coprime-primorial` or `record-gcd`.
    gate: Option<String>,
    gap_origin: Option<GapOrigin>,
    normalize_offset: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    specs: BTreeMap<String, SpecEntry>,
}

fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let err = |message: String| CliError::Config {
        path: path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    toml::from_str(&text).map_err(|e| err(e.to_string()))
}

struct Context<'a> {
    config: Option<ConfigFile>,
    err: &'a mut dyn Write,
}

impl Context<'_> {
    fn entry(&self, args: &SpecArgs) -> Result<SpecEntry, CliError> {
        let mut entry = match &args.spec_name {
            Some(name) => {
                let config = self.config.as_ref().ok_or_else(|| usage("--spec needs --config"))?;
                config
                    .specs
                    .get(name)
                    .cloned()
                    .ok_or_else(|| usage(format!("no spec named `{name}` in config")))?
            }
            None => SpecEntry::default(),
        };
        if args.preset.is_some() {
            entry.preset = args.preset.clone();
        }
        entry.nu = args.nu.or(entry.nu);
        entry.n1 = args.n1.or(entry.n1);
        entry.m = args.m.or(entry.m);
        entry.c1 = args.c1.or(entry.c1);
        entry.slope = args.slope.or(entry.slope);
        if let Some(g) = &args.gap_threshold {
            entry.gap_threshold = Some(GapValue::parse(g));
        }
        if entry.preset.is_none() && args.spec_name.is_none() {
            return Err(usage("a spec is required: pass --preset or --spec"));
        }
        Ok(entry)
    }

    fn spec(&mut self, args: &SpecArgs) -> Result<ValidSpec, CliError> {
        let spec = resolve_entry(&self.entry(args)?)?;
        if spec.warning() == Some(SpecWarning::FreeForm) {
            writeln!(self.err, "warning: free-form spec; no theorem claim applies")?;
        }
        Ok(spec)
    }
}

fn resolve_entry(entry: &SpecEntry) -> Result<ValidSpec, CliError> {
    let spec = match &entry.preset {
        Some(name) => preset_spec(name, entry)?,
        None => free_form_spec(entry)?,
    };
    Ok(spec.validate().map_err(Error::from)?)
}

fn preset_spec(name: &str, entry: &SpecEntry) -> Result<GeneratorSpec, CliError> {
    let preset: Preset = name.parse().map_err(CliError::Usage)?;
    let free_only = [
        ("slope", entry.slope.is_some()),
        ("rule", entry.rule.is_some()),
        ("offset", entry.offset.is_some()),
        ("gate", entry.gate.is_some()),
        ("gap-origin", entry.gap_origin.is_some()),
        ("normalize-offset", entry.normalize_offset.is_some()),
    ];
    if let Some((key, _)) = free_only.iter().find(|(_, set)| *set) {
        return Err(usage(format!("`{key}` only applies to free-form specs, not preset {preset}")));
    }
    let takes_nu = matches!(preset, Preset::Th3 | Preset::Th4 | Preset::Th5 | Preset::Th6);
    if entry.nu.is_some() && !takes_nu {
        return Err(usage(format!("preset {preset} takes no nu")));
    }
    if entry.m.is_some() && !matches!(preset, Preset::Th5 | Preset::Th6) {
        return Err(usage(format!("preset {preset} takes no m")));
    }
    let gapped = matches!(preset, Preset::Th3 | Preset::Th4);
    if entry.gap_threshold.is_some() && !gapped {
        return Err(usage(format!("preset {preset} has no gap threshold")));
    }
    let mut params = PresetParams {
        nu: entry.nu,
        n1: entry.n1,
        m: entry.m,
        c1: entry.c1,
        gap: Th3Threshold::Stated,
    };
    let mut custom = None;
    match &entry.gap_threshold {
        None => {}
        Some(GapValue::Name(n)) => {
            params.gap = match n.as_str() {
                "stated" => Th3Threshold::Stated,
                "paper-example" => Th3Threshold::PaperExample,
                "nu+1" | "nu-plus-one" => Th3Threshold::NuPlusOne,
                _ => return Err(usage(format!("bad gap threshold `{n}`"))),
            };
            if preset == Preset::Th4 && params.gap != Th3Threshold::NuPlusOne {
                return Err(usage("th4 only takes the nu+1 gap threshold"));
            }
        }
        Some(GapValue::Number(t)) => {
            let nu = preset.spec(&params).nu();
            if preset == Preset::Th3 && *t == nu.saturating_sub(2) / 2 {
                params.gap = Th3Threshold::Stated;
            } else if *t == nu + 1 {
                params.gap = Th3Threshold::NuPlusOne;
            } else {
                custom = Some(*t);
            }
        }
    }
    let mut spec = preset.spec(&params);
    if let (Some(t), Gate::GapAtLeast { threshold, .. }) = (custom, &mut spec.gate) {
        // Left for validation to reject with the allowed values.
        *threshold = t;
    }
    Ok(spec)
}

fn free_form_spec(entry: &SpecEntry) -> Result<GeneratorSpec, CliError> {
    let need = |v: Option<Nat>, key: &str| v.ok_or_else(|| usage(format!("free-form spec needs `{key}`")));
    let n1 = need(entry.n1, "n1")?;
    let c1 = need(entry.c1, "c1")?;
    if entry.nu.is_some() {
        return Err(usage("free-form specs take `offset`, not `nu`"));
    }
    let gate = match entry.gate.as_deref().unwrap_or("always") {
        "always" => Gate::Always,
        "record-gcd" => Gate::RecordGcd,
        "coprime-primorial" => Gate::CoprimePrimorial {
            m: entry.m.ok_or_else(|| usage("coprime-primorial gate needs `m`"))?,
        },
        "gap-at-least" => Gate::GapAtLeast {
            threshold: match entry.gap_threshold {
                Some(GapValue::Number(t)) => t,
                _ => return Err(usage("gap-at-least gate needs a numeric `gap-threshold`")),
            },
            origin: entry.gap_origin.unwrap_or(GapOrigin::InitialIndex),
        },
        other => return Err(usage(format!("unknown gate `{other}`"))),
    };
    let mut spec = GeneratorSpec::free_form(
        entry.rule.unwrap_or(StepRule::PiecewiseReset),
        entry.slope.unwrap_or(3),
        entry.offset.unwrap_or(0),
        gate,
        n1,
        c1,
    );
    spec.normalize_offset = entry.normalize_offset.unwrap_or(0);
    Ok(spec)
}

/// Runs the binary with the process's arguments and standard streams.
pub fn run() -> i32 {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut err = io::stderr();
    let code = run_with(std::env::args_os(), &mut out, &mut err);
    if out.flush().is_err() && code == EXIT_OK {
        return EXIT_USAGE;
    }
    code
}

/// Parses `args` (program name first) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            if informational {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let _ = write!(err, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    let config = match cli.config.as_deref().map(load_config).transpose() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let mut ctx = Context { config, err };
    match dispatch(cli.command, &mut ctx, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            let _ = writeln!(ctx.err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, ctx: &mut Context<'_>, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Generate { spec, limit, format } => generate(ctx, out, &spec, limit, format),
        Command::Increments {
            spec,
            limit,
            nontrivial_only,
            max_n,
            format,
        } => increments(ctx, out, &spec, limit, nontrivial_only, max_n, format),
        Command::Accel {
            algorithm,
            n1,
            count,
            mode,
            format,
        } => accel(ctx, out, Algorithm::from_number(algorithm, n1)?, count, mode, format),
        Command::Verify(args) => verify_cmd(ctx, out, &args),
        Command::Bench { spec, horizon } => bench(ctx, out, &spec, horizon),
        Command::Oeis(OeisCommand::Fetch { id, offline }) => {
            let id: OeisId = id.parse()?;
            out.write_all(&Fetcher::from_env(offline).fetch(id)?)?;
            out.flush()?;
            Ok(EXIT_OK)
        }
        Command::Oeis(OeisCommand::Compare {
            id,
            spec,
            algorithm,
            count,
            max_n,
            source,
            offline,
        }) => oeis_compare(ctx, out, &id, &spec, algorithm, count, max_n, source, offline),
    }
}

fn generate(ctx: &mut Context<'_>, out: &mut dyn Write, args: &SpecArgs, limit: u64, format: Format) -> Result<i32, CliError> {
    let spec = ctx.spec(args)?;
    let mut w = RecordWriter::new(out, format, &OutputRecord::HEADER)?;
    if limit > 0 {
        w.write(&OutputRecord::initial(spec.n1, spec.c1))?;
    }
    let mut stream = Generator::new(&spec);
    for _ in 1..limit {
        match stream.next().expect("generator is endless until an error") {
            Ok(e) => w.write(&OutputRecord::from(&e))?,
            Err(e) => {
                w.finish()?;
                return Err(e.into());
            }
        }
    }
    w.finish()?;
    Ok(EXIT_OK)
}

fn increments(
    ctx: &mut Context<'_>,
    out: &mut dyn Write,
    args: &SpecArgs,
    limit: u64,
    nontrivial_only: bool,
    max_n: Nat,
    format: Format,
) -> Result<i32, CliError> {
    let spec = ctx.spec(args)?;
    let mut w = RecordWriter::new(out, format, &OutputRecord::HEADER)?;
    let mut emitted = 0;
    let mut stream = Generator::new(&spec);
    while emitted < limit {
        if stream.state().n >= max_n {
            w.finish()?;
            writeln!(ctx.err, "note: stopped at n = {max_n} after {emitted} of {limit} records")?;
            return Ok(EXIT_OK);
        }
        let e = match stream.next().expect("generator is endless until an error") {
            Ok(e) => e,
            Err(e) => {
                w.finish()?;
                return Err(e.into());
            }
        };
        if !nontrivial_only || e.diff != 1 {
            w.write(&OutputRecord::from(&e))?;
            emitted += 1;
        }
    }
    w.finish()?;
    Ok(EXIT_OK)
}

fn accel_records(run: &AccelRun) -> Vec<AccelRecord> {
    // N_i = K - 1 - i + sum_{j<i} p_j
    let k = run.algorithm.recursion_constant() as u128;
    let mut sum = 0u128;
    run.primes
        .iter()
        .enumerate()
        .map(|(idx, &p)| {
            let i = idx as u64 + 1;
            let counter = (k + sum - 1 - i as u128) as Nat;
            sum += p as u128;
            AccelRecord { i, counter, p }
        })
        .collect()
}

fn accel(
    ctx: &mut Context<'_>,
    out: &mut dyn Write,
    algorithm: Algorithm,
    count: usize,
    mode: Mode,
    format: Format,
) -> Result<i32, CliError> {
    if count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let run = match mode {
        Mode::Iterate => accel_iterate(algorithm, count)?,
        Mode::Recursion => accel_by_recursion(algorithm, count)?,
    };
    let mut w = RecordWriter::new(out, format, &AccelRecord::HEADER)?;
    for r in accel_records(&run) {
        w.write(&r)?;
    }
    w.finish()?;
    if run.termination == Termination::Overflow {
        writeln!(
            ctx.err,
            "overflow: {algorithm} left 63 bits after {} of {count} terms",
            run.primes.len()
        )?;
        return Ok(EXIT_OVERFLOW);
    }
    Ok(EXIT_OK)
}

fn emit_reports(out: &mut dyn Write, reports: &[ClaimReport], format: ReportFormat) -> Result<i32, CliError> {
    for r in reports {
        match format {
            ReportFormat::Jsonl => writeln!(out, "{}", r.to_json())?,
            ReportFormat::Text => writeln!(out, "{r}")?,
        }
    }
    out.flush()?;
    Ok(verdict_code(reports.iter().map(|r| r.verdict)))
}

fn verdict_code(verdicts: impl Iterator<Item = Verdict>) -> i32 {
    verdicts.fold(EXIT_OK, |code, v| match (code, v) {
        (EXIT_FAIL, _) | (_, Verdict::Fail) => EXIT_FAIL,
        (_, Verdict::Inconclusive) => EXIT_OVERFLOW,
        (c, Verdict::Pass) => c,
    })
}

fn accel_grid() -> Vec<Algorithm> {
    std::iter::once(Algorithm::A1)
        .chain((2..=20).map(|n1| Algorithm::A2 { n1 }))
        .chain((3..=20).map(|n1| Algorithm::A3 { n1 }))
        .collect()
}

fn verify_cmd(ctx: &mut Context<'_>, out: &mut dyn Write, args: &VerifyArgs) -> Result<i32, CliError> {
    let horizon = args.horizon;
    if args.grid {
        let reports = match args.suite {
            Suite::PrimeClaim => verify::run_grid(&verify::prime_claim_grid(), |s| verify::check_prime_claim(s, horizon)),
            Suite::PrimeFloor => verify::run_grid(&verify::prime_floor_grid(), |s| {
                verify::check_prime_floor(s, horizon).expect("grid specs are primorial-gated")
            }),
            Suite::AccelVsEngine => accel_grid()
                .par_iter()
                .map(|a| verify::check_accel_vs_engine(*a, Budget::Horizon(horizon)))
                .collect::<Result<Vec<_>, _>>()?,
            _ => return Err(usage("--grid applies to prime-claim, prime-floor and accel-vs-engine")),
        };
        return emit_reports(out, &reports, args.report);
    }
    let report = match args.suite {
        Suite::PrimeClaim => verify::check_prime_claim(&ctx.spec(&args.spec)?, horizon),
        Suite::PrimeFloor => verify::check_prime_floor(&ctx.spec(&args.spec)?, horizon)?,
        Suite::Theorem7 => {
            let mut spec_args = args.spec.clone();
            if spec_args.preset.is_none() && spec_args.spec_name.is_none() {
                spec_args.preset = Some("th7".into());
            }
            verify::check_theorem7(&ctx.spec(&spec_args)?, Budget::Horizon(horizon), args.first_exponent)?
        }
        Suite::Equivalence => {
            let s = &args.spec;
            let base = match s.preset.as_deref() {
                None => (None, None, None),
                Some("th1" | "th1a") => (Some(1), Some(7), Some(3)),
                Some("th2" | "th2a") => (Some(3), Some(6), Some(2)),
                Some(p) => return Err(usage(format!("equivalence compares th1/th2 forms, not {p}"))),
            };
            let n1 = s.n1.or(base.0).ok_or_else(|| usage("equivalence needs --n1 (or --preset th1|th2)"))?;
            let c1 = s.c1.or(base.1).ok_or_else(|| usage("equivalence needs --c1"))?;
            let slope = s.slope.or(base.2).ok_or_else(|| usage("equivalence needs --slope"))?;
            verify::check_equivalence_gcd_piecewise(n1, c1, slope, horizon)?
        }
        Suite::AccelVsEngine => {
            let algorithm = match args.algorithm {
                Some(a) => Algorithm::from_number(a, args.spec.n1)?,
                None => {
                    let spec = ctx.spec(&args.spec)?;
                    Algorithm::for_spec(&spec).ok_or_else(|| usage("no accelerated algorithm for this spec"))?
                }
            };
            verify::check_accel_vs_engine(algorithm, Budget::Horizon(horizon))?
        }
        Suite::Lemma1 => {
            let scan = verify::scan_lemma1(horizon)?;
            let code = emit_reports(out, std::slice::from_ref(&scan.report), args.report)?;
            let unexplained = scan.unexplained_violations().count();
            let summary = Lemma1Summary {
                claim_id: "lemma1-bound",
                violations: scan.bound_violations.len(),
                unexplained,
                sample: scan.bound_violations.iter().take(verify::MAX_COUNTEREXAMPLES).copied().collect(),
            };
            match args.report {
                ReportFormat::Jsonl => writeln!(out, "{}", serde_json::to_string(&summary).map_err(io::Error::from)?)?,
                ReportFormat::Text => writeln!(
                    out,
                    "lemma1-bound: {} pairs exceed n/2, {unexplained} without (n-1) | (j+1)",
                    summary.violations
                )?,
            }
            out.flush()?;
            return Ok(code);
        }
    };
    emit_reports(out, &[report], args.report)
}

#[derive(Serialize)]
struct Lemma1Summary {
    claim_id: &'static str,
    violations: usize,
    unexplained: usize,
    sample: Vec<verify::Lemma1Pair>,
}

fn bench(ctx: &mut Context<'_>, out: &mut dyn Write, args: &SpecArgs, horizon: Nat) -> Result<i32, CliError> {
    let spec = ctx.spec(args)?;
    crate::numtheory::sieve();
    if horizon <= spec.n1 {
        return Err(usage(format!("--horizon must exceed n1 = {}", spec.n1)));
    }
    let start = Instant::now();
    let mut direct = Vec::new();
    for event in Generator::new(&spec).take((horizon - spec.n1) as usize) {
        let e = event?;
        if e.diff != 1 {
            direct.push(e.diff as Nat);
        }
    }
    let direct_time = start.elapsed();
    writeln!(out, "{:<8} {:>14} {:>10} {:>12}", "method", "steps", "resets", "seconds")?;
    writeln!(
        out,
        "{:<8} {:>14} {:>10} {:>12.6}",
        "direct",
        horizon - spec.n1,
        direct.len(),
        direct_time.as_secs_f64()
    )?;
    let Some(algorithm) = Algorithm::for_spec(&spec) else {
        writeln!(ctx.err, "note: no accelerated algorithm for this spec")?;
        out.flush()?;
        return Ok(EXIT_OK);
    };
    let start = Instant::now();
    let accel: Vec<Nat> = AccelStream::new(algorithm)?.take(direct.len()).collect();
    let accel_time = start.elapsed();
    writeln!(
        out,
        "{:<8} {:>14} {:>10} {:>12.6}",
        "accel",
        accel.len(),
        accel.len(),
        accel_time.as_secs_f64()
    )?;
    let agree = accel == direct;
    writeln!(out, "{algorithm} streams agree: {}", if agree { "yes" } else { "no" })?;
    out.flush()?;
    Ok(if agree { EXIT_OK } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct CompareOutput<'a> {
    id: String,
    source: String,
    generated: usize,
    reference: usize,
    comparison: &'a Comparison,
}

#[allow(clippy::too_many_arguments)]
fn oeis_compare(
    ctx: &mut Context<'_>,
    out: &mut dyn Write,
    id: &str,
    args: &SpecArgs,
    algorithm: Option<u8>,
    count: usize,
    max_n: Nat,
    source: Source,
    offline: bool,
) -> Result<i32, CliError> {
    let id: OeisId = id.parse()?;
    let (label, generated) = match algorithm {
        Some(a) => {
            let alg = Algorithm::from_number(a, args.n1)?;
            (alg.to_string(), AccelStream::new(alg)?.take(count).map(|p| p as i64).collect())
        }
        None => {
            let spec = ctx.spec(args)?;
            let alg = match source {
                Source::Engine => None,
                Source::Auto => Algorithm::for_spec(&spec),
                Source::Accel => {
                    Some(Algorithm::for_spec(&spec).ok_or_else(|| usage("no accelerated algorithm for this spec"))?)
                }
            };
            match alg {
                Some(alg) => (alg.to_string(), AccelStream::new(alg)?.take(count).map(|p| p as i64).collect()),
                None => (verify::describe(&spec), engine_increments(&spec, count, max_n)?),
            }
        }
    };
    if generated.len() < count {
        writeln!(ctx.err, "note: generated {} of {count} terms", generated.len())?;
    }
    let reference = Fetcher::from_env(offline).fetch_parsed(id)?;
    let comparison = compare_sequences(&generated, &reference);
    let record = CompareOutput {
        id: id.to_string(),
        source: label,
        generated: generated.len(),
        reference: reference.len(),
        comparison: &comparison,
    };
    writeln!(out, "{}", serde_json::to_string(&record).map_err(io::Error::from)?)?;
    out.flush()?;
    Ok(if comparison.matches() { EXIT_OK } else { EXIT_FAIL })
}

/// Normalized nontrivial increments, at most `count`, not past `max_n`.
fn engine_increments(spec: &ValidSpec, count: usize, max_n: Nat) -> Result<Vec<i64>, CliError> {
    let mut values = Vec::new();
    for event in Generator::new(spec) {
        let e = event?;
        if e.n > max_n || values.len() == count {
            break;
        }
        if e.diff != 1 {
            values.push(e.normalized);
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("rowland").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn entry(preset: &str) -> SpecEntry {
        SpecEntry {
            preset: Some(preset.into()),
            ..SpecEntry::default()
        }
    }

    #[test]
    fn every_preset_resolves_with_defaults() {
        for p in Preset::ALL {
            let spec = resolve_entry(&entry(p.name())).unwrap();
            assert_eq!(spec.preset, Some(p));
        }
    }

    #[test]
    fn gap_threshold_spellings() {
        let with = |g: GapValue| {
            resolve_entry(&SpecEntry {
                gap_threshold: Some(g),
                ..entry("th3")
            })
        };
        let gate = |g| with(g).unwrap().gate;
        let listed = Gate::GapAtLeast {
            threshold: 5,
            origin: GapOrigin::PreviousReset,
        };
        assert_eq!(gate(GapValue::Name("paper-example".into())), listed);
        assert_eq!(gate(GapValue::Number(1)), GeneratorSpec::th3(4, 6, Th3Threshold::Stated).gate);
        assert_eq!(gate(GapValue::Number(5)), GeneratorSpec::th3(4, 6, Th3Threshold::NuPlusOne).gate);
        assert!(matches!(
            with(GapValue::Number(3)),
            Err(CliError::Lib(Error::Validation(_)))
        ));
        assert!(matches!(with(GapValue::Name("huge".into())), Err(CliError::Usage(_))));
    }

    #[test]
    fn accel_records_carry_counters() {
        let run = accel_iterate(Algorithm::A2 { n1: 4 }, 4).unwrap();
        let counters: Vec<Nat> = accel_records(&run).iter().map(|r| r.counter).collect();
        assert_eq!(counters, [6, 12, 24, 28]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["accel", "--algorithm", "1", "--count", "5"]).0, EXIT_OK);
        assert_eq!(run(&["accel", "--algorithm", "4", "--count", "5"]).0, EXIT_USAGE);
        assert_eq!(run(&["generate", "--preset", "th9", "--limit", "3"]).0, EXIT_USAGE);
        assert_eq!(run(&["--help"]).0, EXIT_OK);
        let (code, _, err) = run(&["generate", "--preset", "th3", "--nu", "3", "--limit", "3"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("even"), "{err}");
        assert_eq!(run(&["accel", "--algorithm", "1", "--count", "1000"]).0, EXIT_OVERFLOW);
    }
}
