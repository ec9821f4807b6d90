//! Batch front end: every subcommand reads a corpus directory (or a
//! scenario), runs one analysis and writes CSV or JSON files to `--out`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input (details in
//! `errors.txt` under the output directory), 3 iteration did not converge.

mod commands;
mod plot;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use citemetrics_core::anomaly::DetectorConfig;
use citemetrics_core::corpus::Year;
use citemetrics_core::indicators::Decimals;
use citemetrics_core::network::{NetworkError, RankingParams};
use citemetrics_core::{DistributionError, IndicatorError, IngestError, SynthError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

pub const ERRORS_FILE: &str = "errors.txt";

#[derive(Debug, Parser)]
#[command(name = "citemetrics", version, about = "Journal citation indicators from raw reference records")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and summarize how its references resolve.
    Ingest,
    /// Impact factor variants for every journal.
    Report,
    /// Eigenfactor, Article Influence, SJR and SNIP.
    Rank,
    /// Journal-to-journal citation matrix.
    Net,
    /// Per-journal citation distributions, the share histogram and
    /// discipline profiles.
    Dist,
    /// Citations to one publication-year cohort by years since publication.
    Cohort {
        /// Disciplines to follow; all disciplines when omitted.
        #[arg(long)]
        discipline: Vec<String>,
        /// Years after publication to follow; defaults to the last corpus year.
        #[arg(long)]
        horizon: Option<u32>,
    },
    /// Mean JIF and threshold counts across census years.
    Inflate,
    /// Write a synthetic corpus or a fixture.
    Gen {
        #[arg(long, value_enum, conflicts_with_all = ["preset"])]
        fixture: Option<Fixture>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
    },
    /// Run the anomaly detectors.
    Detect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    Table1,
    Mathematics,
    /// Three indicator snapshots, written as `snapshots.json`.
    Inflation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Homogeneous,
    Coercion,
    Cartel,
    Cohort,
    Growing,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Directory holding papers.jsonl, journals.jsonl and references.jsonl.
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Census year; the last year of the corpus when omitted.
    #[arg(long, global = true)]
    pub year: Option<Year>,
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub window: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 3, value_parser = parse_decimals)]
    pub decimals: u32,
    /// Also write SVG plots next to the tables.
    #[arg(long, global = true)]
    pub plot: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Scenario JSON for `gen`.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// JSON overrides for detector thresholds, ranking parameters and
    /// inflation thresholds.
    #[arg(long, global = true)]
    pub thresholds: Option<PathBuf>,
}

fn parse_decimals(s: &str) -> Result<u32, String> {
    match s {
        "1" => Ok(1),
        "3" => Ok(3),
        _ => Err("decimals must be 1 or 3".into()),
    }
}

impl RunConfig {
    fn decimals(&self) -> Decimals {
        Decimals::from_count(self.decimals).unwrap_or_default()
    }
}

/// Contents of the `--thresholds` file. Every key is optional.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    pub detector: DetectorConfig,
    pub ranking: RankingParams,
    pub inflation_thresholds: Vec<f64>,
}

impl Default for Overrides {
    fn default() -> Self {
        Overrides {
            detector: DetectorConfig::default(),
            ranking: RankingParams::default(),
            inflation_thresholds: vec![10.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Io = 1,
    Invalid = 2,
    NonConvergence = 3,
}

/// A failed run: the exit code it maps to, the message and, for invalid
/// input, one line per problem.
#[derive(Debug)]
pub struct Failure {
    pub kind: ExitKind,
    pub error: anyhow::Error,
    pub details: Vec<String>,
}

impl Failure {
    pub fn io(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            kind: ExitKind::Io,
            error: error.into(),
            details: Vec::new(),
        }
    }

    pub fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            kind: ExitKind::Invalid,
            error: error.into(),
            details: Vec::new(),
        }
    }

    fn with_details(mut self, details: Vec<String>) -> Self {
        self.details = details;
        self
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io { .. } => Failure::io(e),
            IngestError::Invalid(ref records) => {
                let details = records.iter().map(ToString::to_string).collect();
                Failure::invalid(e).with_details(details)
            }
        }
    }
}

impl From<NetworkError> for Failure {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::NonConvergence { .. } => Failure {
                kind: ExitKind::NonConvergence,
                error: e.into(),
                details: Vec::new(),
            },
            _ => Failure::invalid(e),
        }
    }
}

impl From<IndicatorError> for Failure {
    fn from(e: IndicatorError) -> Self {
        Failure::invalid(e)
    }
}

impl From<DistributionError> for Failure {
    fn from(e: DistributionError) -> Self {
        Failure::invalid(e)
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        let details = match &e {
            SynthError::Build(records) => records.iter().map(ToString::to_string).collect(),
            SynthError::InvalidSpec(_) => Vec::new(),
        };
        Failure::invalid(e).with_details(details)
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

/// Reads and parses a JSON file: unreadable is an I/O failure, unparsable
/// is invalid input.
pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CmdResult<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::invalid(anyhow::anyhow!("{}: {e}", path.display())))
}

fn load_overrides(config: &RunConfig) -> CmdResult<Overrides> {
    let overrides: Overrides = match &config.thresholds {
        Some(path) => read_json(path)?,
        None => Overrides::default(),
    };
    overrides.ranking.validate()?;
    Ok(overrides)
}

/// Runs one command line (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitKind::Invalid as i32 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {failure}");
            if failure.kind == ExitKind::Invalid {
                write_error_file(&cli.config.out, &failure);
            }
            failure.kind as i32
        }
    }
}

fn write_error_file(out: &Path, failure: &Failure) {
    let mut text = format!("{failure}\n");
    for line in &failure.details {
        text.push_str(line);
        text.push('\n');
    }
    let path = out.join(ERRORS_FILE);
    if let Err(e) = fs::create_dir_all(out).and_then(|_| fs::write(&path, text)) {
        log::warn!("cannot write {}: {e}", path.display());
    }
}

pub fn execute(cli: &Cli) -> CmdResult {
    let config = &cli.config;
    let overrides = load_overrides(config)?;
    fs::create_dir_all(&config.out).map_err(|e| Failure::io(anyhow::anyhow!("cannot create {}: {e}", config.out.display())))?;
    match &cli.command {
        Command::Ingest => commands::ingest(config),
        Command::Report => commands::report(config),
        Command::Rank => commands::rank(config, &overrides.ranking),
        Command::Net => commands::net(config),
        Command::Dist => commands::dist(config),
        Command::Cohort { discipline, horizon } => commands::cohort(config, discipline, *horizon),
        Command::Inflate => commands::inflate(config, &overrides.inflation_thresholds),
        Command::Gen { fixture, preset } => commands::gen(config, *fixture, *preset),
        Command::Detect => commands::detect(config, &overrides.detector),
    }
}
