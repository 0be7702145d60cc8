//! Batch front end over `entail-core`: audit and filter report corpora,
//! compute metrics, generate synthetic corpora, lint knowledge bases and run
//! the lexicon extractor and lexical baseline.

pub mod audit;
pub mod batch;
pub mod metrics;
pub mod synth;
pub mod tools;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use entail_core::evidence::Lexicon;
use entail_core::kb::{parse_kb, Ontology};

#[derive(Debug, Parser)]
#[command(
    name = "entail-audit",
    version,
    about = "Entailment auditing of radiology report impressions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every claimed diagnosis of every report; writes verdict JSONL.
    Audit(AuditArgs),
    /// Rewrite each report's impression_diagnoses to its entailed subset.
    Filter(FilterArgs),
    /// Aggregate verdict JSONL into soundness/completeness and confusion metrics.
    Metrics(MetricsArgs),
    /// Generate a seeded synthetic corpus with hallucination/omission injections.
    Synth(SynthArgs),
    /// Check a knowledge base for consistency and diagnosis reachability.
    Lint(LintArgs),
    /// Run the lexicon extractor and emit structured records.
    Extract(ExtractArgs),
    /// BLEU-4 and ROUGE-L between report texts and reference texts.
    Lexical(LexicalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Io {
    /// Knowledge base in .kbl format.
    #[arg(long)]
    pub kb: PathBuf,
    /// Input JSONL; `-` reads stdin.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub io: Io,
    /// Lexicon JSON, needed for records that carry only text.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Worker threads; output order does not depend on it.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// Attach a countermodel to every non-entailed diagnosis.
    #[arg(long)]
    pub emit_countermodels: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    #[command(flatten)]
    pub io: Io,
    /// Lexicon JSON, needed for records that carry only text.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Worker threads; output order does not depend on it.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
}

#[derive(Debug, Clone, Args)]
pub struct MetricsArgs {
    /// Verdict JSONL written by `audit`.
    #[command(flatten)]
    pub io: Io,
    /// Report JSONL whose `labels` fields hold ground truth, keyed by id.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Also score the filtered variant and the difference to the raw one.
    #[arg(long)]
    pub compare_filtered: bool,
    /// Additionally write one CSV row per variant, named after the input file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Knowledge base in .kbl format.
    #[arg(long)]
    pub kb: PathBuf,
    /// Report JSONL; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Injection log JSONL.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Number of reports.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Chance of claiming each non-entailed diagnosis.
    #[arg(long, default_value_t = 0.0)]
    pub halluc_rate: f64,
    /// Chance of dropping each entailed diagnosis.
    #[arg(long, default_value_t = 0.0)]
    pub omit_rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct LintArgs {
    /// Knowledge base in .kbl format.
    #[arg(long)]
    pub kb: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub io: Io,
    /// Lexicon JSON used for extraction.
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Worker threads; output order does not depend on it.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Section {
    Findings,
    Impression,
    /// Findings and impression joined by a newline.
    Report,
}

#[derive(Debug, Clone, Args)]
pub struct LexicalArgs {
    /// Report JSONL with reference texts; `-` reads stdin.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Section::Report)]
    pub section: Section,
}

/// Dataset column of the metrics CSV: the input file stem, or `stdin`.
fn dataset_name(input: &Path) -> String {
    if input == Path::new("-") {
        return "stdin".into();
    }
    input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// How a command finished when it did not hit a fatal error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    /// Output was written but some records were malformed (or the linted
    /// knowledge base was flagged).
    Partial,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Clean => 0,
            Outcome::Partial => 2,
        }
    }

    fn partial_if(flag: bool) -> Self {
        if flag {
            Outcome::Partial
        } else {
            Outcome::Clean
        }
    }
}

pub fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Joins lines with LF and a trailing LF (none for zero lines).
pub fn jsonl(lines: &[String]) -> String {
    let mut s = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        s.push_str(l);
        s.push('\n');
    }
    s
}

pub fn load_kb(path: &Path) -> Result<Ontology> {
    let text = read_input(path)?;
    parse_kb(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_lexicon(path: &Path, ontology: &Ontology) -> Result<Lexicon> {
    let text = read_input(path)?;
    Lexicon::from_json(&text, ontology).with_context(|| format!("loading lexicon {}", path.display()))
}

fn load_optional_lexicon(path: Option<&Path>, ontology: &Ontology) -> Result<Option<Lexicon>> {
    path.map(|p| load_lexicon(p, ontology)).transpose()
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Audit(a) => {
            let kb = load_kb(&a.io.kb)?;
            let lex = load_optional_lexicon(a.lexicon.as_deref(), &kb)?;
            let input = read_input(&a.io.input)?;
            let out = audit::audit(&kb, lex.as_ref(), &input, a.jobs.into(), a.emit_countermodels)?;
            write_output(a.io.out.as_deref(), &jsonl(&out.lines))?;
            eprintln!("{}", out.summary_line());
            Ok(Outcome::partial_if(out.malformed > 0))
        }
        Command::Filter(a) => {
            let kb = load_kb(&a.io.kb)?;
            let lex = load_optional_lexicon(a.lexicon.as_deref(), &kb)?;
            let input = read_input(&a.io.input)?;
            let out = audit::filter(&kb, lex.as_ref(), &input, a.jobs.into())?;
            write_output(a.io.out.as_deref(), &jsonl(&out.lines))?;
            Ok(Outcome::partial_if(out.malformed > 0))
        }
        Command::Metrics(a) => {
            let kb = load_kb(&a.io.kb)?;
            let verdicts = read_input(&a.io.input)?;
            let labels = a.labels.as_deref().map(read_input).transpose()?;
            let report = metrics::metrics(&kb, &verdicts, labels.as_deref(), a.compare_filtered)?;
            write_output(a.io.out.as_deref(), &report.to_json())?;
            if let Some(csv) = &a.csv {
                write_output(Some(csv), &report.to_csv(&dataset_name(&a.io.input))?)?;
            }
            Ok(Outcome::Clean)
        }
        Command::Synth(a) => {
            let kb = load_kb(&a.kb)?;
            let config = entail_core::synth::SynthConfig {
                n: a.n,
                halluc_rate: a.halluc_rate,
                omit_rate: a.omit_rate,
                seed: a.seed,
            };
            let out = synth::synth(&kb, &config)?;
            write_output(a.out.as_deref(), &out.reports)?;
            if let Some(log) = &a.log {
                write_output(Some(log), &out.log)?;
            }
            Ok(Outcome::Clean)
        }
        Command::Lint(a) => {
            let kb = load_kb(&a.kb)?;
            let (text, clean) = tools::lint(&kb);
            write_output(a.out.as_deref(), &text)?;
            Ok(Outcome::partial_if(!clean))
        }
        Command::Extract(a) => {
            let kb = load_kb(&a.io.kb)?;
            let lex = load_lexicon(&a.lexicon, &kb)?;
            let input = read_input(&a.io.input)?;
            let out = tools::extract(&kb, &lex, &input, a.jobs.into())?;
            write_output(a.io.out.as_deref(), &jsonl(&out.lines))?;
            Ok(Outcome::partial_if(out.malformed > 0))
        }
        Command::Lexical(a) => {
            let input = read_input(&a.input)?;
            let report = tools::lexical(&input, a.section)?;
            write_output(a.out.as_deref(), &report.to_json())?;
            Ok(Outcome::Clean)
        }
    }
}
