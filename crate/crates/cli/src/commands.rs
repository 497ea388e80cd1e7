//! Subcommands. Every command reads the inputs itself and runs whatever
//! earlier stages it depends on, so each can be used on its own.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use clap::{Parser, Subcommand};
use techspace::corpus::{KeywordMatch, PatentRecord};

use crate::analysis::{analyse, Analysis};
use crate::config::{Overrides, Resources, RunConfig};
use crate::error::{CliError, Result};
use crate::graphs::{build_spaces, write_spaces, Spaces};
use crate::ingest::{ingest, Ingest, IngestStats};
use crate::output::{write_json, AtomicFile};
use crate::report::{assignment, build_report, window_summaries, write_report, Counts, MetricsSummary, RunReport};
use crate::writers::{write_matrices, write_metrics};

#[derive(Debug, Parser)]
#[command(name = "techspace", version, about = "Patent technology space analytics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Flag AI records and count keyword hits
    Classify,
    /// Matrices and metric tables per window and scope
    Metrics,
    /// Global technology space and specialisation overlays
    Space,
    /// Every stage plus the consolidated report
    Report,
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = RunConfig::resolve(&cli.flags)?;
    let res = Resources::load(&cfg)?;
    match cli.command {
        Command::Classify => {
            let stats = classify(&cfg, &res)?;
            print_classification(&stats, &res);
        }
        Command::Metrics => {
            metrics(&cfg, &res)?;
        }
        Command::Space => {
            space(&cfg, &res)?;
        }
        Command::Report => {
            let r = report(&cfg, &res)?;
            print!("{}", crate::report::render_text(&r));
        }
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Core(techspace::Error::Csv(e))
}

/// Streams AI records with their matched patterns to a CSV file.
struct AiWriter<'a> {
    out: csv::Writer<AtomicFile>,
    res: &'a Resources,
}

impl<'a> AiWriter<'a> {
    fn create(path: &Path, res: &'a Resources) -> Result<Self> {
        let mut out = csv::Writer::from_writer(AtomicFile::create(path)?);
        out.write_record(["id", "year", "title", "abstract", "countries", "ipc", "keywords"])
            .map_err(csv_err)?;
        Ok(AiWriter { out, res })
    }

    fn visit(&mut self, r: &PatentRecord, m: &KeywordMatch) -> Result<()> {
        if !m.is_ai() {
            return Ok(());
        }
        self.out
            .write_record([
                r.id.as_str(),
                &r.year.to_string(),
                &r.title,
                &r.abstract_text,
                &r.countries.join("|"),
                &r.ipc_codes.join("|"),
                &m.labels(&self.res.keywords).join("|"),
            ])
            .map_err(csv_err)
    }

    fn commit(self, path: &Path) -> Result<()> {
        self.out
            .into_inner()
            .map_err(|e| CliError::io(path, e.into_error()))?
            .commit()
    }
}

fn write_rejected(stats: &IngestStats, out: &Path) -> Result<()> {
    let path = out.join("rejected_rows.csv");
    let mut w = csv::Writer::from_writer(AtomicFile::create(&path)?);
    w.write_record(["source", "line", "message"]).map_err(csv_err)?;
    for (source, d) in &stats.diagnostics {
        w.write_record([source.as_str(), &d.line.to_string(), &d.message])
            .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::io(&path, e.into_error()))?
        .commit()
}

fn write_keyword_hits(stats: &IngestStats, res: &Resources, out: &Path) -> Result<()> {
    let path = out.join("keyword_hits.csv");
    let mut w = csv::Writer::from_writer(AtomicFile::create(&path)?);
    w.write_record(["pattern", "hits"]).map_err(csv_err)?;
    for (rule, n) in res.keywords.rules().iter().zip(&stats.keyword_hits) {
        w.write_record([rule.pattern.as_str(), &n.to_string()])
            .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::io(&path, e.into_error()))?
        .commit()
}

fn check_quality(stats: &IngestStats, out: &Path) -> Result<()> {
    write_rejected(stats, out)?;
    if stats.rows > 0 && stats.parsed == 0 {
        return Err(CliError::Data(format!("all {} records were rejected", stats.rows)));
    }
    Ok(())
}

/// Ingests the corpus; with `classify_out`, also writes the AI subset.
fn run_ingest(cfg: &RunConfig, res: &Resources, classify_out: bool) -> Result<Ingest> {
    let ai_path = cfg.out.join("ai_records.csv");
    let mut writer = if classify_out {
        Some(AiWriter::create(&ai_path, res)?)
    } else {
        None
    };
    let ingest = ingest(cfg, res, |r, m| match writer.as_mut() {
        Some(w) => w.visit(r, m),
        None => Ok(()),
    })?;
    check_quality(&ingest.stats, &cfg.out)?;
    if let Some(w) = writer {
        w.commit(&ai_path)?;
        write_keyword_hits(&ingest.stats, res, &cfg.out)?;
    }
    Ok(ingest)
}

pub fn classify(cfg: &RunConfig, res: &Resources) -> Result<IngestStats> {
    Ok(run_ingest(cfg, res, true)?.stats)
}

pub fn print_classification(stats: &IngestStats, res: &Resources) {
    let stdout = std::io::stdout();
    let mut o = stdout.lock();
    let _ = writeln!(o, "records\t{}", stats.parsed);
    let _ = writeln!(o, "rejected\t{}", stats.rejected);
    let _ = writeln!(o, "ai\t{}", stats.ai);
    for (rule, n) in res.keywords.rules().iter().zip(&stats.keyword_hits) {
        let _ = writeln!(o, "hits\t{}\t{n}", rule.pattern);
    }
}

fn write_metric_outputs(stats: &IngestStats, analysis: &Analysis, cfg: &RunConfig, res: &Resources) -> Result<()> {
    write_metrics(analysis, cfg.morc_steps, cfg.mort_steps, &cfg.out.join("metrics.csv"))?;
    write_matrices(analysis, &cfg.out.join("matrices"))?;
    write_json(
        cfg.out.join("summary.json"),
        &MetricsSummary {
            counts: Counts::from_stats(stats),
            windows: window_summaries(analysis),
            assignment: assignment(analysis, res),
        },
    )
}

pub fn metrics(cfg: &RunConfig, res: &Resources) -> Result<(IngestStats, Analysis)> {
    let ingest = run_ingest(cfg, res, false)?;
    let stats = ingest.stats.clone();
    let analysis = analyse(ingest, cfg, res)?;
    write_metric_outputs(&stats, &analysis, cfg, res)?;
    Ok((stats, analysis))
}

pub fn space(cfg: &RunConfig, res: &Resources) -> Result<Spaces> {
    let ingest = run_ingest(cfg, res, false)?;
    let analysis = analyse(ingest, cfg, res)?;
    let spaces = build_spaces(&analysis, cfg, res)?;
    write_spaces(&spaces, &cfg.graph_formats()?, &cfg.out.join("graphs"))?;
    Ok(spaces)
}

/// Runs every stage once and writes all stage outputs plus the report.
/// Stage timings go to stderr only, keeping the output tree reproducible.
pub fn report(cfg: &RunConfig, res: &Resources) -> Result<RunReport> {
    let t0 = Instant::now();
    let ingest = run_ingest(cfg, res, true)?;
    let stats = ingest.stats.clone();
    let t1 = Instant::now();
    let analysis = analyse(ingest, cfg, res)?;
    write_metric_outputs(&stats, &analysis, cfg, res)?;
    let t2 = Instant::now();
    let spaces = build_spaces(&analysis, cfg, res)?;
    write_spaces(&spaces, &cfg.graph_formats()?, &cfg.out.join("graphs"))?;
    let t3 = Instant::now();
    let report = build_report(&stats, &analysis, &spaces, cfg, res);
    write_report(&report, &cfg.out)?;
    let t4 = Instant::now();
    eprintln!(
        "timing: ingest {:.3}s, metrics {:.3}s, space {:.3}s, report {:.3}s",
        (t1 - t0).as_secs_f64(),
        (t2 - t1).as_secs_f64(),
        (t3 - t2).as_secs_f64(),
        (t4 - t3).as_secs_f64()
    );
    Ok(report)
}
