//! Streaming ingestion: parse, classify, map fields and aggregate per window.
//!
//! Records are read sequentially in chunks. Classification and IPC mapping
//! run in parallel over a chunk; aggregation then folds the chunk in input
//! order, so the result does not depend on the thread count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;

use rayon::prelude::*;
use techspace::corpus::{field_names, ipc_subclass, parse_corpus, KeywordMatch, PatentRecord, RowDiagnostic, Window};
use techspace::matrix::{CooccurrenceBuilder, OccurrenceBuilder};

use crate::config::{Resources, RunConfig};
use crate::error::{CliError, Result};

const CHUNK: usize = 8192;
const KEPT_DIAGNOSTICS: usize = 10_000;

pub const AI_ROW: &str = "AI";
pub const NON_AI_ROW: &str = "non-AI";

/// Corpus-wide counts. `rows = parsed + rejected` and
/// `parsed = used + out_of_window + no_countries + no_fields`.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct IngestStats {
    pub rows: u64,
    pub parsed: u64,
    pub rejected: u64,
    pub ai: u64,
    pub out_of_window: u64,
    pub no_countries: u64,
    pub no_fields: u64,
    pub used: u64,
    pub ai_used: u64,
    /// IPC symbols without a concordance entry, counted per occurrence.
    pub unmapped_symbols: u64,
    #[serde(skip)]
    pub unmapped: BTreeMap<String, u64>,
    #[serde(skip)]
    pub keyword_hits: Vec<u64>,
    #[serde(skip)]
    pub diagnostics: Vec<(String, RowDiagnostic)>,
}

impl IngestStats {
    pub fn skipped(&self) -> u64 {
        self.rejected + self.out_of_window + self.no_countries + self.no_fields
    }
}

/// Builders for one window. Field-level builders carry the 35-field
/// universe even where a field never occurs.
#[derive(Debug, Clone)]
pub struct WindowAggregates {
    pub window: Window,
    pub records: u64,
    pub ai_records: u64,
    pub country_field: OccurrenceBuilder,
    pub country_field_ai: OccurrenceBuilder,
    /// Rows `AI` and `non-AI`.
    pub corpus_field: OccurrenceBuilder,
    pub country_subclass: OccurrenceBuilder,
    pub country_subclass_ai: OccurrenceBuilder,
    pub cooc: CooccurrenceBuilder,
    pub cooc_ai: CooccurrenceBuilder,
    /// One per configured country.
    pub cooc_country: BTreeMap<String, CooccurrenceBuilder>,
    /// AI records per inventor country, whole counting.
    pub ai_by_country: BTreeMap<String, u64>,
    /// AI records per IPC subclass.
    pub ai_by_subclass: BTreeMap<String, u64>,
    /// AI records with at least one configured country.
    pub ai_in_countries: u64,
}

impl WindowAggregates {
    fn new(window: Window, cfg: &RunConfig) -> Self {
        let fields = field_names();
        WindowAggregates {
            window,
            records: 0,
            ai_records: 0,
            country_field: OccurrenceBuilder::with_technologies(cfg.counting, &fields),
            country_field_ai: OccurrenceBuilder::with_technologies(cfg.counting, &fields),
            corpus_field: OccurrenceBuilder::with_technologies(cfg.counting, &fields),
            country_subclass: OccurrenceBuilder::new(cfg.counting),
            country_subclass_ai: OccurrenceBuilder::new(cfg.counting),
            cooc: CooccurrenceBuilder::with_technologies(&fields),
            cooc_ai: CooccurrenceBuilder::with_technologies(&fields),
            cooc_country: cfg
                .countries
                .iter()
                .map(|c| (c.clone(), CooccurrenceBuilder::with_technologies(&fields)))
                .collect(),
            ai_by_country: BTreeMap::new(),
            ai_by_subclass: BTreeMap::new(),
            ai_in_countries: 0,
        }
    }

    fn add(&mut self, record: &PatentRecord, prep: &Prepared, countries: &[String]) {
        let ai = prep.matched.is_ai();
        self.records += 1;
        self.country_field.add(&record.countries, &prep.fields);
        self.country_subclass.add(&record.countries, &prep.subclasses);
        self.corpus_field
            .add(&[if ai { AI_ROW } else { NON_AI_ROW }], &prep.fields);
        self.cooc.add(&prep.fields);
        for c in &record.countries {
            if let Some(b) = self.cooc_country.get_mut(c) {
                b.add(&prep.fields);
            }
        }
        if ai {
            self.ai_records += 1;
            self.country_field_ai.add(&record.countries, &prep.fields);
            self.country_subclass_ai.add(&record.countries, &prep.subclasses);
            self.cooc_ai.add(&prep.fields);
            for c in &record.countries {
                *self.ai_by_country.entry(c.clone()).or_insert(0) += 1;
            }
            for s in &prep.subclasses {
                *self.ai_by_subclass.entry(s.clone()).or_insert(0) += 1;
            }
            if record.countries.iter().any(|c| countries.binary_search(c).is_ok()) {
                self.ai_in_countries += 1;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ingest {
    pub stats: IngestStats,
    pub windows: Vec<WindowAggregates>,
}

/// Per-record work that needs no shared state.
struct Prepared {
    matched: KeywordMatch,
    fields: Vec<&'static str>,
    subclasses: Vec<String>,
    unmapped: Vec<String>,
}

fn prepare(record: &PatentRecord, res: &Resources) -> Prepared {
    let matched = res.keywords.match_record(record);
    let mapped = res.concordance.map_codes(record.ipc_codes.iter().map(String::as_str));
    let mut subclasses: Vec<String> = record
        .ipc_codes
        .iter()
        .filter_map(|c| ipc_subclass(c))
        .map(str::to_string)
        .collect();
    subclasses.dedup();
    Prepared {
        matched,
        fields: mapped.fields.iter().map(|f| f.name()).collect(),
        subclasses,
        unmapped: mapped.unmapped.iter().map(|s| s.to_string()).collect(),
    }
}

/// Thread pool honouring `TECHSPACE_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("TECHSPACE_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("TECHSPACE_THREADS={v:?} is not a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Config(e.to_string()))
}

/// Reads every input once. `visit` sees each parsed record, in input order,
/// with its keyword match.
pub fn ingest(
    cfg: &RunConfig,
    res: &Resources,
    mut visit: impl FnMut(&PatentRecord, &KeywordMatch) -> Result<()>,
) -> Result<Ingest> {
    let pool = thread_pool()?;
    let mut stats = IngestStats {
        keyword_hits: vec![0; res.keywords.len()],
        ..Default::default()
    };
    let mut windows: Vec<WindowAggregates> = cfg
        .windows
        .windows()
        .iter()
        .map(|w| WindowAggregates::new(w.clone(), cfg))
        .collect();

    for path in &cfg.inputs {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let reader = parse_corpus(BufReader::with_capacity(1 << 20, file), &cfg.columns)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let source = path.display().to_string();
        let mut chunk: Vec<PatentRecord> = Vec::with_capacity(CHUNK);
        let mut rows = reader.peekable();
        while rows.peek().is_some() {
            chunk.clear();
            while chunk.len() < CHUNK {
                match rows.next() {
                    Some(Ok(r)) => chunk.push(r),
                    Some(Err(d)) => {
                        stats.rows += 1;
                        stats.rejected += 1;
                        if stats.diagnostics.len() < KEPT_DIAGNOSTICS {
                            log::warn!("{source}:{d}");
                            stats.diagnostics.push((source.clone(), d));
                        }
                    }
                    None => break,
                }
            }
            let prepared: Vec<Prepared> = pool.install(|| chunk.par_iter().map(|r| prepare(r, res)).collect());
            for (record, prep) in chunk.iter().zip(&prepared) {
                fold(&mut stats, &mut windows, cfg, record, prep);
                visit(record, &prep.matched)?;
            }
        }
    }
    Ok(Ingest { stats, windows })
}

fn fold(
    stats: &mut IngestStats,
    windows: &mut [WindowAggregates],
    cfg: &RunConfig,
    record: &PatentRecord,
    prep: &Prepared,
) {
    stats.rows += 1;
    stats.parsed += 1;
    let ai = prep.matched.is_ai();
    if ai {
        stats.ai += 1;
    }
    for &h in &prep.matched.hits {
        stats.keyword_hits[h] += 1;
    }
    stats.unmapped_symbols += prep.unmapped.len() as u64;
    for s in &prep.unmapped {
        *stats.unmapped.entry(s.clone()).or_insert(0) += 1;
    }
    let Some(w) = cfg.windows.index_of(record.year) else {
        stats.out_of_window += 1;
        return;
    };
    if record.countries.is_empty() {
        stats.no_countries += 1;
        return;
    }
    if prep.fields.is_empty() {
        stats.no_fields += 1;
        return;
    }
    stats.used += 1;
    if ai {
        stats.ai_used += 1;
    }
    windows[w].add(record, prep, &cfg.countries);
}
