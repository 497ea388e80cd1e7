//! Consolidated run report and plot-ready tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use techspace::corpus::Window;
use techspace::matrix::Counting;
use techspace::metrics::CategoryPairs;

use crate::analysis::{Analysis, Specialisation};
use crate::config::{Resources, RunConfig};
use crate::error::{CliError, Result};
use crate::graphs::Spaces;
use crate::ingest::IngestStats;
use crate::output::{fmt_value, write_json, AtomicFile};

pub const REPORT_SCHEMA: &str = include_str!("../data/report.schema.json");
pub const OVERALL: &str = "Overall";
pub const COUNTRY_MEAN: &str = "mean";
const TOP_SUBCLASSES: usize = 10;
const TOP_UNMAPPED: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub inputs: Vec<String>,
    pub keyword_rules: usize,
    pub windows: Vec<Window>,
    pub counting: Counting,
    pub morc_steps: usize,
    pub mort_steps: usize,
    pub backbone_k: usize,
    pub threshold: f64,
    pub countries: Vec<String>,
    pub category_pairs: CategoryPairs,
    pub positive_pairs_only: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counts {
    pub total: u64,
    pub used: u64,
    pub skipped: u64,
    pub rejected: u64,
    pub out_of_window: u64,
    pub no_countries: u64,
    pub no_fields: u64,
    pub ai: u64,
    pub ai_used: u64,
    pub unmapped_ipc: u64,
    pub unmapped_ipc_distinct: u64,
}

impl Counts {
    pub fn from_stats(s: &IngestStats) -> Self {
        Counts {
            total: s.rows,
            used: s.used,
            skipped: s.skipped(),
            rejected: s.rejected,
            out_of_window: s.out_of_window,
            no_countries: s.no_countries,
            no_fields: s.no_fields,
            ai: s.ai,
            ai_used: s.ai_used,
            unmapped_ipc: s.unmapped_symbols,
            unmapped_ipc_distinct: s.unmapped.len() as u64,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowSummary {
    pub label: String,
    pub start: i32,
    pub end: i32,
    pub records: u64,
    pub ai_records: u64,
    pub ai_in_countries: u64,
    pub ai_specialised: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Assignment {
    pub core: Vec<String>,
    pub related: Vec<String>,
    pub surrounding: Vec<String>,
    /// Categories as configured, for comparison with the detected sets.
    pub configured: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Shares {
    /// AI records in the last window over AI records in all windows.
    pub ai_last_window: Option<f64>,
    /// AI records with an inventor in a configured country.
    pub ai_in_countries: Option<f64>,
    pub top_subclasses: Vec<String>,
    /// Share of AI subclass assignments falling in the top subclasses.
    pub top_subclass_concentration: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BackboneReport {
    pub nodes: usize,
    pub edges: usize,
    pub tree_edges: usize,
    pub extra_edges: usize,
    pub components: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Count {
    pub label: String,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CategoryTrend {
    pub window: String,
    pub category: String,
    pub relatedness: Option<f64>,
    pub complexity: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountryCategoryTrend {
    pub window: String,
    pub country: String,
    pub category: String,
    pub relatedness: Option<f64>,
    pub complexity: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountryAiCount {
    pub window: String,
    pub country: String,
    pub ai_records: u64,
    pub log10_ai_records: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubclassRca {
    pub window: String,
    pub subclass: String,
    pub country: String,
    pub scope: String,
    pub rca_log10: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tables {
    pub ai_categories: Vec<CategoryTrend>,
    pub country_categories: Vec<CountryCategoryTrend>,
    pub country_ai_counts: Vec<CountryAiCount>,
    pub subclass_rca: Vec<SubclassRca>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub settings: Settings,
    pub counts: Counts,
    pub windows: Vec<WindowSummary>,
    pub assignment: Assignment,
    pub shares: Shares,
    pub backbone: Option<BackboneReport>,
    pub keyword_hits: Vec<Count>,
    pub unmapped_ipc: Vec<Count>,
    pub tables: Tables,
}

/// Stage summary written by `metrics`; a subset of the full report.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsSummary {
    pub counts: Counts,
    pub windows: Vec<WindowSummary>,
    pub assignment: Assignment,
}

fn ratio(a: u64, b: u64) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

pub fn window_summaries(analysis: &Analysis) -> Vec<WindowSummary> {
    analysis
        .windows
        .iter()
        .map(|w| WindowSummary {
            label: w.window.label.clone(),
            start: w.window.start,
            end: w.window.end,
            records: w.records,
            ai_records: w.ai_records,
            ai_in_countries: w.ai_in_countries,
            ai_specialised: w.ai_specialised().into_iter().collect(),
        })
        .collect()
}

pub fn assignment(analysis: &Analysis, res: &Resources) -> Assignment {
    Assignment {
        core: analysis.core.core.iter().cloned().collect(),
        related: analysis.core.related.iter().cloned().collect(),
        surrounding: analysis.surrounding.iter().cloned().collect(),
        configured: res
            .categories
            .specs()
            .iter()
            .map(|s| (s.name.clone(), s.members.clone()))
            .collect(),
    }
}

/// Most frequent AI subclasses over all windows, ties broken by label.
pub fn top_subclasses(analysis: &Analysis, n: usize) -> (Vec<String>, Option<f64>) {
    let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
    for w in &analysis.windows {
        for (s, c) in &w.ai_by_subclass {
            *totals.entry(s).or_insert(0) += c;
        }
    }
    let all: u64 = totals.values().sum();
    let mut ranked: Vec<(&str, u64)> = totals.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked.truncate(n);
    let top: u64 = ranked.iter().map(|(_, c)| c).sum();
    (
        ranked.into_iter().map(|(s, _)| s.to_string()).collect(),
        ratio(top, all),
    )
}

fn log10_cell(s: &Specialisation, entity: &str, tech: &str) -> Option<f64> {
    let l = s.log10.as_ref()?;
    let e = l.entity_index(entity)?;
    let t = s.occurrence.technology_index(tech)?;
    l.get(e, t)
}

fn mean(values: &[Option<f64>]) -> Option<f64> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
}

pub fn tables(analysis: &Analysis, cfg: &RunConfig) -> Tables {
    let mut ai_categories = Vec::new();
    let mut country_categories = Vec::new();
    let mut country_ai_counts = Vec::new();
    let mut subclass_rca = Vec::new();
    let (top, _) = top_subclasses(analysis, TOP_SUBCLASSES);

    for w in &analysis.windows {
        let window = &w.window.label;
        ai_categories.push(CategoryTrend {
            window: window.clone(),
            category: OVERALL.into(),
            relatedness: w.ai.overall,
            complexity: w.ai.total_complexity,
        });
        for c in &w.ai.categories {
            ai_categories.push(CategoryTrend {
                window: window.clone(),
                category: c.name.clone(),
                relatedness: c.relatedness,
                complexity: c.complexity,
            });
        }
        for c in &w.countries {
            country_categories.push(CountryCategoryTrend {
                window: window.clone(),
                country: c.country.clone(),
                category: OVERALL.into(),
                relatedness: c.overall,
                complexity: c.complexity,
            });
            for cat in &c.categories {
                country_categories.push(CountryCategoryTrend {
                    window: window.clone(),
                    country: c.country.clone(),
                    category: cat.name.clone(),
                    relatedness: cat.relatedness,
                    complexity: cat.complexity,
                });
            }
        }
        for country in &cfg.countries {
            let n = w.ai_by_country.get(country).copied().unwrap_or(0);
            country_ai_counts.push(CountryAiCount {
                window: window.clone(),
                country: country.clone(),
                ai_records: n,
                log10_ai_records: (n > 0).then(|| (n as f64).log10()),
            });
        }
        for subclass in &top {
            for (scope, spec) in [("all", &w.subclass_all), ("ai", &w.subclass_ai)] {
                let values: Vec<Option<f64>> = cfg.countries.iter().map(|c| log10_cell(spec, c, subclass)).collect();
                for (country, v) in cfg.countries.iter().zip(&values) {
                    subclass_rca.push(SubclassRca {
                        window: window.clone(),
                        subclass: subclass.clone(),
                        country: country.clone(),
                        scope: scope.into(),
                        rca_log10: *v,
                    });
                }
                subclass_rca.push(SubclassRca {
                    window: window.clone(),
                    subclass: subclass.clone(),
                    country: COUNTRY_MEAN.into(),
                    scope: scope.into(),
                    rca_log10: mean(&values),
                });
            }
        }
    }
    Tables {
        ai_categories,
        country_categories,
        country_ai_counts,
        subclass_rca,
    }
}

pub fn build_report(
    stats: &IngestStats,
    analysis: &Analysis,
    spaces: &Spaces,
    cfg: &RunConfig,
    res: &Resources,
) -> RunReport {
    let windows = window_summaries(analysis);
    let ai_windowed: u64 = windows.iter().map(|w| w.ai_records).sum();
    let ai_in_countries: u64 = windows.iter().map(|w| w.ai_in_countries).sum();
    let (top, concentration) = top_subclasses(analysis, TOP_SUBCLASSES);
    let mut unmapped: Vec<Count> = stats
        .unmapped
        .iter()
        .map(|(s, &c)| Count {
            label: s.clone(),
            count: c,
        })
        .collect();
    unmapped.sort_by(|a, b| b.count.cmp(&a.count).then(a.label.cmp(&b.label)));
    unmapped.truncate(TOP_UNMAPPED);

    RunReport {
        tool: "techspace".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        settings: Settings {
            inputs: cfg.inputs.iter().map(|p| p.display().to_string()).collect(),
            keyword_rules: res.keywords.len(),
            windows: cfg.windows.windows().to_vec(),
            counting: cfg.counting,
            morc_steps: cfg.morc_steps,
            mort_steps: cfg.mort_steps,
            backbone_k: cfg.backbone_k,
            threshold: cfg.threshold,
            countries: cfg.countries.clone(),
            category_pairs: cfg.category_pairs,
            positive_pairs_only: cfg.positive_pairs_only,
        },
        counts: Counts::from_stats(stats),
        shares: Shares {
            ai_last_window: windows.last().and_then(|w| ratio(w.ai_records, ai_windowed)),
            ai_in_countries: ratio(ai_in_countries, ai_windowed),
            top_subclasses: top,
            top_subclass_concentration: concentration,
        },
        windows,
        assignment: assignment(analysis, res),
        backbone: spaces.backbone.map(|b| BackboneReport {
            nodes: spaces.global.nodes.len(),
            edges: spaces.global.edges.len(),
            tree_edges: b.tree_edges,
            extra_edges: b.extra_edges,
            components: b.components,
        }),
        keyword_hits: res
            .keywords
            .rules()
            .iter()
            .zip(&stats.keyword_hits)
            .map(|(r, &c)| Count {
                label: r.label.clone(),
                count: c,
            })
            .collect(),
        unmapped_ipc: unmapped,
        tables: tables(analysis, cfg),
    }
}

fn pct(v: Option<f64>) -> String {
    v.map(|x| format!("{:.1}%", 100.0 * x)).unwrap_or_else(|| "NA".into())
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "NA".into())
}

pub fn render_text(r: &RunReport) -> String {
    let mut s = String::new();
    let c = &r.counts;
    let _ = writeln!(s, "techspace {} run report", r.version);
    let _ = writeln!(s);
    let _ = writeln!(s, "records        {}", c.total);
    let _ = writeln!(s, "  used         {}", c.used);
    let _ = writeln!(
        s,
        "  skipped      {} (rejected {}, outside windows {}, no country {}, no field {})",
        c.skipped, c.rejected, c.out_of_window, c.no_countries, c.no_fields
    );
    let _ = writeln!(s, "AI records     {} ({} used)", c.ai, c.ai_used);
    let _ = writeln!(
        s,
        "unmapped IPC   {} ({} distinct)",
        c.unmapped_ipc, c.unmapped_ipc_distinct
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "window  years      records  AI  specialised fields");
    for w in &r.windows {
        let _ = writeln!(
            s,
            "{:<7} {}-{}  {:>7}  {}  {}",
            w.label,
            w.start,
            w.end,
            w.records,
            w.ai_records,
            w.ai_specialised.join("; ")
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "AI in last window        {}", pct(r.shares.ai_last_window));
    let _ = writeln!(
        s,
        "AI in {:<18} {}",
        r.settings.countries.join(","),
        pct(r.shares.ai_in_countries)
    );
    let _ = writeln!(
        s,
        "top {} AI subclasses      {} ({})",
        r.shares.top_subclasses.len(),
        pct(r.shares.top_subclass_concentration),
        r.shares.top_subclasses.join(", ")
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "core fields     {}", r.assignment.core.join("; "));
    let _ = writeln!(s, "related fields  {}", r.assignment.related.join("; "));
    let _ = writeln!(s, "surrounding     {}", r.assignment.surrounding.join("; "));
    if let Some(b) = &r.backbone {
        let _ = writeln!(
            s,
            "backbone        {} of {} edges on {} nodes, {} components",
            b.tree_edges + b.extra_edges,
            b.edges,
            b.nodes,
            b.components
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "AI relatedness and complexity by category");
    for t in &r.tables.ai_categories {
        let _ = writeln!(
            s,
            "  {:<4} {:<12} {:>10} {:>10}",
            t.window,
            t.category,
            num(t.relatedness),
            num(t.complexity)
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "country relatedness and complexity");
    for t in r.tables.country_categories.iter().filter(|t| t.category == OVERALL) {
        let _ = writeln!(
            s,
            "  {:<4} {:<3} {:>10} {:>10}",
            t.window,
            t.country,
            num(t.relatedness),
            num(t.complexity)
        );
    }
    s
}

fn write_table<T: Serialize>(
    path: &Path,
    rows: &[T],
    header: &[&str],
    cells: impl Fn(&T) -> Vec<String>,
) -> Result<()> {
    let file = AtomicFile::create(path)?;
    let mut w = csv::Writer::from_writer(file);
    let err = |e: csv::Error| CliError::Core(techspace::Error::Csv(e));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(cells(r)).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?.commit()
}

pub fn write_tables(t: &Tables, dir: &Path) -> Result<()> {
    write_table(
        &dir.join("ai_category_trends.csv"),
        &t.ai_categories,
        &["window", "category", "relatedness", "complexity"],
        |r| {
            vec![
                r.window.clone(),
                r.category.clone(),
                fmt_value(r.relatedness),
                fmt_value(r.complexity),
            ]
        },
    )?;
    write_table(
        &dir.join("country_category_trends.csv"),
        &t.country_categories,
        &["window", "country", "category", "relatedness", "complexity"],
        |r| {
            vec![
                r.window.clone(),
                r.country.clone(),
                r.category.clone(),
                fmt_value(r.relatedness),
                fmt_value(r.complexity),
            ]
        },
    )?;
    write_table(
        &dir.join("country_ai_counts.csv"),
        &t.country_ai_counts,
        &["window", "country", "ai_records", "log10_ai_records"],
        |r| {
            vec![
                r.window.clone(),
                r.country.clone(),
                r.ai_records.to_string(),
                fmt_value(r.log10_ai_records),
            ]
        },
    )?;
    write_table(
        &dir.join("subclass_rca.csv"),
        &t.subclass_rca,
        &["window", "subclass", "country", "scope", "rca_log10"],
        |r| {
            vec![
                r.window.clone(),
                r.subclass.clone(),
                r.country.clone(),
                r.scope.clone(),
                fmt_value(r.rca_log10),
            ]
        },
    )
}

pub fn write_report(report: &RunReport, dir: &Path) -> Result<()> {
    write_json(dir.join("report.json"), report)?;
    crate::output::write_atomic(dir.join("report.txt"), render_text(report).as_bytes())?;
    write_tables(&report.tables, &dir.join("tables"))
}
