//! Metric tables and matrix files.

use std::io::Write;
use std::path::Path;

use techspace::matrix::{CooccurrenceMatrix, OccurrenceMatrix};
use techspace::metrics::{ComplexityVector, RelatednessMatrix};

use crate::analysis::{Analysis, CategoryRow, FieldScope, Specialisation, SCOPE_AI_CORPUS};
use crate::error::{CliError, Result};
use crate::output::{fmt_value, write_json, AtomicFile};

pub const METRICS_HEADER: [&str; 7] = ["window", "scope", "axis", "label", "metric", "iteration", "value"];

struct MetricSink<W: Write> {
    out: csv::Writer<W>,
    window: String,
    scope: String,
}

impl<W: Write> MetricSink<W> {
    fn row(
        &mut self,
        axis: &str,
        label: &str,
        metric: &str,
        iteration: Option<usize>,
        value: Option<f64>,
    ) -> Result<()> {
        let it = iteration.map(|n| n.to_string()).unwrap_or_default();
        self.out
            .write_record([&self.window, &self.scope, axis, label, metric, &it, &fmt_value(value)])
            .map_err(csv_err)
    }

    fn at(&mut self, window: &str, scope: &str) -> &mut Self {
        self.window = window.to_string();
        self.scope = scope.to_string();
        self
    }

    /// RCA, its binarisation and log10 form per cell. With `only_present`,
    /// cells without counts are left out.
    fn specialisation(&mut self, s: &Specialisation, prefix: &str, only_present: bool) -> Result<()> {
        let (Some(r), Some(l), Some(b)) = (&s.rca, &s.log10, &s.binary) else {
            return Ok(());
        };
        let m = &s.occurrence;
        for (e, entity) in m.entities().iter().enumerate() {
            for (t, tech) in m.technologies().iter().enumerate() {
                if only_present && m.get(e, t) == 0.0 {
                    continue;
                }
                let label = format!("{entity}|{tech}");
                self.row("cell", &label, &format!("{prefix}rca"), None, r.get(e, t))?;
                let bin = if b.get(e, t) { 1.0 } else { 0.0 };
                self.row("cell", &label, &format!("{prefix}rca_binary"), None, Some(bin))?;
                self.row("cell", &label, &format!("{prefix}rca_log10"), None, l.get(e, t))?;
            }
        }
        Ok(())
    }

    fn complexity(&mut self, vectors: &[ComplexityVector], axis: &str, metric: &str) -> Result<()> {
        for v in vectors {
            for (label, value) in v.labels.iter().zip(&v.values) {
                self.row(axis, label, metric, Some(v.depth), *value)?;
            }
        }
        Ok(())
    }

    fn pairs(&mut self, phi: Option<&RelatednessMatrix>) -> Result<()> {
        let Some(phi) = phi else { return Ok(()) };
        let t = phi.technologies();
        for (i, j, v) in phi.pairs() {
            self.row("pair", &format!("{}|{}", t[i], t[j]), "relatedness", None, Some(v))?;
        }
        Ok(())
    }

    fn categories(&mut self, rows: &[CategoryRow], complexity_depth: usize) -> Result<()> {
        for c in rows {
            self.row("category", &c.name, "category_relatedness", None, c.relatedness)?;
        }
        for c in rows {
            self.row(
                "category",
                &c.name,
                "category_complexity",
                Some(complexity_depth),
                c.complexity,
            )?;
        }
        Ok(())
    }

    fn field_scope(&mut self, s: &FieldScope, mort: usize) -> Result<()> {
        self.specialisation(&s.spec, "", false)?;
        self.complexity(&s.kc, "entity", "morc")?;
        self.complexity(&s.kt, "technology", "mort")?;
        self.pairs(s.phi.as_ref())?;
        let scope = self.scope.clone();
        self.row("scope", &scope, "overall_relatedness", None, s.overall)?;
        self.row("scope", &scope, "total_complexity", Some(mort), s.total_complexity)?;
        self.categories(&s.categories, mort)
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Core(techspace::Error::Csv(e))
}

/// Writes the long metric table: one row per (window, scope, axis, label,
/// metric, iteration).
pub fn write_metrics(analysis: &Analysis, morc: usize, mort: usize, path: &Path) -> Result<()> {
    let file = AtomicFile::create(path)?;
    let mut sink = MetricSink {
        out: csv::Writer::from_writer(file),
        window: String::new(),
        scope: String::new(),
    };
    sink.out.write_record(METRICS_HEADER).map_err(csv_err)?;
    for w in &analysis.windows {
        let label = w.window.label.as_str();
        for scope in [&w.all, &w.ai] {
            sink.at(label, &scope.scope).field_scope(scope, mort)?;
        }
        sink.at(label, SCOPE_AI_CORPUS).specialisation(&w.corpus, "", false)?;
        for c in &w.countries {
            let s = sink.at(label, &c.country);
            s.pairs(c.phi.as_ref())?;
            s.row("scope", &c.country, "overall_relatedness", None, c.overall)?;
            s.row("scope", &c.country, "country_complexity", Some(morc), c.complexity)?;
            for spec in &c.specialised {
                s.row("technology", spec, "specialised", None, Some(1.0))?;
            }
            s.categories(&c.categories, morc)?;
        }
        sink.at(label, &w.subclass_all.occurrence.meta().scope)
            .specialisation(&w.subclass_all, "subclass_", true)?;
        sink.at(label, &w.subclass_ai.occurrence.meta().scope)
            .specialisation(&w.subclass_ai, "subclass_", true)?;
    }
    let g = &analysis.global;
    sink.at(&g.spec.occurrence.meta().window, &g.scope)
        .field_scope(g, mort)?;

    let span: Vec<&str> = analysis.windows.iter().map(|w| w.window.label.as_str()).collect();
    let core_rows = sink.at(&span.join("+"), SCOPE_AI_CORPUS);
    for f in techspace::corpus::field_names() {
        let core = analysis.core.core.contains(&f);
        let related = analysis.core.related.contains(&f);
        core_rows.row("technology", &f, "core", None, Some(if core { 1.0 } else { 0.0 }))?;
        core_rows.row("technology", &f, "related", None, Some(if related { 1.0 } else { 0.0 }))?;
    }

    let file = sink.out.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
    file.commit()
}

fn write_occurrence(dir: &Path, m: &OccurrenceMatrix, kind: &str) -> Result<()> {
    let meta = m.meta();
    let stem = format!("{}_{}_{kind}", meta.window, meta.scope);
    let path = dir.join(format!("{stem}.csv"));
    let mut f = AtomicFile::create(&path)?;
    m.write_long_csv(&mut f)?;
    f.commit()?;
    write_json(dir.join(format!("{stem}.json")), &m.sidecar())
}

fn write_cooccurrence(dir: &Path, m: &CooccurrenceMatrix) -> Result<()> {
    let meta = m.meta();
    let stem = format!("{}_{}_cooccurrence", meta.window, meta.scope);
    let path = dir.join(format!("{stem}.csv"));
    let mut f = AtomicFile::create(&path)?;
    m.write_long_csv(&mut f)?;
    f.commit()?;
    write_json(dir.join(format!("{stem}.json")), &m.sidecar())
}

/// Every matrix behind the metrics, as long CSV plus a JSON sidecar.
pub fn write_matrices(analysis: &Analysis, dir: &Path) -> Result<()> {
    for w in &analysis.windows {
        write_occurrence(dir, &w.all.spec.occurrence, "country-field")?;
        write_occurrence(dir, &w.ai.spec.occurrence, "country-field")?;
        write_occurrence(dir, &w.corpus.occurrence, "corpus-field")?;
        write_occurrence(dir, &w.subclass_all.occurrence, "country-subclass")?;
        write_occurrence(dir, &w.subclass_ai.occurrence, "country-subclass")?;
        write_cooccurrence(dir, &w.all.cooccurrence)?;
        write_cooccurrence(dir, &w.ai.cooccurrence)?;
        for c in &w.countries {
            write_cooccurrence(dir, &c.cooccurrence)?;
        }
    }
    write_occurrence(dir, &analysis.global.spec.occurrence, "country-field")?;
    write_cooccurrence(dir, &analysis.global.cooccurrence)
}
