//! Entity × technology occurrence counts and technology co-occurrence counts.
//!
//! Both matrices are assembled through builders that intern labels and accept
//! one record at a time, so a corpus can be streamed without materialising
//! the records. Finished matrices are immutable and carry sorted labels;
//! builders can be merged to combine shards.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{ipc_subclass, FieldConcordance, PatentRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Counting {
    /// Every (entity, technology) pair on a record adds 1.
    #[default]
    Whole,
    /// A record spreads a total weight of 1 evenly over its entities and,
    /// within an entity, evenly over its technologies.
    Fractional,
}

impl std::str::FromStr for Counting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whole" => Ok(Counting::Whole),
            "fractional" => Ok(Counting::Fractional),
            other => Err(Error::Config(format!("unknown counting mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for Counting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Counting::Whole => "whole",
            Counting::Fractional => "fractional",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TechLevel {
    Field,
    Subclass,
}

/// Rows of an occurrence matrix: inventor countries, or a single label
/// standing for a whole corpus slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Axis {
    Country,
    Corpus(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub window: String,
    pub scope: String,
    pub counting: Counting,
}

#[derive(Debug, Clone, Default)]
struct Interner {
    index: HashMap<String, u32>,
    labels: Vec<String>,
}

impl Interner {
    fn with_labels<S: AsRef<str>>(labels: &[S]) -> Self {
        let mut i = Interner::default();
        for l in labels {
            i.intern(l.as_ref());
        }
        i
    }

    fn intern(&mut self, label: &str) -> u32 {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len() as u32;
        self.index.insert(label.to_string(), i);
        self.labels.push(label.to_string());
        i
    }

    /// Final label order and the old → new index map. Preset labels keep
    /// their order, labels added later follow sorted.
    fn finish(self, preset: usize) -> (Vec<String>, Vec<u32>) {
        let mut order: Vec<u32> = (0..self.labels.len() as u32).collect();
        order[preset..].sort_by(|&a, &b| self.labels[a as usize].cmp(&self.labels[b as usize]));
        let mut remap = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let mut labels = self.labels;
        let sorted = order.iter().map(|&o| std::mem::take(&mut labels[o as usize])).collect();
        (sorted, remap)
    }
}

fn distinct_indices<S: AsRef<str>>(interner: &mut Interner, labels: &[S], out: &mut Vec<u32>) {
    out.clear();
    out.extend(labels.iter().map(|l| interner.intern(l.as_ref())));
    out.sort_unstable();
    out.dedup();
}

/// Accumulates an [`OccurrenceMatrix`].
#[derive(Debug, Clone)]
pub struct OccurrenceBuilder {
    counting: Counting,
    entities: Interner,
    technologies: Interner,
    preset_technologies: usize,
    rows: Vec<Vec<f64>>,
    scratch_e: Vec<u32>,
    scratch_t: Vec<u32>,
}

impl OccurrenceBuilder {
    pub fn new(counting: Counting) -> Self {
        Self::with_technologies::<&str>(counting, &[])
    }

    /// Starts from a fixed technology universe; its order is kept in the
    /// finished matrix even for technologies that never occur.
    pub fn with_technologies<S: AsRef<str>>(counting: Counting, technologies: &[S]) -> Self {
        OccurrenceBuilder {
            counting,
            entities: Interner::default(),
            technologies: Interner::with_labels(technologies),
            preset_technologies: technologies.len(),
            rows: Vec::new(),
            scratch_e: Vec::new(),
            scratch_t: Vec::new(),
        }
    }

    /// Adds one record. Repeated labels within a record count once; a record
    /// without entities or technologies contributes nothing.
    pub fn add<E: AsRef<str>, T: AsRef<str>>(&mut self, entities: &[E], technologies: &[T]) {
        let mut es = std::mem::take(&mut self.scratch_e);
        let mut ts = std::mem::take(&mut self.scratch_t);
        distinct_indices(&mut self.entities, entities, &mut es);
        distinct_indices(&mut self.technologies, technologies, &mut ts);
        if !es.is_empty() && !ts.is_empty() {
            let weight = match self.counting {
                Counting::Whole => 1.0,
                Counting::Fractional => 1.0 / (es.len() * ts.len()) as f64,
            };
            let width = self.technologies.labels.len();
            for &e in &es {
                let e = e as usize;
                if e >= self.rows.len() {
                    self.rows.resize_with(e + 1, Vec::new);
                }
                let row = &mut self.rows[e];
                if row.len() < width {
                    row.resize(width, 0.0);
                }
                for &t in &ts {
                    row[t as usize] += weight;
                }
            }
        }
        self.scratch_e = es;
        self.scratch_t = ts;
    }

    /// Adds every cell of `other`. Equivalent to having added `other`'s
    /// records to `self`.
    pub fn merge(&mut self, other: &OccurrenceBuilder) {
        assert_eq!(self.counting, other.counting, "cannot merge different counting modes");
        for (e, row) in other.rows.iter().enumerate() {
            let ei = self.entities.intern(&other.entities.labels[e]) as usize;
            for (t, &v) in row.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let ti = self.technologies.intern(&other.technologies.labels[t]) as usize;
                if ei >= self.rows.len() {
                    self.rows.resize_with(ei + 1, Vec::new);
                }
                let r = &mut self.rows[ei];
                if r.len() <= ti {
                    r.resize(ti + 1, 0.0);
                }
                r[ti] += v;
            }
        }
        // Entities known to `other` but without counts still become labels.
        for l in &other.entities.labels {
            self.entities.intern(l);
        }
        for l in &other.technologies.labels {
            self.technologies.intern(l);
        }
    }

    pub fn finish(self, window: impl Into<String>, scope: impl Into<String>) -> OccurrenceMatrix {
        let meta = MatrixMeta {
            window: window.into(),
            scope: scope.into(),
            counting: self.counting,
        };
        let (entities, e_map) = self.entities.finish(0);
        let (technologies, t_map) = self.technologies.finish(self.preset_technologies);
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); entities.len()];
        for (e, row) in self.rows.into_iter().enumerate() {
            let target = &mut rows[e_map[e] as usize];
            target.extend(
                row.into_iter()
                    .enumerate()
                    .filter(|&(_, v)| v != 0.0)
                    .map(|(t, v)| (t_map[t], v)),
            );
            target.sort_unstable_by_key(|&(t, _)| t);
        }
        OccurrenceMatrix::from_sparse_rows(entities, technologies, rows, meta)
    }
}

/// Sparse nonnegative counts of technologies per entity.
#[derive(Debug, Clone, PartialEq)]
pub struct OccurrenceMatrix {
    entities: Vec<String>,
    technologies: Vec<String>,
    rows: Vec<Vec<(u32, f64)>>,
    row_sums: Vec<f64>,
    col_sums: Vec<f64>,
    total: f64,
    meta: MatrixMeta,
}

impl OccurrenceMatrix {
    fn from_sparse_rows(
        entities: Vec<String>,
        technologies: Vec<String>,
        rows: Vec<Vec<(u32, f64)>>,
        meta: MatrixMeta,
    ) -> Self {
        let mut col_sums = vec![0.0; technologies.len()];
        let row_sums: Vec<f64> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(t, v)| {
                        col_sums[t as usize] += v;
                        v
                    })
                    .sum()
            })
            .collect();
        let total = row_sums.iter().sum();
        OccurrenceMatrix {
            entities,
            technologies,
            rows,
            row_sums,
            col_sums,
            total,
            meta,
        }
    }

    /// Builds a matrix from dense rows; zero cells are dropped.
    pub fn from_dense<S: AsRef<str>>(
        entities: &[S],
        technologies: &[S],
        values: &[Vec<f64>],
        meta: MatrixMeta,
    ) -> Result<Self> {
        let entities: Vec<String> = entities.iter().map(|s| s.as_ref().to_string()).collect();
        let technologies: Vec<String> = technologies.iter().map(|s| s.as_ref().to_string()).collect();
        check_unique(&entities, "entity")?;
        check_unique(&technologies, "technology")?;
        if values.len() != entities.len() || values.iter().any(|r| r.len() != technologies.len()) {
            return Err(Error::LabelMismatch("dense values do not match label counts".into()));
        }
        if values.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config("occurrence counts must be finite and nonnegative".into()));
        }
        let rows = values
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(t, &v)| (t as u32, v))
                    .collect()
            })
            .collect();
        Ok(Self::from_sparse_rows(entities, technologies, rows, meta))
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn technologies(&self) -> &[String] {
        &self.technologies
    }

    pub fn meta(&self) -> &MatrixMeta {
        &self.meta
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[f64] {
        &self.col_sums
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Nonzero cells of one entity, ascending by technology index.
    pub fn row(&self, entity: usize) -> &[(u32, f64)] {
        &self.rows[entity]
    }

    pub fn get(&self, entity: usize, technology: usize) -> f64 {
        let row = &self.rows[entity];
        row.binary_search_by_key(&(technology as u32), |&(t, _)| t)
            .map(|i| row[i].1)
            .unwrap_or(0.0)
    }

    pub fn entity_index(&self, label: &str) -> Option<usize> {
        self.entities.iter().position(|e| e == label)
    }

    pub fn technology_index(&self, label: &str) -> Option<usize> {
        self.technologies.iter().position(|t| t == label)
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0.0
    }

    /// Nonzero cells as `(entity, technology, value)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(e, row)| row.iter().map(move |&(t, v)| (e, t as usize, v)))
    }

    pub fn write_long_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["entity", "technology", "value"])?;
        for (e, t, v) in self.cells() {
            out.write_record([&self.entities[e], &self.technologies[t], &v.to_string()])?;
        }
        out.flush().map_err(|e| Error::io("<matrix>", e))?;
        Ok(())
    }

    pub fn sidecar(&self) -> MatrixSidecar {
        MatrixSidecar {
            kind: "occurrence".into(),
            entities: self.entities.clone(),
            technologies: self.technologies.clone(),
            window: self.meta.window.clone(),
            scope: self.meta.scope.clone(),
            counting: self.meta.counting,
            total: self.total,
        }
    }
}

fn check_unique(labels: &[String], what: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    match labels.iter().find(|l| !seen.insert(l.as_str())) {
        Some(dup) => Err(Error::LabelMismatch(format!("duplicate {what} label {dup:?}"))),
        None => Ok(()),
    }
}

/// JSON metadata written next to a long-format matrix CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSidecar {
    pub kind: String,
    pub entities: Vec<String>,
    pub technologies: Vec<String>,
    pub window: String,
    pub scope: String,
    pub counting: Counting,
    pub total: f64,
}

/// Technology labels of a record at the requested granularity.
pub fn record_technologies(record: &PatentRecord, level: TechLevel, conc: &FieldConcordance) -> Vec<String> {
    match level {
        TechLevel::Field => conc
            .map_codes(record.ipc_codes.iter().map(String::as_str))
            .fields
            .into_iter()
            .map(|f| f.name().to_string())
            .collect(),
        TechLevel::Subclass => {
            let mut v: Vec<String> = record
                .ipc_codes
                .iter()
                .filter_map(|c| ipc_subclass(c))
                .map(str::to_string)
                .collect();
            v.dedup();
            v
        }
    }
}

/// Builds an occurrence matrix from records that are already windowed and
/// scope-filtered. Field-level matrices always carry all 35 fields.
pub fn build_occurrence<'a>(
    records: impl IntoIterator<Item = &'a PatentRecord>,
    axis: &Axis,
    level: TechLevel,
    conc: &FieldConcordance,
    window: &str,
    scope: &str,
    counting: Counting,
) -> OccurrenceMatrix {
    let mut builder = match level {
        TechLevel::Field => OccurrenceBuilder::with_technologies(counting, &crate::corpus::field_names()),
        TechLevel::Subclass => OccurrenceBuilder::new(counting),
    };
    for r in records {
        let techs = record_technologies(r, level, conc);
        match axis {
            Axis::Country => builder.add(&r.countries, &techs),
            Axis::Corpus(label) => builder.add(&[label.as_str()], &techs),
        }
    }
    builder.finish(window, scope)
}

/// Accumulates a [`CooccurrenceMatrix`].
#[derive(Debug, Clone)]
pub struct CooccurrenceBuilder {
    technologies: Interner,
    preset: usize,
    occurrence: Vec<u64>,
    pairs: HashMap<(u32, u32), u64>,
    scratch: Vec<u32>,
}

impl Default for CooccurrenceBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl CooccurrenceBuilder {
    pub fn new() -> Self {
        Self::with_technologies::<&str>(&[])
    }

    pub fn with_technologies<S: AsRef<str>>(technologies: &[S]) -> Self {
        CooccurrenceBuilder {
            technologies: Interner::with_labels(technologies),
            preset: technologies.len(),
            occurrence: vec![0; technologies.len()],
            pairs: HashMap::new(),
            scratch: Vec::new(),
        }
    }

    /// Adds the distinct technology set of one record.
    pub fn add<T: AsRef<str>>(&mut self, technologies: &[T]) {
        let mut ts = std::mem::take(&mut self.scratch);
        distinct_indices(&mut self.technologies, technologies, &mut ts);
        self.add_indices(&ts);
        self.scratch = ts;
    }

    fn add_indices(&mut self, ts: &[u32]) {
        if self.occurrence.len() < self.technologies.labels.len() {
            self.occurrence.resize(self.technologies.labels.len(), 0);
        }
        for (k, &i) in ts.iter().enumerate() {
            self.occurrence[i as usize] += 1;
            for &j in &ts[k + 1..] {
                *self.pairs.entry((i, j)).or_insert(0) += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &CooccurrenceBuilder) {
        let map: Vec<u32> = other
            .technologies
            .labels
            .iter()
            .map(|l| self.technologies.intern(l))
            .collect();
        if self.occurrence.len() < self.technologies.labels.len() {
            self.occurrence.resize(self.technologies.labels.len(), 0);
        }
        for (i, &s) in other.occurrence.iter().enumerate() {
            self.occurrence[map[i] as usize] += s;
        }
        for (&(i, j), &c) in &other.pairs {
            let (a, b) = (map[i as usize], map[j as usize]);
            *self.pairs.entry((a.min(b), a.max(b))).or_insert(0) += c;
        }
    }

    pub fn finish(mut self, window: impl Into<String>, scope: impl Into<String>) -> CooccurrenceMatrix {
        let meta = MatrixMeta {
            window: window.into(),
            scope: scope.into(),
            counting: Counting::Whole,
        };
        self.occurrence.resize(self.technologies.labels.len(), 0);
        let (technologies, map) = self.technologies.finish(self.preset);
        let mut occurrence = vec![0; technologies.len()];
        for (i, s) in self.occurrence.into_iter().enumerate() {
            occurrence[map[i] as usize] = s;
        }
        let pairs = self
            .pairs
            .into_iter()
            .map(|((i, j), c)| {
                let (a, b) = (map[i as usize], map[j as usize]);
                ((a.min(b), a.max(b)), c)
            })
            .collect();
        CooccurrenceMatrix {
            technologies,
            pairs,
            occurrence,
            total: 0,
            meta,
        }
        .with_total()
    }
}

/// Symmetric technology co-occurrence counts with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceMatrix {
    technologies: Vec<String>,
    /// Upper triangle only, keyed by `(i, j)` with `i < j`; zero counts absent.
    pairs: BTreeMap<(u32, u32), u64>,
    occurrence: Vec<u64>,
    total: u64,
    meta: MatrixMeta,
}

impl CooccurrenceMatrix {
    fn with_total(mut self) -> Self {
        self.total = self.occurrence.iter().sum();
        self
    }

    /// Assembles a matrix from explicit counts. `pairs` may name each
    /// unordered pair once in either orientation.
    pub fn from_parts<S: AsRef<str>>(
        technologies: &[S],
        occurrence: Vec<u64>,
        pairs: impl IntoIterator<Item = (usize, usize, u64)>,
        meta: MatrixMeta,
    ) -> Result<Self> {
        let technologies: Vec<String> = technologies.iter().map(|s| s.as_ref().to_string()).collect();
        check_unique(&technologies, "technology")?;
        if occurrence.len() != technologies.len() {
            return Err(Error::LabelMismatch("occurrence length differs from labels".into()));
        }
        let mut map = BTreeMap::new();
        for (i, j, c) in pairs {
            if i == j || i >= technologies.len() || j >= technologies.len() {
                return Err(Error::Config(format!("invalid pair ({i}, {j})")));
            }
            if c > occurrence[i].min(occurrence[j]) {
                return Err(Error::Config(format!("pair ({i}, {j}) exceeds its marginals")));
            }
            if c > 0 && map.insert(((i.min(j)) as u32, (i.max(j)) as u32), c).is_some() {
                return Err(Error::Config(format!("pair ({i}, {j}) given twice")));
            }
        }
        Ok(CooccurrenceMatrix {
            technologies,
            pairs: map,
            occurrence,
            total: 0,
            meta,
        }
        .with_total())
    }

    pub fn technologies(&self) -> &[String] {
        &self.technologies
    }

    pub fn occurrence(&self) -> &[u64] {
        &self.occurrence
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn meta(&self) -> &MatrixMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.technologies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.technologies.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        if i == j {
            return 0;
        }
        let key = (i.min(j) as u32, i.max(j) as u32);
        self.pairs.get(&key).copied().unwrap_or(0)
    }

    /// Nonzero upper-triangle entries `(i, j, c_ij)` with `i < j`, ascending.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.pairs.iter().map(|(&(i, j), &c)| (i as usize, j as usize, c))
    }

    pub fn write_long_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["entity", "technology", "value"])?;
        for (i, s) in self.occurrence.iter().enumerate() {
            if *s > 0 {
                let t = &self.technologies[i];
                out.write_record([t, t, &s.to_string()])?;
            }
        }
        for (i, j, c) in self.pairs() {
            out.write_record([&self.technologies[i], &self.technologies[j], &c.to_string()])?;
        }
        out.flush().map_err(|e| Error::io("<matrix>", e))?;
        Ok(())
    }

    pub fn sidecar(&self) -> MatrixSidecar {
        MatrixSidecar {
            kind: "cooccurrence".into(),
            entities: self.technologies.clone(),
            technologies: self.technologies.clone(),
            window: self.meta.window.clone(),
            scope: self.meta.scope.clone(),
            counting: Counting::Whole,
            total: self.total as f64,
        }
    }
}

/// Builds a co-occurrence matrix over the technology sets of the records.
pub fn build_cooccurrence<'a>(
    records: impl IntoIterator<Item = &'a PatentRecord>,
    level: TechLevel,
    conc: &FieldConcordance,
    window: &str,
    scope: &str,
) -> CooccurrenceMatrix {
    let mut builder = match level {
        TechLevel::Field => CooccurrenceBuilder::with_technologies(&crate::corpus::field_names()),
        TechLevel::Subclass => CooccurrenceBuilder::new(),
    };
    for r in records {
        builder.add(&record_technologies(r, level, conc));
    }
    builder.finish(window, scope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn occ(records: &[(&[&str], &[&str])], counting: Counting) -> OccurrenceMatrix {
        let mut b = OccurrenceBuilder::new(counting);
        for (e, t) in records {
            b.add(e, t);
        }
        b.finish("P1", "all")
    }

    fn value(m: &OccurrenceMatrix, e: &str, t: &str) -> f64 {
        m.get(m.entity_index(e).unwrap(), m.technology_index(t).unwrap())
    }

    #[test]
    fn single_record_whole() {
        let m = occ(&[(&["US"], &["Control", "Measurement"])], Counting::Whole);
        assert_eq!(value(&m, "US", "Control"), 1.0);
        assert_eq!(value(&m, "US", "Measurement"), 1.0);
        assert_eq!(m.total(), 2.0);
    }

    #[test]
    fn single_record_fractional() {
        let m = occ(&[(&["US"], &["Control", "Measurement"])], Counting::Fractional);
        assert_eq!(value(&m, "US", "Control"), 0.5);
        assert_eq!(value(&m, "US", "Measurement"), 0.5);
    }

    #[test]
    fn two_records_whole() {
        let m = occ(
            &[(&["US"], &["Control"]), (&["US", "JP"], &["Control"])],
            Counting::Whole,
        );
        assert_eq!(value(&m, "US", "Control"), 2.0);
        assert_eq!(value(&m, "JP", "Control"), 1.0);
        assert_eq!(m.entities(), ["JP", "US"]);
    }

    #[test]
    fn repeated_labels_count_once() {
        let m = occ(&[(&["US", "US"], &["G06N", "G06N"])], Counting::Whole);
        assert_eq!(m.total(), 1.0);
    }

    #[test]
    fn empty_input_is_valid_zero_matrix() {
        let m = OccurrenceBuilder::new(Counting::Whole).finish("P1", "all");
        assert!(m.entities().is_empty() && m.technologies().is_empty());
        assert!(m.is_empty());
        let c = CooccurrenceBuilder::new().finish("P1", "all");
        assert_eq!(c.total(), 0);
    }

    #[test]
    fn preset_technologies_keep_order() {
        let mut b = OccurrenceBuilder::with_technologies(Counting::Whole, &["z", "a"]);
        b.add(&["US"], &["m", "a"]);
        let m = b.finish("P1", "all");
        assert_eq!(m.technologies(), ["z", "a", "m"]);
        assert_eq!(m.col_sums(), [0.0, 1.0, 1.0]);
    }

    #[test]
    fn cooccurrence_single_triple() {
        let mut b = CooccurrenceBuilder::new();
        b.add(&["a", "b", "c"]);
        let c = b.finish("P1", "all");
        assert_eq!((c.get(0, 1), c.get(0, 2), c.get(1, 2)), (1, 1, 1));
        assert_eq!(c.occurrence(), [1, 1, 1]);
    }

    #[test]
    fn cooccurrence_single_field_has_no_pairs() {
        let mut b = CooccurrenceBuilder::new();
        b.add(&["a"]);
        let c = b.finish("P1", "all");
        assert_eq!(c.pairs().count(), 0);
        assert_eq!(c.occurrence(), [1]);
    }

    #[test]
    fn cooccurrence_hand_enumeration() {
        let mut b = CooccurrenceBuilder::new();
        b.add(&["a", "b"]);
        b.add(&["b", "a"]);
        b.add(&["a", "c"]);
        let c = b.finish("P1", "all");
        assert_eq!(c.technologies(), ["a", "b", "c"]);
        assert_eq!((c.get(0, 1), c.get(0, 2), c.get(1, 2)), (2, 1, 0));
        assert_eq!(c.occurrence(), [3, 2, 1]);
        assert_eq!(c.total(), 6);
    }

    #[test]
    fn from_parts_validates() {
        let meta = MatrixMeta::default();
        assert!(CooccurrenceMatrix::from_parts(&["a", "b"], vec![1, 1], [(0, 0, 1)], meta.clone()).is_err());
        assert!(CooccurrenceMatrix::from_parts(&["a", "b"], vec![1, 1], [(0, 1, 2)], meta.clone()).is_err());
        let c = CooccurrenceMatrix::from_parts(&["a", "b"], vec![2, 1], [(1, 0, 1)], meta).unwrap();
        assert_eq!(c.get(0, 1), 1);
        assert_eq!(c.get(1, 0), 1);
    }

    #[test]
    fn record_level_build() {
        let conc = FieldConcordance::default();
        let rec = |id: &str, countries: &[&str], ipc: &[&str]| PatentRecord {
            id: id.into(),
            year: 2000,
            title: String::new(),
            abstract_text: String::new(),
            countries: countries.iter().map(|s| s.to_string()).collect(),
            ipc_codes: ipc.iter().map(|s| s.to_string()).collect(),
        };
        let records = [
            rec("1", &["US"], &["G05B", "G01B"]),
            rec("2", &["US", "JP"], &["G05B", "G06N3/08"]),
        ];
        let m = build_occurrence(
            &records,
            &Axis::Country,
            TechLevel::Field,
            &conc,
            "P2",
            "all",
            Counting::Whole,
        );
        assert_eq!(m.technologies().len(), 35);
        assert_eq!(value(&m, "US", "Control"), 2.0);
        assert_eq!(value(&m, "JP", "Computer technology"), 1.0);
        let s = build_occurrence(
            &records,
            &Axis::Corpus("AI".into()),
            TechLevel::Subclass,
            &conc,
            "P2",
            "ai",
            Counting::Whole,
        );
        assert_eq!(s.technologies(), ["G01B", "G05B", "G06N"]);
        assert_eq!(value(&s, "AI", "G05B"), 2.0);
        let c = build_cooccurrence(&records, TechLevel::Field, &conc, "P2", "all");
        let (ctl, comp) = (
            c.technologies().iter().position(|t| t == "Control").unwrap(),
            c.technologies()
                .iter()
                .position(|t| t == "Computer technology")
                .unwrap(),
        );
        assert_eq!(c.get(ctl, comp), 1);
    }

    #[test]
    fn long_csv_layout() {
        let m = occ(&[(&["US"], &["b", "a"])], Counting::Whole);
        let mut buf = Vec::new();
        m.write_long_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "entity,technology,value\nUS,a,1\nUS,b,1\n"
        );
        assert_eq!(m.sidecar().total, 2.0);
    }

    type Rec = (Vec<String>, Vec<String>);

    fn arb_records() -> impl Strategy<Value = Vec<Rec>> {
        proptest::collection::vec(
            (
                proptest::collection::vec("[A-E]{2}", 0..3),
                proptest::collection::vec("t[0-6]", 0..4),
            ),
            0..30,
        )
    }

    fn build_both(records: &[Rec], counting: Counting) -> (OccurrenceMatrix, CooccurrenceMatrix) {
        let mut o = OccurrenceBuilder::new(counting);
        let mut c = CooccurrenceBuilder::new();
        for (e, t) in records {
            o.add(e, t);
            c.add(t);
        }
        (o.finish("w", "s"), c.finish("w", "s"))
    }

    fn distinct(v: &[String]) -> usize {
        v.iter().collect::<std::collections::BTreeSet<_>>().len()
    }

    proptest! {
        #[test]
        fn order_independent(records in arb_records(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut shuffled = records.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let (o1, c1) = build_both(&records, Counting::Whole);
            let (o2, c2) = build_both(&shuffled, Counting::Whole);
            prop_assert_eq!(o1, o2);
            prop_assert_eq!(c1, c2);
        }

        #[test]
        fn additive_under_merge(a in arb_records(), b in arb_records()) {
            let mut ob = OccurrenceBuilder::new(Counting::Whole);
            let mut cb = CooccurrenceBuilder::new();
            for (e, t) in &a { ob.add(e, t); cb.add(t); }
            let mut ob2 = OccurrenceBuilder::new(Counting::Whole);
            let mut cb2 = CooccurrenceBuilder::new();
            for (e, t) in &b { ob2.add(e, t); cb2.add(t); }
            ob.merge(&ob2);
            cb.merge(&cb2);
            let all: Vec<Rec> = a.iter().chain(&b).cloned().collect();
            let (o, c) = build_both(&all, Counting::Whole);
            prop_assert_eq!(ob.finish("w", "s"), o);
            prop_assert_eq!(cb.finish("w", "s"), c);
        }

        #[test]
        fn fractional_conserves_weight(records in arb_records()) {
            let (o, _) = build_both(&records, Counting::Fractional);
            let contributing = records.iter().filter(|(e, t)| !e.is_empty() && !t.is_empty()).count();
            prop_assert!((o.total() - contributing as f64).abs() <= 1e-9 * (1.0 + contributing as f64));
        }

        #[test]
        fn whole_counting_totals(records in arb_records()) {
            let (o, _) = build_both(&records, Counting::Whole);
            let expected: usize = records.iter().map(|(e, t)| distinct(e) * distinct(t)).sum();
            prop_assert_eq!(o.total(), expected as f64);
            let recomputed: f64 = o.cells().map(|(_, _, v)| v).sum();
            prop_assert_eq!(recomputed, o.total());
            prop_assert!(o.cells().all(|(_, _, v)| v > 0.0));
        }

        #[test]
        fn cooccurrence_structure(records in arb_records()) {
            let (_, c) = build_both(&records, Counting::Whole);
            for i in 0..c.len() {
                prop_assert_eq!(c.get(i, i), 0);
                for j in 0..c.len() {
                    prop_assert_eq!(c.get(i, j), c.get(j, i));
                    if i != j {
                        prop_assert!(c.get(i, j) <= c.occurrence()[i].min(c.occurrence()[j]));
                    }
                }
            }
        }
    }
}
