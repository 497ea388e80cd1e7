//! Metric computation over the aggregated windows.

use std::collections::{BTreeMap, BTreeSet};

use techspace::corpus::{field_names, Window};
use techspace::matrix::{CooccurrenceBuilder, CooccurrenceMatrix, OccurrenceBuilder, OccurrenceMatrix};
use techspace::metrics::{
    association_strength, binarize, category_complexity, category_relatedness, detect_core, log10_rca,
    method_of_reflections, overall_relatedness, rca, BinaryRcaMatrix, Categories, ComplexityAxis, ComplexityVector,
    CorePartition, RcaMatrix, RelatednessMatrix, SURROUNDING,
};

use crate::config::{Resources, RunConfig};
use crate::error::{CliError, Result};
use crate::ingest::{Ingest, WindowAggregates, AI_ROW};

/// Window label of the whole-span aggregate behind the global space.
pub const GLOBAL_WINDOW: &str = "ALL";
pub const SCOPE_ALL: &str = "all";
pub const SCOPE_AI: &str = "ai";
pub const SCOPE_AI_CORPUS: &str = "ai-corpus";

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryRow {
    pub name: String,
    pub relatedness: Option<f64>,
    pub complexity: Option<f64>,
    /// Members without a complexity value.
    pub missing: Vec<String>,
}

/// RCA of an occurrence matrix with its derived forms; all `None` when the
/// matrix holds no data.
#[derive(Debug, Clone)]
pub struct Specialisation {
    pub occurrence: OccurrenceMatrix,
    pub rca: Option<RcaMatrix>,
    pub log10: Option<RcaMatrix>,
    pub binary: Option<BinaryRcaMatrix>,
}

impl Specialisation {
    fn new(occurrence: OccurrenceMatrix, threshold: f64) -> Self {
        let rca = match rca(&occurrence) {
            Ok(r) => Some(r),
            Err(e) => {
                let m = occurrence.meta();
                log::warn!("{} {} {}: {e}", m.window, m.scope, occurrence_kind(&occurrence));
                None
            }
        };
        Specialisation {
            log10: rca.as_ref().map(log10_rca),
            binary: rca.as_ref().map(|r| binarize(r, threshold)),
            rca,
            occurrence,
        }
    }

    pub fn specialised(&self, entity: &str) -> BTreeSet<String> {
        self.binary.as_ref().map(|b| b.specialised(entity)).unwrap_or_default()
    }
}

fn occurrence_kind(m: &OccurrenceMatrix) -> &'static str {
    if m.technologies().len() == techspace::corpus::FIELD_COUNT {
        "field matrix"
    } else {
        "subclass matrix"
    }
}

/// Country × field metrics for one scope.
#[derive(Debug, Clone)]
pub struct FieldScope {
    pub scope: String,
    pub spec: Specialisation,
    pub cooccurrence: CooccurrenceMatrix,
    /// Depths `0..=morc_steps`; empty when the binary matrix is degenerate.
    pub kc: Vec<ComplexityVector>,
    /// Depths `0..=mort_steps`.
    pub kt: Vec<ComplexityVector>,
    pub phi: Option<RelatednessMatrix>,
    pub overall: Option<f64>,
    /// Sum of technology complexity over all fields.
    pub total_complexity: Option<f64>,
    pub categories: Vec<CategoryRow>,
}

impl FieldScope {
    pub fn kc_final(&self) -> Option<&ComplexityVector> {
        self.kc.last()
    }

    pub fn kt_final(&self) -> Option<&ComplexityVector> {
        self.kt.last()
    }
}

#[derive(Debug, Clone)]
pub struct CountryScope {
    pub country: String,
    pub cooccurrence: CooccurrenceMatrix,
    pub phi: Option<RelatednessMatrix>,
    pub overall: Option<f64>,
    /// Country complexity over all fields.
    pub complexity: Option<f64>,
    /// Relatedness within each category, and country complexity over the
    /// category's fields only.
    pub categories: Vec<CategoryRow>,
    pub specialised: BTreeSet<String>,
}

#[derive(Debug, Clone)]
pub struct WindowResult {
    pub window: Window,
    pub records: u64,
    pub ai_records: u64,
    pub all: FieldScope,
    pub ai: FieldScope,
    /// AI and non-AI rows over the fields.
    pub corpus: Specialisation,
    pub countries: Vec<CountryScope>,
    pub subclass_all: Specialisation,
    pub subclass_ai: Specialisation,
    pub ai_by_country: BTreeMap<String, u64>,
    pub ai_by_subclass: BTreeMap<String, u64>,
    pub ai_in_countries: u64,
}

impl WindowResult {
    pub fn ai_specialised(&self) -> BTreeSet<String> {
        self.corpus.specialised(AI_ROW)
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub windows: Vec<WindowResult>,
    pub global: FieldScope,
    pub core: CorePartition,
    pub surrounding: BTreeSet<String>,
}

fn reflections(
    binary: Option<&BinaryRcaMatrix>,
    axis: ComplexityAxis,
    steps: usize,
    ctx: &str,
) -> Vec<ComplexityVector> {
    let Some(m) = binary else { return vec![] };
    match (0..=steps).map(|n| method_of_reflections(m, axis, n)).collect() {
        Ok(v) => v,
        Err(e) => {
            log::warn!("{ctx}: {e}");
            vec![]
        }
    }
}

fn relatedness(c: &CooccurrenceMatrix, ctx: &str) -> Option<RelatednessMatrix> {
    match association_strength(c) {
        Ok(p) => Some(p),
        Err(e) => {
            log::warn!("{ctx} relatedness: {e}");
            None
        }
    }
}

fn category_relatedness_rows(
    phi: Option<&RelatednessMatrix>,
    cats: &Categories,
    cfg: &RunConfig,
) -> Result<Vec<Option<f64>>> {
    cats.specs()
        .iter()
        .map(|spec| match phi {
            Some(p) => Ok(category_relatedness(p, spec, cfg.category_pairs)?),
            None => Ok(None),
        })
        .collect()
}

fn field_scope(
    window: &str,
    scope: &str,
    occurrence: OccurrenceBuilder,
    cooc: CooccurrenceBuilder,
    cfg: &RunConfig,
    cats: &Categories,
) -> Result<FieldScope> {
    let ctx = format!("{window} {scope}");
    let spec = Specialisation::new(occurrence.finish(window, scope), cfg.threshold);
    let cooccurrence = cooc.finish(window, scope);
    let kc = reflections(spec.binary.as_ref(), ComplexityAxis::Entity, cfg.morc_steps, &ctx);
    let kt = reflections(spec.binary.as_ref(), ComplexityAxis::Technology, cfg.mort_steps, &ctx);
    let phi = relatedness(&cooccurrence, &ctx);
    let overall = phi
        .as_ref()
        .and_then(|p| overall_relatedness(p, cfg.positive_pairs_only));
    let relatedness = category_relatedness_rows(phi.as_ref(), cats, cfg)?;
    let categories = cats
        .specs()
        .iter()
        .zip(relatedness)
        .map(|(spec, r)| {
            let (complexity, missing) = match kt.last() {
                Some(k) => {
                    let c = category_complexity(k, spec);
                    (Some(c.value), c.missing)
                }
                None => (None, spec.members.clone()),
            };
            CategoryRow {
                name: spec.name.clone(),
                relatedness: r,
                complexity,
                missing,
            }
        })
        .collect();
    let total_complexity = kt.last().map(|k| k.values.iter().flatten().sum());
    Ok(FieldScope {
        scope: scope.to_string(),
        spec,
        cooccurrence,
        kc,
        kt,
        phi,
        overall,
        total_complexity,
        categories,
    })
}

/// Country complexity computed on the columns of `members` only.
fn restricted_complexity(binary: &BinaryRcaMatrix, members: &[String], steps: usize) -> Option<ComplexityVector> {
    let cols: Vec<usize> = binary
        .technologies()
        .iter()
        .enumerate()
        .filter(|(_, t)| members.contains(t))
        .map(|(i, _)| i)
        .collect();
    let labels: Vec<String> = cols.iter().map(|&i| binary.technologies()[i].clone()).collect();
    let rows: Vec<Vec<bool>> = (0..binary.entities().len())
        .map(|e| cols.iter().map(|&t| binary.get(e, t)).collect())
        .collect();
    let sub = BinaryRcaMatrix::from_rows(binary.entities(), &labels, &rows).ok()?;
    method_of_reflections(&sub, ComplexityAxis::Entity, steps).ok()
}

fn country_scopes(
    agg: &mut WindowAggregates,
    all: &FieldScope,
    cfg: &RunConfig,
    cats: &Categories,
) -> Result<Vec<CountryScope>> {
    let window = agg.window.label.clone();
    let restricted: Vec<Option<ComplexityVector>> = cats
        .specs()
        .iter()
        .map(|spec| {
            all.spec
                .binary
                .as_ref()
                .and_then(|b| restricted_complexity(b, &spec.members, cfg.morc_steps))
        })
        .collect();
    let mut out = Vec::new();
    for (country, builder) in std::mem::take(&mut agg.cooc_country) {
        let cooccurrence = builder.finish(window.as_str(), country.as_str());
        let phi = relatedness(&cooccurrence, &format!("{window} {country}"));
        let overall = phi
            .as_ref()
            .and_then(|p| overall_relatedness(p, cfg.positive_pairs_only));
        let rel = category_relatedness_rows(phi.as_ref(), cats, cfg)?;
        let categories = cats
            .specs()
            .iter()
            .zip(rel)
            .zip(&restricted)
            .map(|((spec, r), k)| CategoryRow {
                name: spec.name.clone(),
                relatedness: r,
                complexity: k.as_ref().and_then(|k| k.get(&country)),
                missing: vec![],
            })
            .collect();
        out.push(CountryScope {
            complexity: all.kc_final().and_then(|k| k.get(&country)),
            specialised: all.spec.specialised(&country),
            country,
            cooccurrence,
            phi,
            overall,
            categories,
        });
    }
    Ok(out)
}

fn check_categories(cats: &Categories) -> Result<()> {
    let fields: BTreeSet<String> = field_names().into_iter().collect();
    for spec in cats.specs() {
        if let Some(m) = spec.members.iter().find(|m| !fields.contains(*m)) {
            return Err(CliError::Config(format!(
                "category {} member {m:?} is not a technology field",
                spec.name
            )));
        }
    }
    Ok(())
}

pub fn analyse(ingest: Ingest, cfg: &RunConfig, res: &Resources) -> Result<Analysis> {
    let cats = &res.categories;
    check_categories(cats)?;

    let fields = field_names();
    let mut global_occ = OccurrenceBuilder::with_technologies(cfg.counting, &fields);
    let mut global_cooc = CooccurrenceBuilder::with_technologies(&fields);
    let mut windows = Vec::new();
    for mut agg in ingest.windows {
        global_occ.merge(&agg.country_field);
        global_cooc.merge(&agg.cooc);
        let label = agg.window.label.clone();
        if agg.records == 0 {
            log::warn!("window {label} has no usable records");
        }
        let all = field_scope(
            &label,
            SCOPE_ALL,
            agg.country_field.clone(),
            agg.cooc.clone(),
            cfg,
            cats,
        )?;
        let ai = field_scope(
            &label,
            SCOPE_AI,
            agg.country_field_ai.clone(),
            agg.cooc_ai.clone(),
            cfg,
            cats,
        )?;
        let countries = country_scopes(&mut agg, &all, cfg, cats)?;
        let corpus = Specialisation::new(agg.corpus_field.clone().finish(&label, SCOPE_AI_CORPUS), cfg.threshold);
        let subclass_all = Specialisation::new(agg.country_subclass.clone().finish(&label, SCOPE_ALL), cfg.threshold);
        let subclass_ai = Specialisation::new(agg.country_subclass_ai.clone().finish(&label, SCOPE_AI), cfg.threshold);
        windows.push(WindowResult {
            window: agg.window,
            records: agg.records,
            ai_records: agg.ai_records,
            all,
            ai,
            corpus,
            countries,
            subclass_all,
            subclass_ai,
            ai_by_country: agg.ai_by_country,
            ai_by_subclass: agg.ai_by_subclass,
            ai_in_countries: agg.ai_in_countries,
        });
    }
    let global = field_scope(GLOBAL_WINDOW, SCOPE_ALL, global_occ, global_cooc, cfg, cats)?;
    let specialised: Vec<BTreeSet<String>> = windows.iter().map(WindowResult::ai_specialised).collect();
    let core = detect_core(&specialised);
    let surrounding = cats
        .get(SURROUNDING)
        .map(|s| s.members.iter().cloned().collect())
        .unwrap_or_default();
    Ok(Analysis {
        windows,
        global,
        core,
        surrounding,
    })
}
