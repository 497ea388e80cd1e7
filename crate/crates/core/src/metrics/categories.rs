use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::reflections::ComplexityVector;
use super::relatedness::RelatednessMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_CATEGORIES: &str = include_str!("../../data/ai_categories.csv");

pub const AI_CORE: &str = "AI-core";
pub const AI_RELATED: &str = "AI-related";
pub const SURROUNDING: &str = "Surrounding";

/// A named group of technology fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategorySpec {
    pub name: String,
    pub members: Vec<String>,
}

/// Ordered, disjoint categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Categories {
    specs: Vec<CategorySpec>,
}

impl Categories {
    pub fn new(specs: Vec<CategorySpec>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for spec in &specs {
            if spec.members.is_empty() {
                return Err(Error::config(format!("category {} has no members", spec.name)));
            }
            for m in &spec.members {
                if !seen.insert(m.as_str()) {
                    return Err(Error::config(format!("field {m:?} listed in more than one category")));
                }
            }
        }
        Ok(Categories { specs })
    }

    /// Parses a `field,category` file; `#` lines are comments and a
    /// `field,category` header is optional. Categories keep first-seen order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut specs: Vec<CategorySpec> = Vec::new();
        for row in reader.records() {
            let row = row?;
            if row.len() != 2 {
                return Err(Error::config("category file rows need exactly 2 columns"));
            }
            let (field, category) = (&row[0], &row[1]);
            if field.eq_ignore_ascii_case("field") && category.eq_ignore_ascii_case("category") {
                continue;
            }
            match specs.iter_mut().find(|s| s.name == category) {
                Some(s) => s.members.push(field.to_string()),
                None => specs.push(CategorySpec {
                    name: category.to_string(),
                    members: vec![field.to_string()],
                }),
            }
        }
        Self::new(specs)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn specs(&self) -> &[CategorySpec] {
        &self.specs
    }

    pub fn get(&self, name: &str) -> Option<&CategorySpec> {
        self.specs.iter().find(|s| s.name == name)
    }

    pub fn category_of(&self, field: &str) -> Option<&str> {
        self.specs
            .iter()
            .find(|s| s.members.iter().any(|m| m == field))
            .map(|s| s.name.as_str())
    }
}

impl Default for Categories {
    fn default() -> Self {
        Self::parse(DEFAULT_CATEGORIES).expect("shipped category file is valid")
    }
}

/// Which pairs enter a category's mean relatedness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CategoryPairs {
    /// Pairs with both fields inside the category.
    #[default]
    Within,
    /// Pairs with at least one field inside the category.
    Incident,
}

/// Mean relatedness of a category. `Ok(None)` when no pair qualifies,
/// e.g. a single-member category under [`CategoryPairs::Within`].
pub fn category_relatedness(phi: &RelatednessMatrix, cat: &CategorySpec, pairs: CategoryPairs) -> Result<Option<f64>> {
    let mut inside = vec![false; phi.len()];
    for m in &cat.members {
        let i = phi
            .index_of(m)
            .ok_or_else(|| Error::config(format!("category {} member {m:?} is not a known technology", cat.name)))?;
        inside[i] = true;
    }
    let (sum, count) = phi
        .pairs()
        .filter(|&(i, j, _)| match pairs {
            CategoryPairs::Within => inside[i] && inside[j],
            CategoryPairs::Incident => inside[i] || inside[j],
        })
        .fold((0.0, 0usize), |(s, n), (_, _, v)| (s + v, n + 1));
    Ok((count > 0).then(|| sum / count as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryComplexity {
    pub value: f64,
    /// Members without a complexity value; they contribute 0.
    pub missing: Vec<String>,
}

/// Sum of technology complexity over the category members.
pub fn category_complexity(kt: &ComplexityVector, cat: &CategorySpec) -> CategoryComplexity {
    let mut value = 0.0;
    let mut missing = Vec::new();
    for m in &cat.members {
        match kt.get(m) {
            Some(v) => value += v,
            None => missing.push(m.clone()),
        }
    }
    if !missing.is_empty() {
        log::warn!("category {}: no complexity for {:?}", cat.name, missing);
    }
    CategoryComplexity { value, missing }
}

/// Fields specialised in every window and fields specialised in some.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorePartition {
    pub core: BTreeSet<String>,
    pub related: BTreeSet<String>,
}

/// Splits fields by how many windows they are specialised in: all windows
/// gives core, at least one but not all gives related.
pub fn detect_core<'a>(windows: impl IntoIterator<Item = &'a BTreeSet<String>>) -> CorePartition {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut n = 0;
    for set in windows {
        n += 1;
        for f in set {
            *counts.entry(f.as_str()).or_insert(0) += 1;
        }
    }
    let mut out = CorePartition::default();
    for (f, c) in counts {
        if c == n {
            out.core.insert(f.to_string());
        } else {
            out.related.insert(f.to_string());
        }
    }
    out
}
