use std::collections::{BTreeSet, HashMap};

use super::fields::{FieldId, FIELD_COUNT};
use super::record::normalize_ipc;
use crate::error::{Error, Result};

pub const DEFAULT_CONCORDANCE: &str = include_str!("../../data/ipc_fields.csv");

/// Maps IPC symbol prefixes onto the 35 technology fields.
#[derive(Debug, Clone)]
pub struct FieldConcordance {
    entries: HashMap<String, FieldId>,
    max_prefix: usize,
}

/// Fields of one record plus the symbols no prefix covered.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MappedFields<'a> {
    pub fields: BTreeSet<FieldId>,
    pub unmapped: Vec<&'a str>,
}

impl FieldConcordance {
    /// Parses a two-column `prefix,field` file. Lines starting with `#` are
    /// comments; a `prefix,field` header line is optional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut entries = HashMap::new();
        for row in reader.records() {
            let row = row?;
            let line = row.position().map(|p| p.line()).unwrap_or(0);
            if row.len() != 2 {
                return Err(Error::config(format!("concordance line {line}: expected 2 columns")));
            }
            let (prefix, name) = (&row[0], &row[1]);
            if prefix.eq_ignore_ascii_case("prefix") && name.eq_ignore_ascii_case("field") {
                continue;
            }
            let field = FieldId::from_name(name)
                .ok_or_else(|| Error::config(format!("concordance line {line}: unknown field {name:?}")))?;
            let prefix = normalize_ipc(prefix);
            if prefix.is_empty() {
                return Err(Error::config(format!("concordance line {line}: empty prefix")));
            }
            if let Some(previous) = entries.insert(prefix.clone(), field) {
                if previous != field {
                    return Err(Error::config(format!(
                        "concordance prefix {prefix} maps to both {previous} and {field}"
                    )));
                }
            }
        }
        Self::from_entries(entries)
    }

    pub fn from_entries(entries: HashMap<String, FieldId>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::config("concordance has no entries"));
        }
        if let Some((p, f)) = entries.iter().find(|(_, f)| f.0 as usize >= FIELD_COUNT) {
            return Err(Error::config(format!("prefix {p} targets invalid field id {}", f.0)));
        }
        let max_prefix = entries.keys().map(String::len).max().unwrap_or(0);
        Ok(FieldConcordance { entries, max_prefix })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All (prefix, field) entries sorted by prefix.
    pub fn entries(&self) -> Vec<(&str, FieldId)> {
        let mut v: Vec<(&str, FieldId)> = self.entries.iter().map(|(p, &f)| (p.as_str(), f)).collect();
        v.sort_unstable();
        v
    }

    /// Longest-prefix lookup of a normalized IPC symbol.
    pub fn lookup(&self, symbol: &str) -> Option<FieldId> {
        if !symbol.is_ascii() {
            return None;
        }
        (1..=symbol.len().min(self.max_prefix))
            .rev()
            .find_map(|k| self.entries.get(&symbol[..k]).copied())
    }

    /// Fields covered by a set of normalized IPC symbols.
    pub fn map_codes<'a, I>(&self, codes: I) -> MappedFields<'a>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut out = MappedFields::default();
        for code in codes {
            match self.lookup(code) {
                Some(f) => {
                    out.fields.insert(f);
                }
                None => out.unmapped.push(code),
            }
        }
        out
    }
}

impl Default for FieldConcordance {
    fn default() -> Self {
        Self::parse(DEFAULT_CONCORDANCE).expect("shipped concordance is valid")
    }
}

/// Maps a record's IPC symbols onto fields by longest matching prefix.
pub fn map_ipc_to_fields<'a>(codes: &'a [String], conc: &FieldConcordance) -> MappedFields<'a> {
    conc.map_codes(codes.iter().map(String::as_str))
}
