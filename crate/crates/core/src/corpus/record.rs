use std::collections::HashSet;
use std::io::{BufRead, BufReader, Cursor, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

/// One priority filing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatentRecord {
    pub id: String,
    pub year: i32,
    pub title: String,
    pub abstract_text: String,
    /// Sorted, duplicate-free ISO alpha-2 codes of inventor locations.
    pub countries: Vec<String>,
    /// Sorted, duplicate-free normalized IPC symbols.
    pub ipc_codes: Vec<String>,
}

/// Column names used to locate record fields in the header row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnSchema {
    pub id: String,
    pub year: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub countries: String,
    pub ipc: String,
    /// Separator between values inside multi-valued cells.
    pub inner_separator: char,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        ColumnSchema {
            id: "id".into(),
            year: "year".into(),
            title: "title".into(),
            abstract_text: "abstract".into(),
            countries: "countries".into(),
            ipc: "ipc".into(),
            inner_separator: '|',
        }
    }
}

/// A data row that failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowDiagnostic {
    pub line: u64,
    pub message: String,
}

impl std::fmt::Display for RowDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Copy)]
struct ColumnIndex {
    id: usize,
    year: usize,
    title: usize,
    abstract_text: usize,
    countries: usize,
    ipc: usize,
}

/// Streaming reader over a delimiter-separated patent file.
///
/// Yields one item per data row: either a validated record or a diagnostic
/// carrying the row's line number. Iteration continues past bad rows.
pub struct CorpusReader<R: Read> {
    inner: Option<csv::Reader<R>>,
    columns: Option<ColumnIndex>,
    inner_separator: char,
    row: csv::StringRecord,
    seen_ids: HashSet<String>,
}

type Peeked<R> = std::io::Chain<Cursor<Vec<u8>>, BufReader<R>>;

/// Opens a corpus stream. The delimiter is tab when the header line contains
/// a tab and comma otherwise. A completely empty source yields no rows.
pub fn parse_corpus<R: Read>(source: R, schema: &ColumnSchema) -> Result<CorpusReader<Peeked<R>>> {
    let mut buffered = BufReader::with_capacity(1 << 16, source);
    let mut header = Vec::new();
    buffered
        .read_until(b'\n', &mut header)
        .map_err(|e| Error::io("<corpus>", e))?;
    let delimiter = if header.contains(&b'\t') { b'\t' } else { b',' };
    let empty = header.iter().all(|b| b.is_ascii_whitespace());
    let stream = Cursor::new(header).chain(buffered);

    if empty {
        return Ok(CorpusReader {
            inner: None,
            columns: None,
            inner_separator: schema.inner_separator,
            row: csv::StringRecord::new(),
            seen_ids: HashSet::new(),
        });
    }

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(stream);
    let headers = reader.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::config(format!("missing mandatory column {name:?}")))
    };
    let columns = ColumnIndex {
        id: find(&schema.id)?,
        year: find(&schema.year)?,
        title: find(&schema.title)?,
        abstract_text: find(&schema.abstract_text)?,
        countries: find(&schema.countries)?,
        ipc: find(&schema.ipc)?,
    };
    Ok(CorpusReader {
        inner: Some(reader),
        columns: Some(columns),
        inner_separator: schema.inner_separator,
        row: csv::StringRecord::new(),
        seen_ids: HashSet::new(),
    })
}

impl<R: Read> Iterator for CorpusReader<R> {
    type Item = Result<PatentRecord, RowDiagnostic>;

    fn next(&mut self) -> Option<Self::Item> {
        let reader = self.inner.as_mut()?;
        let columns = self.columns?;
        match reader.read_record(&mut self.row) {
            Ok(false) => None,
            Ok(true) => {
                let line = self.row.position().map(|p| p.line()).unwrap_or(0);
                let parsed = validate_row(&self.row, columns, self.inner_separator).and_then(|record| {
                    if self.seen_ids.insert(record.id.clone()) {
                        Ok(record)
                    } else {
                        Err(format!("duplicate id {:?}", record.id))
                    }
                });
                Some(parsed.map_err(|message| RowDiagnostic { line, message }))
            }
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                    // Nothing more can be read from a failing stream.
                    self.inner = None;
                }
                Some(Err(RowDiagnostic {
                    line,
                    message: e.to_string(),
                }))
            }
        }
    }
}

fn validate_row(
    row: &csv::StringRecord,
    cols: ColumnIndex,
    separator: char,
) -> std::result::Result<PatentRecord, String> {
    let cell = |i: usize, name: &str| row.get(i).ok_or_else(|| format!("missing {name} value"));

    let id = cell(cols.id, "id")?.trim();
    if id.is_empty() {
        return Err("empty id".into());
    }
    let year_text = cell(cols.year, "year")?.trim();
    let year: i32 = year_text.parse().map_err(|_| format!("invalid year {year_text:?}"))?;
    if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
        return Err(format!("year {year} outside [{MIN_YEAR}, {MAX_YEAR}]"));
    }

    let mut countries = Vec::new();
    for code in split_cell(cell(cols.countries, "countries")?, separator) {
        let code = code.to_ascii_uppercase();
        if code.len() != 2 || !code.bytes().all(|b| b.is_ascii_uppercase()) {
            return Err(format!("invalid country code {code:?}"));
        }
        countries.push(code);
    }
    countries.sort_unstable();
    countries.dedup();

    let mut ipc_codes: Vec<String> = split_cell(cell(cols.ipc, "ipc")?, separator)
        .map(normalize_ipc)
        .filter(|s| !s.is_empty())
        .collect();
    ipc_codes.sort_unstable();
    ipc_codes.dedup();

    Ok(PatentRecord {
        id: id.to_string(),
        year,
        title: cell(cols.title, "title")?.to_string(),
        abstract_text: cell(cols.abstract_text, "abstract")?.to_string(),
        countries,
        ipc_codes,
    })
}

fn split_cell(cell: &str, separator: char) -> impl Iterator<Item = &str> {
    cell.split(separator).map(str::trim).filter(|s| !s.is_empty())
}

/// Canonical form of an IPC symbol: whitespace removed, upper case, and a
/// trailing `/` after a bare main group (`G01N 33` becomes `G01N33/`).
pub fn normalize_ipc(symbol: &str) -> String {
    let mut s: String = symbol
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| c.to_ascii_uppercase())
        .collect();
    if s.len() > 4 && !s.contains('/') {
        s.push('/');
    }
    s
}

/// The four-character subclass of an IPC symbol, e.g. `G06N` for `G06N3/08`.
pub fn ipc_subclass(symbol: &str) -> Option<&str> {
    let b = symbol.as_bytes();
    let well_formed = b.len() >= 4
        && (b'A'..=b'H').contains(&b[0])
        && b[1].is_ascii_digit()
        && b[2].is_ascii_digit()
        && b[3].is_ascii_uppercase();
    well_formed.then(|| &symbol[..4])
}

/// Writes records in the comma-separated layout read by [`parse_corpus`].
pub fn write_corpus<'a, W: Write>(records: impl IntoIterator<Item = &'a PatentRecord>, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["id", "year", "title", "abstract", "countries", "ipc"])?;
    for r in records {
        out.write_record([
            r.id.as_str(),
            &r.year.to_string(),
            &r.title,
            &r.abstract_text,
            &r.countries.join("|"),
            &r.ipc_codes.join("|"),
        ])?;
    }
    out.flush().map_err(|e| Error::io("<corpus>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse_all(text: &str) -> Vec<Result<PatentRecord, RowDiagnostic>> {
        parse_corpus(text.as_bytes(), &ColumnSchema::default())
            .unwrap()
            .collect()
    }

    #[test]
    fn direct_field_mapping() {
        let rows = parse_all("id,year,title,abstract,countries,ipc\np1,1975,Fuzzy logic controller,,JP,G05B\n");
        assert_eq!(
            rows,
            vec![Ok(PatentRecord {
                id: "p1".into(),
                year: 1975,
                title: "Fuzzy logic controller".into(),
                abstract_text: "".into(),
                countries: vec!["JP".into()],
                ipc_codes: vec!["G05B".into()],
            })]
        );
    }

    #[test]
    fn multi_valued_cells_split() {
        let rows = parse_all("id,year,title,abstract,countries,ipc\np1,1990,t,a,US|JP|US,G06N 3/08|H04L\n");
        let r = rows[0].as_ref().unwrap();
        assert_eq!(r.countries, vec!["JP", "US"]);
        assert_eq!(r.ipc_codes, vec!["G06N3/08", "H04L"]);
    }

    #[test]
    fn bad_year_is_reported_and_skipped() {
        let rows = parse_all(
            "id,year,title,abstract,countries,ipc\np1,abc,t,,US,G06N\np2,2001,t,,US,G06N\np3,1850,t,,US,G06N\n",
        );
        assert_eq!(rows.len(), 3);
        let diag = rows[0].as_ref().unwrap_err();
        assert_eq!(diag.line, 2);
        assert!(diag.message.contains("abc"));
        assert_eq!(rows[1].as_ref().unwrap().id, "p2");
        assert!(rows[2].is_err());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let rows = parse_all("id,year,title,abstract,countries,ipc\np1,2001,t,,US,G06N\np1,2002,t,,US,G06N\n");
        assert!(rows[0].is_ok());
        assert!(rows[1].as_ref().unwrap_err().message.contains("duplicate"));
    }

    #[test]
    fn tab_delimiter_detected_and_columns_reordered() {
        let rows = parse_all("ipc\tid\tcountries\tyear\tabstract\ttitle\nG06Q\tx\tKR\t2010\tsome, text\tA title\n");
        let r = rows[0].as_ref().unwrap();
        assert_eq!(r.abstract_text, "some, text");
        assert_eq!(r.countries, vec!["KR"]);
    }

    #[test]
    fn missing_column_is_fatal() {
        let err = parse_corpus("id,year,title,countries,ipc\n".as_bytes(), &ColumnSchema::default());
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn empty_source_yields_nothing() {
        assert!(parse_all("").is_empty());
        assert!(parse_all("id,year,title,abstract,countries,ipc\n").is_empty());
    }

    #[test]
    fn short_row_is_a_diagnostic() {
        let rows = parse_all("id,year,title,abstract,countries,ipc\np1,2001\n");
        assert!(rows[0].is_err());
    }

    #[test]
    fn ipc_normalization() {
        assert_eq!(normalize_ipc(" g01n 33/48 "), "G01N33/48");
        assert_eq!(normalize_ipc("G01N 33"), "G01N33/");
        assert_eq!(normalize_ipc("G06N"), "G06N");
        assert_eq!(ipc_subclass("G06N3/08"), Some("G06N"));
        assert_eq!(ipc_subclass("X06N"), None);
        assert_eq!(ipc_subclass("G6"), None);
    }

    fn arb_record() -> impl Strategy<Value = PatentRecord> {
        (
            "[a-z0-9]{1,8}",
            MIN_YEAR..=MAX_YEAR,
            "[ -~]{0,30}",
            "[ -~\n]{0,40}",
            proptest::collection::btree_set("[A-Z]{2}", 0..4),
            proptest::collection::btree_set("[A-H][0-9]{2}[A-Z]( ?[0-9]{1,3}/[0-9]{2})?", 0..4),
        )
            .prop_map(|(id, year, title, abstract_text, countries, ipc)| {
                let mut ipc_codes: Vec<String> = ipc.iter().map(|s| normalize_ipc(s)).collect();
                ipc_codes.sort();
                ipc_codes.dedup();
                PatentRecord {
                    id,
                    year,
                    title,
                    abstract_text,
                    countries: countries.into_iter().collect(),
                    ipc_codes,
                }
            })
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(records in proptest::collection::vec(arb_record(), 0..20)) {
            let mut seen = HashSet::new();
            let records: Vec<_> = records.into_iter().filter(|r| seen.insert(r.id.clone())).collect();
            let mut buf = Vec::new();
            write_corpus(&records, &mut buf).unwrap();
            let back: Vec<PatentRecord> = parse_corpus(buf.as_slice(), &ColumnSchema::default())
                .unwrap()
                .map(|r| r.unwrap())
                .collect();
            prop_assert_eq!(back, records);
        }
    }
}
