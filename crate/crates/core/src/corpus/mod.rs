//! Patent records, AI keyword classification, IPC to field mapping and
//! analysis windows.

mod concordance;
mod fields;
mod keywords;
mod record;
mod windows;

pub use concordance::{map_ipc_to_fields, FieldConcordance, MappedFields, DEFAULT_CONCORDANCE};
pub use fields::{field_names, FieldId, FIELDS, FIELD_COUNT};
pub use keywords::{match_ai, KeywordMatch, KeywordRule, KeywordSet, DEFAULT_KEYWORDS};
pub use record::{
    ipc_subclass, normalize_ipc, parse_corpus, write_corpus, ColumnSchema, CorpusReader, PatentRecord, RowDiagnostic,
    MAX_YEAR, MIN_YEAR,
};
pub use windows::{assign_window, Window, WindowSpec};
