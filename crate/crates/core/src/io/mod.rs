//! Readers and writers for CoNLL-U, the sheet table and benchmark manifests.

mod conllu;
mod manifest;
mod sheet;

pub use conllu::{emit_conllu, parse_conllu, ConlluError};
pub use manifest::{
    load_manifest, parse_manifest, BenchmarkManifest, ManifestEntry, ManifestError, ManifestHeader, RawToken,
};
pub use sheet::{
    emit_rows, emit_sheet, header_line, parse_sheet, sheet_rows, SheetError, SheetRow, FINAL_CONFIDENCE,
    SHEET_COLUMNS,
};
