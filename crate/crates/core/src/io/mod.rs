//! Matrix and dataset files, report and trace persistence.

mod dense;
mod libsvm;
mod report;

pub use dense::{load_dense_matrix, read_dense_matrix, save_dense_matrix, write_dense_matrix, DENSE_MAGIC, DENSE_VERSION};
pub use libsvm::{load_libsvm, parse_libsvm, LibsvmErrorKind, DEFAULT_DENSE_CAP};
pub use report::{
    format_g6, read_report_json, read_vector, write_report_csv, write_report_json, write_trace_csv, write_vector,
    REPORT_COLUMNS, TRACE_COLUMNS,
};

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic: not a dense matrix file")]
    BadMagic,
    #[error("unsupported dense matrix version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("{extra} unexpected bytes after payload")]
    TrailingBytes { extra: u64 },
    #[error("dimension overflow: {rows} x {cols}")]
    DimensionOverflow { rows: u64, cols: u64 },
    #[error("line {line}: {kind}")]
    Libsvm { line: usize, kind: LibsvmErrorKind },
    #[error("densifying {rows} x {cols} exceeds the cap of {cap} entries")]
    SizeCap { rows: usize, cols: usize, cap: usize },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: line {line}: cannot parse {token:?}", path.display())]
    Parse { path: PathBuf, line: usize, token: String },
}

impl IoError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
