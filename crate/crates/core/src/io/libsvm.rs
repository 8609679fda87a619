use std::fmt;
use std::io::BufRead;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::IoError;

/// Largest `rows × cols` the loader densifies unless told otherwise.
pub const DEFAULT_DENSE_CAP: usize = 1 << 27;

#[derive(Debug, Clone, PartialEq)]
pub enum LibsvmErrorKind {
    UnknownLabel(String),
    BadToken(String),
    ZeroIndex,
    NonIncreasingIndex { previous: usize, index: usize },
    IndexOutOfRange { index: usize, n_features: usize },
}

impl fmt::Display for LibsvmErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownLabel(s) => write!(f, "unknown label {s:?}"),
            Self::BadToken(s) => write!(f, "cannot parse token {s:?}"),
            Self::ZeroIndex => f.write_str("feature indices are 1-based"),
            Self::NonIncreasingIndex { previous, index } => {
                write!(f, "indices not increasing ({index} after {previous})")
            }
            Self::IndexOutOfRange { index, n_features } => {
                write!(f, "index {index} exceeds feature count {n_features}")
            }
        }
    }
}

fn parse_label(tok: &str) -> Option<f64> {
    let v = tok.parse::<f64>().ok()?;
    if v == 1.0 {
        Some(1.0)
    } else if v == -1.0 || v == 0.0 {
        Some(-1.0)
    } else {
        None
    }
}

type SparseRow = Vec<(usize, f64)>;

/// Parse LIBSVM text into a dense `N × n` matrix and `±1` labels.
///
/// Labels `0` map to `−1`. Blank lines and `#` comments are skipped. With
/// `n_features = None` the width is the largest index seen.
pub fn parse_libsvm<R: BufRead>(
    reader: R,
    n_features: Option<usize>,
    cap: usize,
) -> Result<(Array2<f64>, Array1<f64>), IoError> {
    let mut rows: Vec<SparseRow> = Vec::new();
    let mut labels = Vec::new();
    let mut width = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let line_no = lineno + 1;
        let err = |kind| IoError::Libsvm { line: line_no, kind };
        let line = line.map_err(|e| IoError::io(Path::new("<reader>"), e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label = parse_label(label_tok).ok_or_else(|| err(LibsvmErrorKind::UnknownLabel(label_tok.into())))?;

        let mut row = SparseRow::new();
        let mut previous = 0;
        for tok in tokens {
            let bad = || err(LibsvmErrorKind::BadToken(tok.into()));
            let (idx, val) = tok.split_once(':').ok_or_else(bad)?;
            let index: usize = idx.parse().map_err(|_| bad())?;
            let value: f64 = val.parse().map_err(|_| bad())?;
            if index == 0 {
                return Err(err(LibsvmErrorKind::ZeroIndex));
            }
            if index <= previous {
                return Err(err(LibsvmErrorKind::NonIncreasingIndex { previous, index }));
            }
            if let Some(n) = n_features {
                if index > n {
                    return Err(err(LibsvmErrorKind::IndexOutOfRange { index, n_features: n }));
                }
            }
            previous = index;
            row.push((index - 1, value));
        }
        width = width.max(previous);
        rows.push(row);
        labels.push(label);
    }

    let cols = n_features.unwrap_or(width);
    if rows.len().checked_mul(cols).is_none_or(|c| c > cap) {
        return Err(IoError::SizeCap {
            rows: rows.len(),
            cols,
            cap,
        });
    }
    let mut samples = Array2::zeros((rows.len(), cols));
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            samples[[i, j]] = v;
        }
    }
    Ok((samples, Array1::from(labels)))
}

pub fn load_libsvm(
    path: impl AsRef<Path>,
    n_features: Option<usize>,
    cap: usize,
) -> Result<(Array2<f64>, Array1<f64>), IoError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| IoError::io(path, e))?;
    parse_libsvm(std::io::BufReader::new(file), n_features, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn parse(text: &str, n: Option<usize>) -> Result<(Array2<f64>, Array1<f64>), IoError> {
        parse_libsvm(text.as_bytes(), n, DEFAULT_DENSE_CAP)
    }

    fn kind(r: Result<(Array2<f64>, Array1<f64>), IoError>) -> LibsvmErrorKind {
        match r {
            Err(IoError::Libsvm { kind, .. }) => kind,
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn basic_line() {
        let (x, y) = parse("+1 1:0.5 3:2\n", Some(3)).unwrap();
        assert_eq!(x, array![[0.5, 0.0, 2.0]]);
        assert_eq!(y, array![1.0]);
    }

    #[test]
    fn zero_label_remapped_and_width_inferred() {
        let (x, y) = parse("0 2:1\n\n# comment\n1 4:-1 # trailing\n", None).unwrap();
        assert_eq!(y, array![-1.0, 1.0]);
        assert_eq!(x.dim(), (2, 4));
        assert_eq!(x[[1, 3]], -1.0);
    }

    #[test]
    fn malformed_lines() {
        assert_eq!(
            kind(parse("1 3:1 2:1\n", None)),
            LibsvmErrorKind::NonIncreasingIndex { previous: 3, index: 2 }
        );
        assert_eq!(kind(parse("1 2:1 2:1\n", None)), LibsvmErrorKind::NonIncreasingIndex { previous: 2, index: 2 });
        assert_eq!(kind(parse("2 1:1\n", None)), LibsvmErrorKind::UnknownLabel("2".into()));
        assert_eq!(kind(parse("1 1:x\n", None)), LibsvmErrorKind::BadToken("1:x".into()));
        assert_eq!(kind(parse("1 abc\n", None)), LibsvmErrorKind::BadToken("abc".into()));
        assert_eq!(kind(parse("1 0:1\n", None)), LibsvmErrorKind::ZeroIndex);
        assert_eq!(
            kind(parse("1 5:1\n", Some(4))),
            LibsvmErrorKind::IndexOutOfRange { index: 5, n_features: 4 }
        );
    }

    #[test]
    fn line_numbers_reported() {
        match parse("1 1:1\n-1 2:1 1:1\n", None) {
            Err(IoError::Libsvm { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cap_guards_densification() {
        assert!(matches!(
            parse_libsvm("1 10:1\n1 1:1\n".as_bytes(), None, 19),
            Err(IoError::SizeCap { rows: 2, cols: 10, cap: 19 })
        ));
    }
}
