//! LIBSVM ingestion and the sparse [`Dataset`] every objective is built on.
//!
//! Format: one sample per line, `label idx:val idx:val ...`, whitespace
//! separated, feature ids 1-based and strictly increasing within a line.
//! Lines starting with `#` and blank lines are skipped; `\n` and `\r\n` line
//! endings are both accepted.
//!
//! Labels are mapped to `{−1, +1}`: positive labels become `+1`, all others
//! `−1`. A file whose labels take exactly two values that are both positive
//! (the `{1, 2}` convention) maps the larger value to `+1`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: cannot parse {token:?}: {reason}")]
    Parse {
        line: usize,
        token: String,
        reason: &'static str,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("dataset contains no samples")]
    Empty,
    #[error("dataset has no features; pass an explicit dimension")]
    NoFeatures,
    #[error("dimension override {requested} is smaller than the largest feature index {max_index}")]
    DimensionOverride { requested: usize, max_index: usize },
    #[error("read failed: {0}")]
    Read(#[from] std::io::Error),
}

/// Parser knobs. `dim` forces the feature dimension, for test splits whose
/// highest active feature is below the training split's.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub dim: Option<usize>,
}

/// Borrowed view of one sparse row. `indices` are 0-based.
#[derive(Debug, Clone, Copy)]
pub struct SparseRow<'a> {
    pub indices: &'a [u32],
    pub values: &'a [f64],
}

impl SparseRow<'_> {
    #[inline]
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(self.values)
            .map(|(&j, &v)| v * x[j as usize])
            .sum()
    }

    /// `out += alpha * row`
    #[inline]
    pub fn add_scaled_to(&self, alpha: f64, out: &mut [f64]) {
        for (&j, &v) in self.indices.iter().zip(self.values) {
            out[j as usize] += alpha * v;
        }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }
}

/// Labelled sparse design matrix in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    labels: Vec<f64>,
    row_norms: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from rows of `(0-based index, value)` pairs.
    ///
    /// Labels must already be `±1`; indices must be strictly increasing and
    /// below `dim`.
    pub fn from_rows(dim: usize, rows: &[Vec<(usize, f64)>], labels: &[f64]) -> Result<Self, DataError> {
        if rows.is_empty() {
            return Err(DataError::Empty);
        }
        if dim == 0 {
            return Err(DataError::NoFeatures);
        }
        if rows.len() != labels.len() {
            return Err(DataError::Format {
                line: 0,
                message: format!("{} rows but {} labels", rows.len(), labels.len()),
            });
        }
        let mut ds = Dataset {
            dim,
            indptr: Vec::with_capacity(rows.len() + 1),
            indices: Vec::new(),
            values: Vec::new(),
            labels: Vec::with_capacity(rows.len()),
            row_norms: Vec::with_capacity(rows.len()),
        };
        ds.indptr.push(0);
        for (i, (row, &y)) in rows.iter().zip(labels).enumerate() {
            if y != 1.0 && y != -1.0 {
                return Err(DataError::Format {
                    line: i + 1,
                    message: format!("label {y} is not ±1"),
                });
            }
            let mut prev: Option<usize> = None;
            for &(j, v) in row {
                if j >= dim {
                    return Err(DataError::Format {
                        line: i + 1,
                        message: format!("feature index {} exceeds dimension {dim}", j + 1),
                    });
                }
                if prev.is_some_and(|p| j <= p) {
                    return Err(DataError::Format {
                        line: i + 1,
                        message: "feature indices must be strictly increasing".into(),
                    });
                }
                prev = Some(j);
                ds.indices.push(j as u32);
                ds.values.push(v);
            }
            ds.indptr.push(ds.indices.len());
            ds.labels.push(y);
        }
        ds.recompute_norms();
        Ok(ds)
    }

    fn recompute_norms(&mut self) {
        self.row_norms = (0..self.n())
            .map(|i| self.row(i).values.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect();
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> SparseRow<'_> {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        SparseRow {
            indices: &self.indices[a..b],
            values: &self.values[a..b],
        }
    }

    #[inline]
    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn row_norms(&self) -> &[f64] {
        &self.row_norms
    }

    pub fn max_row_norm(&self) -> f64 {
        self.row_norms.iter().copied().fold(0.0, f64::max)
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// Scales every nonzero row to unit Euclidean norm. Zero rows and labels
    /// are left untouched. Rows already at unit norm are copied verbatim, so
    /// the operation is idempotent.
    pub fn normalize_rows(&self) -> Dataset {
        let mut out = self.clone();
        for i in 0..out.n() {
            let norm = self.row_norms[i];
            if norm == 0.0 || norm == 1.0 {
                continue;
            }
            let (a, b) = (out.indptr[i], out.indptr[i + 1]);
            for v in &mut out.values[a..b] {
                *v /= norm;
            }
        }
        out.recompute_norms();
        out
    }

    /// Serializes back to LIBSVM text with `+1`/`-1` labels and shortest
    /// round-tripping value formatting.
    pub fn to_libsvm(&self) -> String {
        let mut s = String::with_capacity(self.nnz() * 8 + self.n() * 4);
        for i in 0..self.n() {
            s.push_str(if self.labels[i] > 0.0 { "+1" } else { "-1" });
            let row = self.row(i);
            for (&j, &v) in row.indices.iter().zip(row.values) {
                let _ = write!(s, " {}:{}", j + 1, v);
            }
            s.push('\n');
        }
        s
    }
}

/// Parses LIBSVM text from any buffered reader.
pub fn parse_libsvm<R: BufRead>(reader: R, opts: ParseOptions) -> Result<Dataset, DataError> {
    let mut raw_labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut tokens = text.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label: f64 = parse_real(label_tok, lineno)?;

        let mut row = Vec::new();
        let mut prev = 0usize;
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| DataError::Parse {
                line: lineno,
                token: tok.to_string(),
                reason: "expected index:value",
            })?;
            let idx: usize = idx.parse().map_err(|_| DataError::Parse {
                line: lineno,
                token: tok.to_string(),
                reason: "feature index is not a positive integer",
            })?;
            let val = parse_real(val, lineno)?;
            if idx == 0 {
                return Err(DataError::Format {
                    line: lineno,
                    message: "feature indices are 1-based; found 0".into(),
                });
            }
            if idx <= prev {
                return Err(DataError::Format {
                    line: lineno,
                    message: format!("feature index {idx} does not increase after {prev}"),
                });
            }
            prev = idx;
            max_index = max_index.max(idx);
            row.push((idx - 1, val));
        }
        raw_labels.push(label);
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    let dim = match opts.dim {
        Some(d) if d < max_index => {
            return Err(DataError::DimensionOverride {
                requested: d,
                max_index,
            })
        }
        Some(d) => d,
        None => max_index,
    };
    let labels = remap_labels(&raw_labels);
    Dataset::from_rows(dim, &rows, &labels)
}

pub fn parse_libsvm_str(text: &str, opts: ParseOptions) -> Result<Dataset, DataError> {
    parse_libsvm(text.as_bytes(), opts)
}

pub fn read_libsvm(path: &Path, opts: ParseOptions) -> crate::Result<Dataset> {
    let file = File::open(path).map_err(|source| crate::Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_libsvm(BufReader::new(file), opts)?)
}

fn parse_real(tok: &str, line: usize) -> Result<f64, DataError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(DataError::Parse {
            line,
            token: tok.to_string(),
            reason: "value is not finite",
        }),
        Err(_) => Err(DataError::Parse {
            line,
            token: tok.to_string(),
            reason: "not a number",
        }),
    }
}

fn remap_labels(raw: &[f64]) -> Vec<f64> {
    let mut distinct: Vec<f64> = raw.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if let [lo, hi] = distinct[..] {
        if lo > 0.0 {
            return raw.iter().map(|&y| if y == hi { 1.0 } else { -1.0 }).collect();
        }
    }
    raw.iter().map(|&y| if y > 0.0 { 1.0 } else { -1.0 }).collect()
}
