//! Dense datasets and their text formats (CSV and libsvm sparse).

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{OccError, Result};

/// Class membership of a sample. `Target` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Target,
    Outlier,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Target => "target",
            Label::Outlier => "outlier",
        }
    }

    pub fn is_target(self) -> bool {
        self == Label::Target
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = OccError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "target" => Ok(Label::Target),
            "outlier" => Ok(Label::Outlier),
            other => Err(OccError::Domain(format!("unknown label {other:?}"))),
        }
    }
}

/// Dense samples with optional labels.
///
/// Every sample has the same dimension (at least one) and only finite
/// entries; the constructor enforces both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    samples: Vec<Vec<f64>>,
    labels: Option<Vec<Label>>,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        samples: Vec<Vec<f64>>,
        labels: Option<Vec<Label>>,
    ) -> Result<Self> {
        let first = samples.first().ok_or(OccError::EmptyDataset)?;
        let dim = first.len();
        if dim == 0 {
            return Err(OccError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for (row, s) in samples.iter().enumerate() {
            if s.len() != dim {
                return Err(OccError::DimensionMismatch {
                    expected: dim,
                    found: s.len(),
                });
            }
            if let Some(column) = s.iter().position(|v| !v.is_finite()) {
                return Err(OccError::Parse {
                    row: row + 1,
                    column: column + 1,
                    message: "non-finite value".into(),
                });
            }
        }
        if let Some(l) = &labels {
            if l.len() != samples.len() {
                return Err(OccError::LengthMismatch {
                    left: samples.len(),
                    right: l.len(),
                });
            }
        }
        Ok(Dataset {
            name: name.into(),
            samples,
            labels,
            feature_names: None,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.dim() {
            return Err(OccError::DimensionMismatch {
                expected: self.dim(),
                found: names.len(),
            });
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].len()
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn n_targets(&self) -> usize {
        self.labels
            .as_ref()
            .map_or(0, |l| l.iter().filter(|l| l.is_target()).count())
    }

    /// Target samples only; an unlabeled dataset is treated as all-target.
    pub fn target_samples(&self) -> Vec<Vec<f64>> {
        match &self.labels {
            None => self.samples.clone(),
            Some(labels) => self
                .samples
                .iter()
                .zip(labels)
                .filter(|(_, l)| l.is_target())
                .map(|(s, _)| s.clone())
                .collect(),
        }
    }

    /// Dataset made of the rows at `indices`, in that order.
    pub fn subset(&self, name: impl Into<String>, indices: &[usize]) -> Result<Dataset> {
        let samples = indices.iter().map(|&i| self.samples[i].clone()).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        let mut ds = Dataset::new(name, samples, labels)?;
        ds.feature_names = self.feature_names.clone();
        Ok(ds)
    }

    pub(crate) fn map_samples(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Dataset {
        Dataset {
            name: self.name.clone(),
            samples: self.samples.iter().map(|s| f(s)).collect(),
            labels: self.labels.clone(),
            feature_names: self.feature_names.clone(),
        }
    }
}

/// How to read a CSV file into a [`Dataset`].
#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub has_header: bool,
    /// Column holding the class; a header name, or a 0-based index when the
    /// file has no header.
    pub label_column: Option<String>,
    /// Label value that marks the target class; any other value is an outlier.
    pub target_label: String,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            has_header: true,
            label_column: None,
            target_label: "target".into(),
            delimiter: b',',
        }
    }
}

fn label_matches(value: &str, target: &str) -> bool {
    let value = value.trim();
    if value == target {
        return true;
    }
    // "+1" and "1" (or "1.0") name the same class.
    match (value.parse::<f64>(), target.parse::<f64>()) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

fn parse_cell(cell: &str, row: usize, column: usize) -> Result<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| OccError::Parse {
        row,
        column,
        message: format!("cannot parse {cell:?} as a number"),
    })?;
    if !v.is_finite() {
        return Err(OccError::Parse {
            row,
            column,
            message: format!("non-finite value {cell:?}"),
        });
    }
    Ok(v)
}

/// Reads a CSV file. Rows and columns in errors are 1-based file positions.
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| OccError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(opts.has_header)
        .delimiter(opts.delimiter)
        .flexible(true)
        .from_reader(file);

    let header: Option<Vec<String>> = if opts.has_header {
        let h = reader.headers().map_err(|e| csv_error(path, e))?;
        Some(h.iter().map(|s| s.trim().to_string()).collect())
    } else {
        None
    };

    let label_idx = match (&opts.label_column, &header) {
        (None, _) => None,
        (Some(name), Some(h)) => Some(h.iter().position(|c| c == name).ok_or_else(|| {
            OccError::Domain(format!("label column {name:?} not found in header"))
        })?),
        (Some(idx), None) => Some(idx.parse::<usize>().map_err(|_| {
            OccError::Domain(format!(
                "label column {idx:?} must be a 0-based index when the file has no header"
            ))
        })?),
    };

    let mut samples = Vec::new();
    let mut labels = Vec::new();
    let mut arity: Option<usize> = header.as_ref().map(Vec::len);
    let row_offset = usize::from(opts.has_header) + 1;

    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = i + row_offset;
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        match arity {
            None => arity = Some(record.len()),
            Some(a) if a != record.len() => {
                return Err(OccError::DimensionMismatch {
                    expected: a,
                    found: record.len(),
                })
            }
            _ => {}
        }
        let mut values = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == label_idx {
                labels.push(if label_matches(cell, &opts.target_label) {
                    Label::Target
                } else {
                    Label::Outlier
                });
            } else {
                values.push(parse_cell(cell, row, col + 1)?);
            }
        }
        samples.push(values);
    }

    if let (Some(idx), Some(a)) = (label_idx, arity) {
        if idx >= a {
            return Err(OccError::Domain(format!(
                "label column {idx} out of range for {a} columns"
            )));
        }
    }

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ds = Dataset::new(name, samples, label_idx.map(|_| labels))?;
    match header {
        Some(h) => {
            let names = h
                .into_iter()
                .enumerate()
                .filter(|(i, _)| Some(*i) != label_idx)
                .map(|(_, n)| n)
                .collect();
            ds.with_feature_names(names)
        }
        None => Ok(ds),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> OccError {
    match e.kind() {
        csv::ErrorKind::Io(_) => match e.into_kind() {
            csv::ErrorKind::Io(io) => OccError::io(path, io),
            _ => unreachable!(),
        },
        _ => {
            let row = e.position().map_or(0, |p| p.line() as usize);
            OccError::Parse {
                row,
                column: 0,
                message: e.to_string(),
            }
        }
    }
}

/// Writes a dataset as CSV with a header. Labels, when present, go to a
/// trailing `label` column as `target`/`outlier`.
pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| OccError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| OccError::io(path, e);

    let names: Vec<String> = match ds.feature_names() {
        Some(n) => n.to_vec(),
        None => (0..ds.dim()).map(|i| format!("f{i}")).collect(),
    };
    let mut header = names.join(",");
    if ds.labels().is_some() {
        header.push_str(",label");
    }
    writeln!(w, "{header}").map_err(io)?;
    for (i, s) in ds.samples().iter().enumerate() {
        let mut line = s
            .iter()
            .map(|v| format!("{v}"))
            .collect::<Vec<_>>()
            .join(",");
        if let Some(labels) = ds.labels() {
            line.push(',');
            line.push_str(labels[i].as_str());
        }
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads libsvm sparse text (`label idx:val ...`, 1-based strictly
/// increasing indices). Rows are padded with zeros up to the largest index.
pub fn load_libsvm(path: impl AsRef<Path>, target_label: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| OccError::io(path, e))?;
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;

    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| OccError::io(path, e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = tokens.next().expect("non-empty line has a token");
        labels.push(if label_matches(label, target_label) {
            Label::Target
        } else {
            Label::Outlier
        });

        let mut entries = Vec::new();
        let mut last = 0usize;
        for (t, tok) in tokens.enumerate() {
            let column = t + 2;
            let (idx, val) = tok.split_once(':').ok_or_else(|| OccError::Parse {
                row: line_no,
                column,
                message: format!("expected idx:val, found {tok:?}"),
            })?;
            if idx == "qid" {
                continue;
            }
            let idx: usize = idx.parse().map_err(|_| OccError::Parse {
                row: line_no,
                column,
                message: format!("bad index {idx:?}"),
            })?;
            if idx == 0 || idx <= last {
                return Err(OccError::Index {
                    line: line_no,
                    message: format!(
                        "index {idx} after {last}: indices must be 1-based and increasing"
                    ),
                });
            }
            last = idx;
            entries.push((idx, parse_cell(val, line_no, column)?));
        }
        max_index = max_index.max(last);
        rows.push(entries);
    }

    if rows.is_empty() {
        return Err(OccError::EmptyDataset);
    }
    let dim = max_index.max(1);
    let samples = rows
        .into_iter()
        .map(|entries| {
            let mut v = vec![0.0; dim];
            for (idx, val) in entries {
                v[idx - 1] = val;
            }
            v
        })
        .collect();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Dataset::new(name, samples, Some(labels))
}
