//! Two-class tabular datasets: the UCI `wdbc.data` layout and headed CSV files.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Feature names of the diagnostic Wisconsin breast cancer data, in file order.
pub const WDBC_FEATURES: [&str; 30] = [
    "radius mean",
    "texture mean",
    "perimeter mean",
    "area mean",
    "smoothness mean",
    "compactness mean",
    "concavity mean",
    "concave points mean",
    "symmetry mean",
    "fractal dimension mean",
    "radius se",
    "texture se",
    "perimeter se",
    "area se",
    "smoothness se",
    "compactness se",
    "concavity se",
    "concave points se",
    "symmetry se",
    "fractal dimension se",
    "radius worst",
    "texture worst",
    "perimeter worst",
    "area worst",
    "smoothness worst",
    "compactness worst",
    "concavity worst",
    "concave points worst",
    "symmetry worst",
    "fractal dimension worst",
];

/// Class label. `Positive` is the malignant class on WDBC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        matches!(self, Label::Positive)
    }

    /// `+1.0` for positive, `-1.0` for negative.
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }
}

/// Immutable feature-major table: `values[f][n]` is feature `f` of sample `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    values: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

impl Dataset {
    pub fn new(names: Vec<String>, values: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidDataset(msg));
        if names.is_empty() {
            return invalid("no features".into());
        }
        if names.len() != values.len() {
            return invalid(format!(
                "{} feature names but {} feature rows",
                names.len(),
                values.len()
            ));
        }
        let n = labels.len();
        if n < 4 {
            return invalid(format!("need at least 4 samples, got {n}"));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return invalid(format!("duplicate feature name `{name}`"));
            }
        }
        for (name, row) in names.iter().zip(&values) {
            if row.len() != n {
                return invalid(format!(
                    "feature `{name}` has {} values, expected {n}",
                    row.len()
                ));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return invalid(format!("feature `{name}` contains a non-finite value"));
            }
        }
        let positives = labels.iter().filter(|l| l.is_positive()).count();
        let negatives = n - positives;
        if positives < 2 || negatives < 2 {
            return invalid(format!(
                "each class needs at least 2 samples (positive: {positives}, negative: {negatives})"
            ));
        }
        Ok(Dataset {
            names,
            values,
            labels,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// All samples of feature `i`, in row order.
    pub fn feature(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|l| l.is_positive()).count()
    }

    pub fn n_negative(&self) -> usize {
        self.n_samples() - self.n_positive()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Split feature `i` into its positive and negative samples.
    pub fn group(&self, i: usize) -> Result<GroupedFeature> {
        if i >= self.n_features() {
            return Err(Error::FeatureIndex {
                index: i,
                count: self.n_features(),
            });
        }
        let mut m = Vec::with_capacity(self.n_positive());
        let mut b = Vec::with_capacity(self.n_negative());
        for (&v, label) in self.values[i].iter().zip(&self.labels) {
            match label {
                Label::Positive => m.push(v),
                Label::Negative => b.push(v),
            }
        }
        Ok(GroupedFeature {
            index: i,
            name: self.names[i].clone(),
            m,
            b,
        })
    }

    /// Sub-dataset restricted to the given feature indices, in the given order.
    pub fn select_features(&self, indices: &[usize]) -> Result<Dataset> {
        let mut names = Vec::with_capacity(indices.len());
        let mut values = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n_features() {
                return Err(Error::FeatureIndex {
                    index: i,
                    count: self.n_features(),
                });
            }
            names.push(self.names[i].clone());
            values.push(self.values[i].clone());
        }
        Dataset::new(names, values, self.labels.clone())
    }

    /// Write as a headed CSV readable by [`load_generic`], with the label in a
    /// trailing `class` column.
    pub fn write_csv<W: Write>(&self, writer: W, positive: &str, negative: &str) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let io_err = |e: csv::Error| Error::Io {
            path: PathBuf::from("<output>"),
            source: io::Error::new(io::ErrorKind::Other, e),
        };
        let mut header: Vec<&str> = self.names.iter().map(String::as_str).collect();
        header.push("class");
        out.write_record(&header).map_err(io_err)?;
        for n in 0..self.n_samples() {
            let mut record: Vec<String> = self.values.iter().map(|row| row[n].to_string()).collect();
            record.push(match self.labels[n] {
                Label::Positive => positive.to_string(),
                Label::Negative => negative.to_string(),
            });
            out.write_record(&record).map_err(io_err)?;
        }
        out.flush().map_err(|source| Error::Io {
            path: PathBuf::from("<output>"),
            source,
        })
    }
}

/// Samples of one feature split by class.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedFeature {
    pub index: usize,
    pub name: String,
    /// Positive-class (malignant) samples.
    pub m: Vec<f64>,
    /// Negative-class (benign) samples.
    pub b: Vec<f64>,
}

impl GroupedFeature {
    pub fn new(name: impl Into<String>, m: Vec<f64>, b: Vec<f64>) -> Self {
        GroupedFeature {
            index: 0,
            name: name.into(),
            m,
            b,
        }
    }

    pub fn n1(&self) -> usize {
        self.m.len()
    }

    pub fn n2(&self) -> usize {
        self.b.len()
    }

    /// The same feature with the groups exchanged.
    pub fn swapped(&self) -> Self {
        GroupedFeature {
            index: self.index,
            name: self.name.clone(),
            m: self.b.clone(),
            b: self.m.clone(),
        }
    }

    /// Orders the groups so that the first has the larger (or equal) mean.
    /// Returns the oriented feature and whether the groups were exchanged.
    pub fn oriented(&self) -> (Self, bool) {
        let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
        if mean(&self.m) < mean(&self.b) {
            (self.swapped(), true)
        } else {
            (self.clone(), false)
        }
    }
}

/// Non-fatal findings while loading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadWarning {
    DuplicateId { id: String, line: usize },
}

impl std::fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadWarning::DuplicateId { id, line } => {
                write!(f, "line {line}: duplicate sample id `{id}`")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub dataset: Dataset,
    pub warnings: Vec<LoadWarning>,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_real(field: &str) -> Option<f64> {
    let field = field.trim();
    // Rust's parser accepts "inf"/"NaN"; only finite period-decimal numbers pass.
    if !field
        .bytes()
        .all(|c| c.is_ascii_digit() || matches!(c, b'.' | b'-' | b'+' | b'e' | b'E'))
    {
        return None;
    }
    field.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Load the UCI `wdbc.data` layout: `id,diagnosis,f1,...,f30`, no header.
pub fn load_wdbc(path: impl AsRef<Path>) -> Result<Loaded> {
    let path = path.as_ref();
    read_wdbc(open(path)?, path)
}

/// Like [`load_wdbc`] but from any reader; `source` is used in messages.
///
/// Files with fewer than 30 features are accepted as long as every row has
/// the same width; features beyond the 30 canonical names are named `f<k>`.
pub fn read_wdbc<R: Read>(reader: R, source: &Path) -> Result<Loaded> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        message,
    };

    let mut width = None;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut ids = HashSet::new();
    let mut warnings = Vec::new();

    for (row, record) in rdr.records().enumerate() {
        let line = row + 1;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        if record.len() < 3 {
            return Err(parse_err(
                line,
                format!("expected id, diagnosis and features, got {} fields", record.len()),
            ));
        }
        let n_features = record.len() - 2;
        match width {
            None => {
                width = Some(n_features);
                columns = vec![Vec::new(); n_features];
            }
            Some(w) if w != n_features => {
                return Err(parse_err(
                    line,
                    format!("expected {} fields, got {}", w + 2, record.len()),
                ));
            }
            _ => {}
        }

        let id = record[0].trim().to_string();
        if !ids.insert(id.clone()) {
            warnings.push(LoadWarning::DuplicateId { id, line });
        }

        labels.push(match record[1].trim() {
            "M" => Label::Positive,
            "B" => Label::Negative,
            other => {
                return Err(parse_err(line, format!("unknown diagnosis code `{other}`")));
            }
        });
        for (k, field) in record.iter().skip(2).enumerate() {
            let v = parse_real(field).ok_or_else(|| {
                parse_err(line, format!("field {} is not a finite number: `{field}`", k + 3))
            })?;
            columns[k].push(v);
        }
    }

    let width = width.ok_or_else(|| parse_err(0, "empty file".into()))?;
    let names = (0..width)
        .map(|k| match WDBC_FEATURES.get(k) {
            Some(name) if width <= WDBC_FEATURES.len() => name.to_string(),
            _ => format!("f{}", k + 1),
        })
        .collect();
    let dataset = Dataset::new(names, columns, labels)?;
    Ok(Loaded { dataset, warnings })
}

/// Load a headed CSV. `label_column` holds exactly two distinct values, one of
/// which is `positive_label`; every other column must be numeric.
pub fn load_generic(
    path: impl AsRef<Path>,
    label_column: &str,
    positive_label: &str,
) -> Result<Loaded> {
    let path = path.as_ref();
    read_generic(open(path)?, path, label_column, positive_label)
}

pub fn read_generic<R: Read>(
    reader: R,
    source: &Path,
    label_column: &str,
    positive_label: &str,
) -> Result<Loaded> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        message,
    };
    let header = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if header.is_empty() || (header.len() == 1 && header[0].trim().is_empty()) {
        return Err(parse_err(1, "empty file".into()));
    }
    let label_idx = header
        .iter()
        .position(|h| h.trim() == label_column)
        .ok_or_else(|| parse_err(1, format!("missing label column `{label_column}`")))?;

    let feature_cols: Vec<usize> = (0..header.len()).filter(|&c| c != label_idx).collect();
    let names: Vec<String> = feature_cols
        .iter()
        .map(|&c| header[c].trim().to_string())
        .collect();
    let mut columns = vec![Vec::new(); feature_cols.len()];
    let mut raw_labels = Vec::new();
    let mut distinct: Vec<String> = Vec::new();

    for (row, record) in rdr.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        let label = record[label_idx].trim().to_string();
        if !distinct.contains(&label) {
            distinct.push(label.clone());
            if distinct.len() > 2 {
                return Err(parse_err(
                    line,
                    format!(
                        "label column `{label_column}` has more than two values ({})",
                        distinct.join(", ")
                    ),
                ));
            }
        }
        raw_labels.push(label);
        for (slot, &c) in feature_cols.iter().enumerate() {
            let v = parse_real(&record[c]).ok_or_else(|| {
                parse_err(
                    line,
                    format!("column `{}` is not a finite number: `{}`", names[slot], &record[c]),
                )
            })?;
            columns[slot].push(v);
        }
    }
    if raw_labels.is_empty() {
        return Err(parse_err(2, "no data rows".into()));
    }
    if !distinct.iter().any(|d| d == positive_label) {
        return Err(Error::InvalidDataset(format!(
            "positive label `{positive_label}` not found in column `{label_column}`"
        )));
    }
    let labels = raw_labels
        .iter()
        .map(|l| {
            if l == positive_label {
                Label::Positive
            } else {
                Label::Negative
            }
        })
        .collect();
    let dataset = Dataset::new(names, columns, labels)?;
    Ok(Loaded {
        dataset,
        warnings: Vec::new(),
    })
}
