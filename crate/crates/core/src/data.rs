//! Dataset ingestion, synthetic data generation, and CCDF export.
//!
//! Values are treated as unitless positives; the monetary unit of a rich
//! list is free-text metadata, since every downstream estimate is
//! scale-equivariant.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::replicate_rng;
use crate::model::{PowerLawParams, TailModel};

/// A validated, ascending-sorted sample of positive values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    values: Vec<f64>,
    pub label: String,
    pub year: Option<i32>,
    pub source: Option<String>,
}

impl Dataset {
    pub fn new(mut values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("dataset is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::Input(format!("non-positive or non-finite value {bad}")));
        }
        values.sort_by(|a, b| a.total_cmp(b));
        Ok(Self { values, label: label.into(), year: None, source: None })
    }

    pub fn with_year(mut self, year: i32) -> Self {
        self.year = Some(year);
        self
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The observations with x >= x_min (the values are sorted).
    pub fn tail(&self, x_min: f64) -> &[f64] {
        let i = self.values.partition_point(|&v| v < x_min);
        &self.values[i..]
    }

    /// The observations with x < x_min.
    pub fn body(&self, x_min: f64) -> &[f64] {
        let i = self.values.partition_point(|&v| v < x_min);
        &self.values[..i]
    }

    pub fn summary(&self) -> SummaryStats {
        let n = self.values.len();
        let median = if n % 2 == 1 {
            self.values[n / 2]
        } else {
            0.5 * (self.values[n / 2 - 1] + self.values[n / 2])
        };
        SummaryStats {
            n,
            min: self.values[0],
            max: self.values[n - 1],
            mean: self.values.iter().sum::<f64>() / n as f64,
            median,
        }
    }
}

/// min/max/mean/median/n text block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

impl fmt::Display for SummaryStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n      {}", self.n)?;
        writeln!(f, "min    {}", self.min)?;
        writeln!(f, "max    {}", self.max)?;
        writeln!(f, "mean   {}", self.mean)?;
        write!(f, "median {}", self.median)
    }
}

/// Input file format for [`load`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    /// One value per line.
    Plain,
    /// Comma-separated with a header row.
    Csv,
}

/// Column selector for CSV input.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnSel {
    Index(usize),
    Name(String),
}

fn parse_value(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: {s:?}"),
    })?;
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::Parse {
            line,
            message: format!("value must be a positive finite number, got {v}"),
        });
    }
    Ok(v)
}

/// Load a dataset from a plain or CSV file; rejects non-positive, missing,
/// or non-numeric entries with the offending line number.
pub fn load(path: &Path, format: InputFormat, column: Option<&ColumnSel>) -> Result<Dataset> {
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let values = match format {
        InputFormat::Plain => {
            let reader = BufReader::new(File::open(path)?);
            let mut values = Vec::new();
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                let t = line.trim();
                if t.is_empty() {
                    continue;
                }
                values.push(parse_value(t, i + 1)?);
            }
            values
        }
        InputFormat::Csv => {
            let mut reader = csv::Reader::from_path(path)?;
            let headers = reader.headers()?.clone();
            let col = match column {
                None => 0,
                Some(ColumnSel::Index(i)) => *i,
                Some(ColumnSel::Name(name)) => headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::Input(format!("no column named {name:?}")))?,
            };
            let mut values = Vec::new();
            for (i, record) in reader.records().enumerate() {
                let record = record?;
                let line = i + 2; // 1-based, after the header
                let field = record.get(col).ok_or(Error::Parse {
                    line,
                    message: format!("missing column {col}"),
                })?;
                values.push(parse_value(field, line)?);
            }
            values
        }
    };
    if values.is_empty() {
        return Err(Error::Input(format!("{}: no valid rows", path.display())));
    }
    let mut ds = Dataset::new(values, label)?;
    ds.source = Some(path.display().to_string());
    Ok(ds)
}

/// Write the dataset as plain text, one value per line, 17 significant
/// digits so that load ∘ save is exact.
pub fn save(data: &Dataset, path: &Path) -> Result<()> {
    let mut f = File::create(path)?;
    for v in data.values() {
        writeln!(f, "{v:.16e}")?;
    }
    Ok(())
}

/// Uniform body below the tail, for composite synthetic datasets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

/// Specification for [`generate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub model: TailModel,
    pub n: usize,
    pub seed: u64,
    pub body: Option<BodySpec>,
}

/// Deterministic synthetic dataset: optional uniform body plus `n` tail
/// draws from the model.
pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.model.validate()?;
    if spec.n == 0 {
        return Err(Error::Input("n must be positive".into()));
    }
    if let Some(b) = &spec.body {
        if !(b.lo > 0.0 && b.hi > b.lo) {
            return Err(Error::Input(format!("invalid body range [{}, {}]", b.lo, b.hi)));
        }
    }
    let mut rng = replicate_rng(spec.seed, 0x6765_6e65, 0); // stage tag: "gene"
    let mut values = Vec::new();
    if let Some(b) = &spec.body {
        for _ in 0..b.n {
            let u: f64 = rng.random();
            values.push(b.lo + u * (b.hi - b.lo));
        }
    }
    for _ in 0..spec.n {
        values.push(spec.model.sample(&mut rng));
    }
    Dataset::new(values, format!("synthetic-{}", spec.model.family_name()))
}

/// Empirical CCDF points with an optional fitted-model overlay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfSeries {
    /// (x, fraction of observations >= x), one point per distinct value.
    pub points: Vec<(f64, f64)>,
    pub fit_overlay: Option<Vec<(f64, f64)>>,
}

/// Rank-fraction CCDF of the tail (all data when `fit` is absent). Tied
/// values collapse to a single point carrying the largest rank fraction.
pub fn ccdf_series(data: &Dataset, fit: Option<&PowerLawParams>) -> Result<CcdfSeries> {
    let tail = match fit {
        Some(p) => data.tail(p.x_min),
        None => data.values(),
    };
    if tail.is_empty() {
        return Err(Error::Input("no observations at or above x_min".into()));
    }
    let n = tail.len();
    let mut points = Vec::new();
    let mut i = 0;
    while i < n {
        let x = tail[i];
        points.push((x, (n - i) as f64 / n as f64));
        let mut j = i + 1;
        while j < n && tail[j] == x {
            j += 1;
        }
        i = j;
    }
    let fit_overlay = match fit {
        Some(p) => Some(
            points
                .iter()
                .map(|&(x, _)| {
                    let m = TailModel::PowerLaw(*p);
                    Ok((x, m.ccdf(x)?))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(CcdfSeries { points, fit_overlay })
}

/// Write the CCDF as CSV (`x,ccdf_empirical[,ccdf_fit]`).
pub fn export_ccdf(data: &Dataset, fit: Option<&PowerLawParams>, path: &Path) -> Result<CcdfSeries> {
    let series = ccdf_series(data, fit)?;
    let mut f = File::create(path)?;
    match &series.fit_overlay {
        Some(overlay) => {
            writeln!(f, "x,ccdf_empirical,ccdf_fit")?;
            for ((x, emp), (_, model)) in series.points.iter().zip(overlay) {
                writeln!(f, "{x:.16e},{emp:.16e},{model:.16e}")?;
            }
        }
        None => {
            writeln!(f, "x,ccdf_empirical")?;
            for (x, emp) in &series.points {
                writeln!(f, "{x:.16e},{emp:.16e}")?;
            }
        }
    }
    Ok(series)
}
