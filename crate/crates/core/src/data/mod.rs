//! Datasets: CSV ingestion, min-max normalization, padding to even
//! dimension, and the synthetic point sets used to probe the geometry.

mod csvio;
mod synth;

pub use csvio::{load_csv, to_csv, LabelColumn, LoadOptions};
pub use synth::{generate_synthetic, SyntheticFamily};

use serde::{Deserialize, Serialize};

use crate::error::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub min: f64,
    pub max: f64,
}

/// Min/max per column, as fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub columns: Vec<ColumnStats>,
}

impl Normalizer {
    pub fn fit(ds: &Dataset) -> Self {
        Normalizer { columns: ds.stats.clone() }
    }

    pub fn scale(&self, col: usize, v: f64) -> f64 {
        let ColumnStats { min, max } = self.columns[col];
        if max > min {
            (v - min) / (max - min)
        } else {
            0.5
        }
    }

    /// Normalized copy of `ds`, with out-of-range values clamped to [0, 1].
    /// Returns the copy and the number of clamped cells.
    pub fn apply(&self, ds: &Dataset) -> Result<(Dataset, usize), DataError> {
        if ds.n() != self.columns.len() {
            return Err(DataError::Config(format!(
                "normalizer has {} columns, data has {}",
                self.columns.len(),
                ds.n()
            )));
        }
        let mut clamped = 0;
        let rows = ds
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(c, &v)| {
                        let s = self.scale(c, v);
                        if !(0.0..=1.0).contains(&s) {
                            clamped += 1;
                        }
                        s.clamp(0.0, 1.0)
                    })
                    .collect()
            })
            .collect();
        let mut out = Dataset::new(ds.columns.clone(), rows, ds.labels.clone())?;
        out.scaling = Some(self.clone());
        Ok((out, clamped))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    /// Per-column min/max of `rows`.
    pub stats: Vec<ColumnStats>,
    /// Statistics the rows were normalized with, once normalized.
    #[serde(default)]
    pub scaling: Option<Normalizer>,
}

impl Dataset {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self, DataError> {
        let n = columns.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(DataError::Ragged { line: i + 1, expected: n, found: r.len() });
        }
        if labels.len() != rows.len() {
            return Err(DataError::Config(format!("{} labels for {} rows", labels.len(), rows.len())));
        }
        let stats = column_stats(&rows, n);
        Ok(Dataset { columns, rows, labels, stats, scaling: None })
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct labels, sorted.
    pub fn classes(&self) -> Vec<String> {
        let mut c: Vec<String> = self.labels.clone();
        c.sort();
        c.dedup();
        c
    }

    pub fn subset(&self, idx: &[usize]) -> Result<Dataset, DataError> {
        let mut out = Dataset::new(
            self.columns.clone(),
            idx.iter().map(|&i| self.rows[i].clone()).collect(),
            idx.iter().map(|&i| self.labels[i].clone()).collect(),
        )?;
        out.scaling = self.scaling.clone();
        Ok(out)
    }
}

fn column_stats(rows: &[Vec<f64>], n: usize) -> Vec<ColumnStats> {
    let mut s = vec![ColumnStats { min: f64::INFINITY, max: f64::NEG_INFINITY }; n];
    for r in rows {
        for (c, &v) in r.iter().enumerate() {
            s[c].min = s[c].min.min(v);
            s[c].max = s[c].max.max(v);
        }
    }
    if rows.is_empty() {
        s.iter_mut().for_each(|c| *c = ColumnStats { min: 0.0, max: 0.0 });
    }
    s
}

/// Min-max normalization; constant columns map to 0.5.
pub fn normalize(ds: &Dataset) -> Dataset {
    let norm = Normalizer::fit(ds);
    // Fitted on the data itself, so nothing can fall outside.
    norm.apply(ds).map(|(d, _)| d).expect("normalizer fitted on the same columns")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PaddingPolicy {
    #[default]
    DuplicateLast,
    Constant(f64),
    None,
}

impl PaddingPolicy {
    /// `dup`, `none` or `const:<v>`.
    pub fn parse(s: &str) -> Result<Self, DataError> {
        match s {
            "dup" => Ok(PaddingPolicy::DuplicateLast),
            "none" => Ok(PaddingPolicy::None),
            _ => {
                let v = s
                    .strip_prefix("const:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| DataError::Config(format!("bad padding '{s}', want dup|const:<v>|none")))?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(DataError::Config(format!("padding constant {v} outside [0, 1]")));
                }
                Ok(PaddingPolicy::Constant(v))
            }
        }
    }
}

/// Makes the dimension even. Even input comes back unchanged; `None` leaves
/// odd input odd, and the layout rejects it later.
pub fn pad(ds: &Dataset, policy: PaddingPolicy) -> Result<Dataset, DataError> {
    if ds.n() % 2 == 0 || policy == PaddingPolicy::None {
        return Ok(ds.clone());
    }
    let last = ds.n() - 1;
    let (name, fill): (String, Box<dyn Fn(&[f64]) -> f64>) = match policy {
        PaddingPolicy::DuplicateLast => (format!("{}_dup", ds.columns[last]), Box::new(move |r| r[last])),
        PaddingPolicy::Constant(c) => {
            if !(0.0..=1.0).contains(&c) {
                return Err(DataError::Config(format!("padding constant {c} outside [0, 1]")));
            }
            ("pad".to_string(), Box::new(move |_| c))
        }
        PaddingPolicy::None => unreachable!(),
    };
    let mut columns = ds.columns.clone();
    columns.push(name);
    let rows = ds
        .rows
        .iter()
        .map(|r| {
            let mut r2 = r.clone();
            r2.push(fill(r));
            r2
        })
        .collect();
    let mut out = Dataset::new(columns, rows, ds.labels.clone())?;
    out.scaling = ds.scaling.clone();
    Ok(out)
}
