use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::DataError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl LabelColumn {
    /// A column name, or a 0-based index when the text is a number.
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadOptions {
    pub label: LabelColumn,
    pub header: bool,
    /// Drop rows with empty or "?" cells instead of failing.
    pub skip_incomplete: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { label: LabelColumn::Last, header: true, skip_incomplete: false }
    }
}

fn is_missing(s: &str) -> bool {
    s.is_empty() || s == "?" || s.eq_ignore_ascii_case("na")
}

pub fn load_csv(bytes: &[u8], opts: &LoadOptions) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut records = rdr.records();
    let mut line = 0usize;
    let first = loop {
        match records.next() {
            None => return Err(DataError::Empty),
            Some(r) => {
                let r = r?;
                line += 1;
                if !(r.len() == 1 && r[0].is_empty()) {
                    break r;
                }
            }
        }
    };
    let width = first.len();
    let names: Vec<String> = if opts.header {
        first.iter().map(str::to_string).collect()
    } else {
        (0..width).map(|i| format!("X{}", i + 1)).collect()
    };
    let label_idx = match &opts.label {
        LabelColumn::Last => width.checked_sub(1).ok_or(DataError::Empty)?,
        LabelColumn::Index(i) if *i < width => *i,
        LabelColumn::Index(i) => return Err(DataError::MissingLabel(i.to_string())),
        LabelColumn::Name(n) => names
            .iter()
            .position(|c| c == n)
            .ok_or_else(|| DataError::MissingLabel(n.clone()))?,
    };
    let columns: Vec<String> = names.iter().enumerate().filter(|(i, _)| *i != label_idx).map(|(_, c)| c.clone()).collect();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut pending = if opts.header { None } else { Some((line, first)) };
    loop {
        let (ln, rec) = match pending.take() {
            Some(x) => x,
            None => match records.next() {
                None => break,
                Some(r) => {
                    line += 1;
                    (line, r?)
                }
            },
        };
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != width {
            return Err(DataError::Ragged { line: ln, expected: width, found: rec.len() });
        }
        let mut row = Vec::with_capacity(width - 1);
        let mut incomplete = false;
        for (i, cell) in rec.iter().enumerate() {
            if i == label_idx {
                continue;
            }
            if is_missing(cell) {
                if opts.skip_incomplete {
                    incomplete = true;
                    break;
                }
                return Err(DataError::Missing { line: ln, column: names[i].clone() });
            }
            let v: f64 = cell.parse().map_err(|_| DataError::NonNumeric {
                line: ln,
                column: names[i].clone(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(DataError::NonNumeric { line: ln, column: names[i].clone(), value: cell.to_string() });
            }
            row.push(v);
        }
        let label = &rec[label_idx];
        if incomplete || is_missing(label) {
            if opts.skip_incomplete {
                continue;
            }
            return Err(DataError::Missing { line: ln, column: names[label_idx].clone() });
        }
        rows.push(row);
        labels.push(label.to_string());
    }
    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    Dataset::new(columns, rows, labels)
}

/// Header plus one line per row, label last. Values use the shortest
/// representation that parses back to the same number.
pub fn to_csv(ds: &Dataset, label_name: &str) -> String {
    let mut out = String::new();
    for c in &ds.columns {
        out.push_str(c);
        out.push(',');
    }
    out.push_str(label_name);
    out.push('\n');
    for (r, l) in ds.rows.iter().zip(&ds.labels) {
        for v in r {
            out.push_str(&format!("{v},"));
        }
        out.push_str(l);
        out.push('\n');
    }
    out
}
