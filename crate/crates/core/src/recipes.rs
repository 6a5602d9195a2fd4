//! Benchmark reproductions: one recipe per dataset, each holding one or
//! more experiments with the published figures and the thresholds a run
//! must reach. Nothing is downloaded; files come from a local directory.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::data::{load_csv, Dataset, LabelColumn, LoadOptions, PaddingPolicy};
use crate::error::{DataError, Error};
use crate::geometry::{EllipseSpec, LayoutMode};
use crate::pipeline::{layout_config, prepare, project, PrepareOptions, Projection};
use crate::rules::{classify, evaluate_split, mine, rest_label, MatchMode, MiningParams, RuleSetReport, Split, SplitReport, Target};

/// One row of the published summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PaperRow {
    pub experiment: &'static str,
    pub n: usize,
    pub classes: usize,
    pub rules: usize,
    pub recall_pct: f64,
    pub precision_pct: f64,
}

/// What recall is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecallBasis {
    /// Covered cases over all cases.
    AllCases,
    /// Correctly covered cases of the target class over its size.
    TargetClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Thresholds {
    pub max_rules: Option<usize>,
    pub min_recall_pct: f64,
    pub min_precision_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Experiment {
    pub paper: PaperRow,
    pub target: Target,
    pub modes: Vec<MatchMode>,
    pub basis: RecallBasis,
    pub thresholds: Thresholds,
}

type Loader = fn(&[u8], &str) -> Result<Dataset, DataError>;

#[derive(Debug, Clone)]
pub struct Recipe {
    pub name: &'static str,
    /// Accepted file names, first found wins.
    pub files: &'static [&'static str],
    pub padding: PaddingPolicy,
    pub layouts: Vec<LayoutMode>,
    /// Rectangle sides tried, each as width and as height.
    pub sizes: Vec<f64>,
    pub stride: f64,
    pub experiments: Vec<Experiment>,
    pub split: Option<Split>,
    loader: Loader,
}

pub const RECIPE_NAMES: [&str; 7] = ["iris", "wbc", "glass", "car", "ionosphere", "abalone", "skin"];

/// Thresholds for rows without fixed acceptance figures: 10 points of recall
/// and 5 of precision below the published values.
fn relaxed(recall: f64, precision: f64) -> Thresholds {
    Thresholds { max_rules: None, min_recall_pct: recall - 10.0, min_precision_pct: precision - 5.0 }
}

fn row(experiment: &'static str, n: usize, classes: usize, rules: usize, recall_pct: f64, precision_pct: f64) -> PaperRow {
    PaperRow { experiment, n, classes, rules, recall_pct, precision_pct }
}

fn exp(paper: PaperRow, target: Target, modes: &[MatchMode], basis: RecallBasis, thresholds: Thresholds) -> Experiment {
    Experiment { paper, target, modes: modes.to_vec(), basis, thresholds }
}

const BOTH: [MatchMode; 2] = [MatchMode::Point, MatchMode::Intersect];

pub fn recipe(name: &str) -> Option<Recipe> {
    use MatchMode::{Intersect, Point};
    use RecallBasis::{AllCases, TargetClass};
    let base = |name, files, loader: Loader, experiments| Recipe {
        name,
        files,
        padding: PaddingPolicy::DuplicateLast,
        layouts: vec![LayoutMode::Sequential, LayoutMode::Mirror],
        sizes: vec![0.1, 0.15, 0.2],
        stride: 0.05,
        experiments,
        split: None,
        loader,
    };
    let r = match name {
        "iris" => base(
            "iris",
            &["iris.csv", "iris.data"],
            load_plain,
            vec![exp(
                row("Iris", 4, 3, 3, 100.0, 98.66),
                Target::Multiclass,
                &BOTH,
                AllCases,
                Thresholds { max_rules: Some(6), min_recall_pct: 90.0, min_precision_pct: 95.0 },
            )],
        ),
        "wbc" => base(
            "wbc",
            &["wbc.csv", "breast-cancer-wisconsin.data"],
            load_wbc,
            vec![exp(
                row("Cancer", 9, 2, 5, 96.33, 95.13),
                Target::Multiclass,
                &BOTH,
                AllCases,
                Thresholds { max_rules: None, min_recall_pct: 90.0, min_precision_pct: 93.0 },
            )],
        ),
        "glass" => base(
            "glass",
            &["glass.data", "glass.csv"],
            load_plain,
            vec![
                exp(row("Glass 1", 10, 2, 3, 87.06, 98.29), Target::AllBut("5".into()), &[Point], TargetClass, relaxed(87.06, 98.29)),
                exp(row("Glass 2", 10, 2, 3, 99.51, 95.59), Target::AllBut("6".into()), &[Point], TargetClass, relaxed(99.51, 95.59)),
                exp(row("Glass 3", 10, 2, 3, 87.57, 97.53), Target::AllBut("7".into()), &[Point], TargetClass, relaxed(87.57, 97.53)),
                exp(row("Glass 4", 10, 2, 1, 79.31, 91.30), Target::FixedClass("7".into()), &[Intersect], TargetClass, relaxed(79.31, 91.30)),
            ],
        ),
        "car" => base(
            "car",
            &["car.data"],
            load_car,
            vec![exp(row("Car", 6, 4, 8, 91.24, 100.0), Target::FixedClass("unacc".into()), &[Point], TargetClass, relaxed(91.24, 100.0))],
        ),
        "ionosphere" => base(
            "ionosphere",
            &["ionosphere.data", "ionosphere.csv"],
            load_plain,
            vec![
                exp(row("Ionosphere 1", 34, 2, 5, 78.63, 91.37), Target::Multiclass, &[Intersect], AllCases, relaxed(78.63, 91.37)),
                exp(row("Ionosphere 2", 34, 2, 4, 71.51, 94.02), Target::Multiclass, &[Point], AllCases, relaxed(71.51, 94.02)),
            ],
        ),
        "abalone" => Recipe {
            split: Some(Split::Fraction { train: 0.7, seed: 7 }),
            ..base(
                "abalone",
                &["abalone.data"],
                load_abalone,
                vec![exp(row("Abalone", 8, 2, 1, 45.12, 92.83), Target::FixedClass("1".into()), &[Point], TargetClass, relaxed(45.12, 92.83))],
            )
        },
        "skin" => Recipe {
            padding: PaddingPolicy::Constant(1.0),
            ..base(
                "skin",
                &["Skin_NonSkin.txt", "skin.csv"],
                load_skin,
                vec![
                    exp(row("Skin 1", 4, 2, 4, 61.40, 94.62), Target::FixedClass("2".into()), &[Point], AllCases, relaxed(61.40, 94.62)),
                    exp(row("Skin 2", 4, 2, 3, 42.00, 97.78), Target::FixedClass("2".into()), &[Intersect], AllCases, relaxed(42.00, 97.78)),
                ],
            )
        },
        _ => return None,
    };
    Some(r)
}

fn first_cell_is_number(bytes: &[u8]) -> bool {
    let text = String::from_utf8_lossy(&bytes[..bytes.len().min(4096)]);
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    first.split(',').next().is_some_and(|c| c.trim().parse::<f64>().is_ok())
}

/// Label last, header detected from the first cell.
fn load_plain(bytes: &[u8], _file: &str) -> Result<Dataset, DataError> {
    let opts = LoadOptions { label: LabelColumn::Last, header: !first_cell_is_number(bytes), skip_incomplete: true };
    load_csv(bytes, &opts)
}

/// Either our 9-feature CSV or the UCI file with its leading id column and
/// 2/4 class codes.
fn load_wbc(bytes: &[u8], file: &str) -> Result<Dataset, DataError> {
    let ds = load_plain(bytes, file)?;
    if ds.n() != 10 {
        return Ok(ds);
    }
    let rows = ds.rows.iter().map(|r| r[1..].to_vec()).collect();
    let labels = ds
        .labels
        .iter()
        .map(|l| match l.as_str() {
            "2" => "benign".to_string(),
            "4" => "malignant".to_string(),
            other => other.to_string(),
        })
        .collect();
    Dataset::new(ds.columns[1..].to_vec(), rows, labels)
}

fn encode(rows: &str, file: &str, columns: &[&str], code: impl Fn(usize, &str) -> Option<String>) -> Result<Vec<u8>, DataError> {
    let mut out = columns.join(",");
    out.push('\n');
    for (ln, line) in rows.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let coded: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                code(i, c).ok_or_else(|| DataError::NonNumeric {
                    line: ln + 1,
                    column: columns.get(i).unwrap_or(&"?").to_string(),
                    value: format!("{c} ({file})"),
                })
            })
            .collect::<Result<_, _>>()?;
        out.push_str(&coded.join(","));
        out.push('\n');
    }
    Ok(out.into_bytes())
}

/// Ordinal codes for the six categorical attributes; the class stays text.
fn load_car(bytes: &[u8], file: &str) -> Result<Dataset, DataError> {
    let cols = ["buying", "maint", "doors", "persons", "lug_boot", "safety", "class"];
    let text = String::from_utf8_lossy(bytes);
    let csv = encode(&text, file, &cols, |i, c| {
        let v = match (i, c) {
            (0 | 1, "low") | (4, "small") | (5, "low") => 1,
            (0 | 1, "med") | (4, "med") | (5, "med") => 2,
            (0 | 1, "high") | (4, "big") | (5, "high") => 3,
            (0 | 1, "vhigh") => 4,
            (2, "5more") | (3, "more") => 5,
            (2 | 3, n) => n.parse().ok()?,
            (6, class) => return Some(class.to_string()),
            _ => return None,
        };
        Some(v.to_string())
    })?;
    load_csv(&csv, &LoadOptions::default())
}

/// Sex coded M=1, F=2, I=3; rings up to 9 are class 1, older class 2.
fn load_abalone(bytes: &[u8], file: &str) -> Result<Dataset, DataError> {
    let cols = ["sex", "length", "diameter", "height", "whole", "shucked", "viscera", "shell", "class"];
    let text = String::from_utf8_lossy(bytes);
    let csv = encode(&text, file, &cols, |i, c| match (i, c) {
        (0, "M") => Some("1".into()),
        (0, "F") => Some("2".into()),
        (0, "I") => Some("3".into()),
        (8, rings) => rings.parse::<u32>().ok().map(|r| if r <= 9 { "1".into() } else { "2".into() }),
        (_, v) => v.parse::<f64>().ok().map(|_| v.to_string()),
    })?;
    load_csv(&csv, &LoadOptions::default())
}

/// Tab-separated B, G, R, class without a header.
fn load_skin(bytes: &[u8], file: &str) -> Result<Dataset, DataError> {
    let text = String::from_utf8_lossy(bytes).replace('\t', ",");
    load_plain(text.as_bytes(), file)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Achieved {
    pub rules: usize,
    pub recall_pct: f64,
    pub precision_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentOutcome {
    pub paper: PaperRow,
    pub thresholds: Thresholds,
    pub achieved: Achieved,
    pub passed: bool,
    pub layout: LayoutMode,
    pub params: MiningParams,
    pub configurations_tried: usize,
    pub report: RuleSetReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Reproduction {
    pub recipe: String,
    pub source: Option<PathBuf>,
    pub cases: usize,
    pub n: usize,
    pub passed: bool,
    pub experiments: Vec<ExperimentOutcome>,
}

impl Thresholds {
    pub fn met(&self, a: &Achieved) -> bool {
        self.max_rules.map_or(true, |m| a.rules <= m)
            && a.recall_pct >= self.min_recall_pct
            && a.precision_pct >= self.min_precision_pct
    }
}

fn achieved(report: &RuleSetReport, exp: &Experiment) -> Achieved {
    let recall_pct = match (exp.basis, &exp.target) {
        (RecallBasis::TargetClass, Target::FixedClass(c) | Target::AllBut(c)) => {
            let class = if matches!(exp.target, Target::AllBut(_)) { rest_label(c) } else { c.clone() };
            report.rows.iter().filter(|r| r.class == class).map(|r| r.coverage_in_class_pct).sum()
        }
        _ => report.totals.recall_pct,
    };
    Achieved { rules: report.rows.len(), recall_pct, precision_pct: report.totals.weighted_precision_pct }
}

/// Ranks configurations: meeting thresholds first; among those that do,
/// fewer rules, then recall times precision; among the rest, recall times
/// precision alone.
fn better(a: &(bool, Achieved), b: &(bool, Achieved)) -> bool {
    let score = |x: &Achieved| x.recall_pct * x.precision_pct;
    if a.0 != b.0 {
        return a.0;
    }
    if a.0 && a.1.rules != b.1.rules {
        return a.1.rules < b.1.rules;
    }
    score(&a.1) > score(&b.1)
}

impl Recipe {
    pub fn load(&self, data_dir: &Path) -> Result<(Dataset, PathBuf), Error> {
        for f in self.files {
            let p = data_dir.join(f);
            if p.is_file() {
                let bytes = std::fs::read(&p).map_err(DataError::from)?;
                return Ok(((self.loader)(&bytes, f)?, p));
            }
        }
        Err(DataError::Config(format!("none of {} found in {}", self.files.join(", "), data_dir.display())).into())
    }

    pub fn run(&self, data_dir: &Path) -> Result<Reproduction, Error> {
        let (raw, path) = self.load(data_dir)?;
        let mut rep = self.run_on(&raw)?;
        rep.source = Some(path);
        Ok(rep)
    }

    /// Grid search over layouts, match modes and rectangle sizes per
    /// experiment, keeping the best configuration.
    pub fn run_on(&self, raw: &Dataset) -> Result<Reproduction, Error> {
        let opts = PrepareOptions { padding: self.padding, ..Default::default() };
        let data = prepare(raw, &opts)?;
        let projections: Vec<Projection> = self
            .layouts
            .iter()
            .map(|&m| project(data.clone(), layout_config(m, data.n(), None), EllipseSpec::unit()))
            .collect::<Result<_, _>>()?;
        let mut outcomes = Vec::new();
        for exp in &self.experiments {
            let mut best: Option<((bool, Achieved), LayoutMode, MiningParams, RuleSetReport)> = None;
            let mut tried = 0;
            for proj in &projections {
                let cases = proj.cases(&exp.target)?;
                for &mode in &exp.modes {
                    for &w in &self.sizes {
                        for &h in &self.sizes {
                            let mut params = MiningParams::new(mode, w, h, self.stride);
                            params.target = exp.target.clone();
                            let rules = mine(&cases, &params)?;
                            let report = classify(&cases, &rules).report;
                            let a = achieved(&report, exp);
                            let key = (exp.thresholds.met(&a), a);
                            tried += 1;
                            if best.as_ref().map_or(true, |b| better(&key, &b.0)) {
                                best = Some((key, proj.layout.mode(), params, report));
                            }
                        }
                    }
                }
            }
            let ((passed, achieved), layout, params, report) = best.expect("at least one configuration");
            let split = match &self.split {
                Some(s) => Some(evaluate_split(raw, self.padding, &layout_config(layout, 0, None), EllipseSpec::unit(), &params, s)?),
                None => None,
            };
            outcomes.push(ExperimentOutcome {
                paper: exp.paper.clone(),
                thresholds: exp.thresholds.clone(),
                achieved,
                passed,
                layout,
                params,
                configurations_tried: tried,
                report,
                split,
            });
        }
        Ok(Reproduction {
            recipe: self.name.to_string(),
            source: None,
            cases: raw.len(),
            n: raw.n(),
            passed: outcomes.iter().all(|o| o.passed),
            experiments: outcomes,
        })
    }
}
