use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::eval::{ratio, Cases};
use super::mine::{DominanceRule, MiningParams};
use super::rect::graph_matches;
use crate::data::{Normalizer, PaddingPolicy};
use crate::error::RulesError;
use crate::geometry::{EllipseSpec, LayoutConfig, LayoutFingerprint};

pub const RULES_VERSION: u32 = 1;
pub const REPORT_VERSION: u32 = 1;

/// Label used for cases no rule matches.
pub const UNCOVERED: &str = "uncovered";

/// rules.json: everything needed to apply the rules to new data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RulesDocument {
    pub version: u32,
    pub fingerprint: LayoutFingerprint,
    pub layout: LayoutConfig,
    pub ellipse: EllipseSpec,
    pub padding: PaddingPolicy,
    pub scaling: Option<Normalizer>,
    pub label_column: Option<String>,
    pub params: Option<MiningParams>,
    pub rules: Vec<DominanceRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportRow {
    pub rule: usize,
    pub class: String,
    /// Cases this rule classifies (first match wins).
    pub covered: usize,
    pub correct: usize,
    /// Correct cases over the size of the class in the whole dataset.
    pub coverage_in_class_pct: f64,
    pub precision_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportTotals {
    pub cases: usize,
    pub covered: usize,
    pub correct: usize,
    pub uncovered: usize,
    /// Covered cases over all cases.
    pub recall_pct: f64,
    /// Precision of each rule weighted by the cases it covers.
    pub weighted_precision_pct: f64,
    pub accuracy_pct: f64,
}

/// report.json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RuleSetReport {
    pub version: u32,
    pub rows: Vec<ReportRow>,
    pub totals: ReportTotals,
    /// actual class -> predicted class (or "uncovered") -> count.
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    /// Predicted class per case, `None` when uncovered.
    pub predicted: Vec<Option<String>>,
    pub report: RuleSetReport,
}

/// Sum of p_i c_i over sum of c_i, as a fraction; zero without coverage.
pub fn weighted_precision(rows: &[(f64, usize)]) -> f64 {
    let total: usize = rows.iter().map(|r| r.1).sum();
    if total == 0 {
        return 0.0;
    }
    rows.iter().map(|&(p, c)| p * c as f64).sum::<f64>() / total as f64
}

fn pct(x: f64) -> f64 {
    x * 100.0
}

/// First matching rule in order assigns its class.
pub fn classify(cases: &Cases, rules: &[DominanceRule]) -> Classification {
    let names = cases.names();
    let mut predicted = vec![None; cases.len()];
    let mut covered = vec![0usize; rules.len()];
    let mut correct = vec![0usize; rules.len()];
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for (i, g) in cases.graphs().iter().enumerate() {
        let actual = &names[cases.label(i)];
        let hit = rules.iter().position(|r| graph_matches(g, &r.rect, r.mode));
        let key = match hit {
            Some(k) => {
                covered[k] += 1;
                if rules[k].class == *actual {
                    correct[k] += 1;
                }
                predicted[i] = Some(rules[k].class.clone());
                rules[k].class.clone()
            }
            None => UNCOVERED.to_string(),
        };
        *confusion.entry(actual.clone()).or_default().entry(key).or_default() += 1;
    }
    let rows: Vec<ReportRow> = rules
        .iter()
        .enumerate()
        .map(|(k, r)| ReportRow {
            rule: r.id,
            class: r.class.clone(),
            covered: covered[k],
            correct: correct[k],
            coverage_in_class_pct: pct(ratio(correct[k], cases.class_index(&r.class).map_or(0, |c| cases.class_size(c)))),
            precision_pct: pct(ratio(correct[k], covered[k])),
        })
        .collect();
    let tot_cov: usize = covered.iter().sum();
    let tot_cor: usize = correct.iter().sum();
    let wp = weighted_precision(&rows.iter().map(|r| (r.precision_pct / 100.0, r.covered)).collect::<Vec<_>>());
    let totals = ReportTotals {
        cases: cases.len(),
        covered: tot_cov,
        correct: tot_cor,
        uncovered: cases.len() - tot_cov,
        recall_pct: pct(ratio(tot_cov, cases.len())),
        weighted_precision_pct: pct(wp),
        accuracy_pct: pct(ratio(tot_cor, cases.len())),
    };
    Classification { predicted, report: RuleSetReport { version: REPORT_VERSION, rows, totals, confusion } }
}

impl RulesDocument {
    pub fn check_fingerprint(&self, current: &LayoutFingerprint) -> Result<(), RulesError> {
        if &self.fingerprint == current {
            Ok(())
        } else {
            Err(RulesError::FingerprintMismatch)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{EpcGraph, Point};
    use crate::rules::{evaluate_rect, MatchMode, Rect};

    fn rule(id: usize, class: &str, rect: Rect, cases: &Cases) -> DominanceRule {
        let stats = evaluate_rect(&rect, MatchMode::Point, cases, &cases.all_active());
        DominanceRule { id, rect, mode: MatchMode::Point, class: class.into(), stats }
    }

    #[test]
    fn eq1_arithmetic() {
        assert!((weighted_precision(&[(1.0, 10), (0.8, 10)]) - 0.9).abs() < 1e-15);
        assert!((weighted_precision(&[(0.37, 12)]) - 0.37).abs() < 1e-15);
        assert_eq!(weighted_precision(&[]), 0.0);
    }

    #[test]
    fn first_match_and_uncovered() {
        let gs: Vec<EpcGraph> = [(0.5, 0.5, 0), (5.0, 5.0, 1)]
            .iter()
            .enumerate()
            .map(|(i, &(x, y, c))| EpcGraph { row: i, class: c, nodes: vec![Point::new(x, y)], sides: vec![] })
            .collect();
        let names = vec!["a".to_string(), "b".to_string()];
        let cases = Cases::new(&gs, &names);
        let r0 = rule(1, "x", Rect::new(10.0, 10.0, 11.0, 11.0).unwrap(), &cases);
        let r1 = rule(2, "a", Rect::new(0.0, 0.0, 1.0, 1.0).unwrap(), &cases);
        let r2 = rule(3, "b", Rect::new(0.0, 0.0, 2.0, 2.0).unwrap(), &cases);
        let c = classify(&cases, &[r0, r1, r2]);
        assert_eq!(c.predicted, vec![Some("a".to_string()), None]);
        assert_eq!(c.report.totals.uncovered, 1);
        assert_eq!(c.report.rows[1].covered, 1);
        assert_eq!(c.report.rows[2].covered, 0);
        assert_eq!(c.report.confusion["b"]["uncovered"], 1);
        assert_eq!(c.report.totals.weighted_precision_pct, 100.0);
    }
}
