use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rect::{graph_matches, MatchMode, Rect};
use crate::error::RulesError;
use crate::geometry::EpcGraph;

/// Which classes rules may predict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "class", rename_all = "kebab-case")]
pub enum Target {
    #[default]
    Multiclass,
    /// The named class against everything else, relabeled `all-but-<class>`.
    OneVsRest(String),
    /// Only rules whose dominant class is the named one are accepted.
    FixedClass(String),
    /// One-vs-rest, keeping only rules for `all-but-<class>`.
    AllBut(String),
}

pub fn rest_label(class: &str) -> String {
    format!("all-but-{class}")
}

/// Embedded cases with their effective labels under a target.
#[derive(Debug, Clone)]
pub struct Cases<'a> {
    graphs: &'a [EpcGraph],
    names: Vec<String>,
    label: Vec<usize>,
    class_size: Vec<usize>,
    only: Option<usize>,
}

impl<'a> Cases<'a> {
    /// `classes[g.class]` names each graph's class.
    pub fn new(graphs: &'a [EpcGraph], classes: &[String]) -> Self {
        Cases::with_target(graphs, classes, &Target::Multiclass).expect("multiclass target always applies")
    }

    pub fn with_target(graphs: &'a [EpcGraph], classes: &[String], target: &Target) -> Result<Self, RulesError> {
        let raw: Vec<&str> = graphs.iter().map(|g| classes[g.class].as_str()).collect();
        let known = |c: &str| -> Result<(), RulesError> {
            if classes.iter().any(|k| k == c) {
                Ok(())
            } else {
                Err(RulesError::InvalidParams(format!("unknown class '{c}'")))
            }
        };
        let effective: Vec<String> = match target {
            Target::OneVsRest(c) | Target::AllBut(c) => {
                known(c)?;
                let rest = rest_label(c);
                raw.iter().map(|&l| if l == c { c.clone() } else { rest.clone() }).collect()
            }
            Target::FixedClass(c) => {
                known(c)?;
                raw.iter().map(|l| l.to_string()).collect()
            }
            Target::Multiclass => raw.iter().map(|l| l.to_string()).collect(),
        };
        let declared: Vec<String> = match target {
            Target::OneVsRest(c) | Target::AllBut(c) => vec![c.clone(), rest_label(c)],
            _ => classes.to_vec(),
        };
        let only = match target {
            Target::FixedClass(c) => Some(c.clone()),
            Target::AllBut(c) => Some(rest_label(c)),
            _ => None,
        };
        Ok(Cases::from_labels(graphs, &declared, &effective, only.as_deref()))
    }

    /// Every declared class is listed, present or not.
    fn from_labels(graphs: &'a [EpcGraph], declared: &[String], labels: &[String], only: Option<&str>) -> Self {
        let mut names: Vec<String> = declared.iter().chain(labels).cloned().collect();
        names.sort();
        names.dedup();
        let label: Vec<usize> = labels.iter().map(|l| names.binary_search(l).expect("present")).collect();
        let mut class_size = vec![0; names.len()];
        label.iter().for_each(|&c| class_size[c] += 1);
        let only = only.and_then(|c| names.binary_search_by(|n| n.as_str().cmp(c)).ok());
        Cases { graphs, names, label, class_size, only }
    }

    pub fn graphs(&self) -> &'a [EpcGraph] {
        self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Effective class names, sorted.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn label(&self, i: usize) -> usize {
        self.label[i]
    }

    pub fn class_size(&self, c: usize) -> usize {
        self.class_size[c]
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    /// The class a fixed-class target restricts rules to.
    pub(crate) fn only(&self) -> Option<usize> {
        self.only
    }

    pub fn all_active(&self) -> Vec<bool> {
        vec![true; self.len()]
    }
}

/// Counts of one rectangle against the active cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Evaluation {
    /// Hits per class, every class listed.
    pub hits: BTreeMap<String, usize>,
    pub total_hits: usize,
    pub dominant: Option<String>,
    /// Dominant hits over total hits; zero when nothing matched.
    pub precision: f64,
    /// Dominant hits over active cases of that class.
    pub coverage_in_class: f64,
    /// Total hits over all active cases.
    pub coverage_total: f64,
    pub active_cases: usize,
    pub active_in_class: usize,
    /// More than one class shared the top count and the first name won.
    pub tie_broken: bool,
}

impl Evaluation {
    /// Builds the record from per-class counts over the active set.
    pub(crate) fn from_counts(names: &[String], hits: &[usize], active_per_class: &[usize]) -> Self {
        let total_hits: usize = hits.iter().sum();
        let active_cases: usize = active_per_class.iter().sum();
        let top = hits.iter().copied().max().unwrap_or(0);
        let (dominant, tie_broken) = if total_hits == 0 {
            (None, false)
        } else {
            let first = hits.iter().position(|&h| h == top).expect("max exists");
            (Some(first), hits.iter().filter(|&&h| h == top).count() > 1)
        };
        let active_in_class = dominant.map_or(0, |d| active_per_class[d]);
        Evaluation {
            hits: names.iter().cloned().zip(hits.iter().copied()).collect(),
            total_hits,
            dominant: dominant.map(|d| names[d].clone()),
            precision: ratio(top, total_hits),
            coverage_in_class: ratio(top, active_in_class),
            coverage_total: ratio(total_hits, active_cases),
            active_cases,
            active_in_class,
            tie_broken,
        }
    }

    pub fn dominant_hits(&self) -> usize {
        self.dominant.as_ref().map_or(0, |d| self.hits[d])
    }
}

pub(crate) fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub(crate) fn active_per_class(cases: &Cases, active: &[bool]) -> Vec<usize> {
    let mut out = vec![0; cases.names().len()];
    for (i, _) in active.iter().enumerate().filter(|(_, a)| **a) {
        out[cases.label(i)] += 1;
    }
    out
}

/// Evaluates `rect` on the cases flagged in `active`; nothing changes.
pub fn evaluate_rect(rect: &Rect, mode: MatchMode, cases: &Cases, active: &[bool]) -> Evaluation {
    let mut hits = vec![0; cases.names().len()];
    for (i, g) in cases.graphs().iter().enumerate() {
        if active[i] && graph_matches(g, rect, mode) {
            hits[cases.label(i)] += 1;
        }
    }
    Evaluation::from_counts(cases.names(), &hits, &active_per_class(cases, active))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn graphs(cls: &[usize]) -> Vec<EpcGraph> {
        cls.iter()
            .enumerate()
            .map(|(i, &c)| EpcGraph { row: i, class: c, nodes: vec![Point::new(0.5, 0.5)], sides: vec![] })
            .collect()
    }

    #[test]
    fn three_graphs_all_matching() {
        let names = vec!["A".to_string(), "B".to_string()];
        let gs = graphs(&[0, 0, 1]);
        let cases = Cases::new(&gs, &names);
        let e = evaluate_rect(&Rect::new(0.0, 0.0, 1.0, 1.0).unwrap(), MatchMode::Point, &cases, &cases.all_active());
        assert_eq!(e.hits["A"], 2);
        assert_eq!(e.hits["B"], 1);
        assert_eq!(e.dominant.as_deref(), Some("A"));
        assert!((e.precision - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.coverage_in_class, 1.0);
        assert_eq!(e.coverage_total, 1.0);
        assert!(!e.tie_broken);
    }

    #[test]
    fn nothing_matches() {
        let names = vec!["A".to_string()];
        let gs = graphs(&[0, 0]);
        let cases = Cases::new(&gs, &names);
        let e = evaluate_rect(&Rect::new(2.0, 2.0, 3.0, 3.0).unwrap(), MatchMode::Point, &cases, &cases.all_active());
        assert_eq!(e.total_hits, 0);
        assert_eq!(e.dominant, None);
        assert_eq!(e.precision, 0.0);
    }

    #[test]
    fn ties_go_to_first_name() {
        let names = vec!["a".to_string(), "b".to_string()];
        let gs = graphs(&[1, 0]);
        let cases = Cases::new(&gs, &names);
        let e = evaluate_rect(&Rect::new(0.0, 0.0, 1.0, 1.0).unwrap(), MatchMode::Point, &cases, &cases.all_active());
        assert_eq!(e.dominant.as_deref(), Some("a"));
        assert!(e.tie_broken);
    }

    #[test]
    fn inactive_cases_are_ignored() {
        let names = vec!["A".to_string(), "B".to_string()];
        let gs = graphs(&[0, 1, 1]);
        let cases = Cases::new(&gs, &names);
        let e = evaluate_rect(&Rect::new(0.0, 0.0, 1.0, 1.0).unwrap(), MatchMode::Point, &cases, &[true, false, false]);
        assert_eq!(e.dominant.as_deref(), Some("A"));
        assert_eq!(e.active_cases, 1);
        assert_eq!(e.precision, 1.0);
    }

    #[test]
    fn one_vs_rest_relabels() {
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let gs = graphs(&[0, 1, 2]);
        let cases = Cases::with_target(&gs, &names, &Target::OneVsRest("b".into())).unwrap();
        assert_eq!(cases.names(), &["all-but-b".to_string(), "b".to_string()]);
        assert_eq!(cases.class_size(0), 2);
        assert!(Cases::with_target(&gs, &names, &Target::OneVsRest("z".into())).is_err());
        let rest = Cases::with_target(&gs, &names, &Target::AllBut("b".into())).unwrap();
        assert_eq!(rest.only(), Some(0));
    }
}
