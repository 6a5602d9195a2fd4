use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::classify::{classify, RuleSetReport};
use super::eval::Cases;
use super::mine::{mine, DominanceRule, MiningParams};
use crate::data::{pad, Dataset, Normalizer, PaddingPolicy};
use crate::error::RulesError;
use crate::geometry::{EllipseSpec, Layout, LayoutConfig};
use crate::pipeline::embed_dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Split {
    /// Shuffle with `seed`, then take round(train * len) cases for training.
    Fraction { train: f64, seed: u64 },
    /// Explicit row indices, for hand-built worst-case splits.
    Indices { train: Vec<usize>, validation: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SplitReport {
    pub train_rows: Vec<usize>,
    pub validation_rows: Vec<usize>,
    /// Validation cells clamped into [0, 1] by the training statistics.
    pub clamped: usize,
    pub rules: Vec<DominanceRule>,
    pub train: RuleSetReport,
    pub validation: RuleSetReport,
}

impl Split {
    fn indices(&self, len: usize) -> Result<(Vec<usize>, Vec<usize>), RulesError> {
        let (tr, va) = match self {
            Split::Fraction { train, seed } => {
                if !(*train > 0.0 && *train <= 1.0) {
                    return Err(RulesError::InvalidParams(format!("train fraction {train} outside (0, 1]")));
                }
                let mut idx: Vec<usize> = (0..len).collect();
                idx.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
                let k = (train * len as f64).round() as usize;
                let (a, b) = idx.split_at(k.min(len));
                let (mut a, mut b) = (a.to_vec(), b.to_vec());
                a.sort_unstable();
                b.sort_unstable();
                (a, b)
            }
            Split::Indices { train, validation } => {
                if let Some(bad) = train.iter().chain(validation).find(|&&i| i >= len) {
                    return Err(RulesError::InvalidParams(format!("row index {bad} out of range")));
                }
                (train.clone(), validation.clone())
            }
        };
        if tr.is_empty() {
            return Err(RulesError::EmptyPartition("train"));
        }
        if va.is_empty() {
            return Err(RulesError::EmptyPartition("validation"));
        }
        Ok((tr, va))
    }
}

/// Mines on the training part and scores the frozen rules on both parts.
/// `raw` is unnormalized: scaling is fitted on the training rows only.
pub fn evaluate_split(
    raw: &Dataset,
    padding: PaddingPolicy,
    config: &LayoutConfig,
    ellipse: EllipseSpec,
    params: &MiningParams,
    split: &Split,
) -> Result<SplitReport, RulesError> {
    params.validate()?;
    let (tr, va) = split.indices(raw.len())?;
    let train_raw = raw.subset(&tr)?;
    let norm = Normalizer::fit(&train_raw);
    let (train, _) = norm.apply(&train_raw)?;
    let (valid, clamped) = norm.apply(&raw.subset(&va)?)?;
    let (train, valid) = (pad(&train, padding)?, pad(&valid, padding)?);
    let layout = Layout::new(LayoutConfig { n: train.n(), ..config.clone() }, ellipse)?;

    let et = embed_dataset(&train, &layout)?;
    let ct = Cases::with_target(&et.graphs, &et.classes, &params.target)?;
    let rules = mine(&ct, params)?;
    let train_report = classify(&ct, &rules).report;

    let ev = embed_dataset(&valid, &layout)?;
    let cv = Cases::with_target(&ev.graphs, &ev.classes, &params.target)?;
    let validation = classify(&cv, &rules).report;
    Ok(SplitReport { train_rows: tr, validation_rows: va, clamped, rules, train: train_report, validation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::LayoutMode;
    use crate::rules::MatchMode;

    fn toy() -> Dataset {
        let mut rows = vec![];
        let mut labels = vec![];
        for k in 0..40 {
            let t = k as f64 / 40.0;
            let c = k % 2;
            rows.push(vec![0.2 + 0.6 * c as f64 + 0.05 * t, 0.3 + 0.1 * t, 0.5, 0.1 + 0.7 * c as f64]);
            labels.push(if c == 0 { "a".to_string() } else { "b".to_string() });
        }
        Dataset::new((1..=4).map(|i| format!("X{i}")).collect(), rows, labels).unwrap()
    }

    fn params() -> MiningParams {
        MiningParams::new(MatchMode::Point, 0.2, 0.2, 0.05)
    }

    #[test]
    fn identical_sides_give_identical_metrics() {
        let ds = toy();
        let all: Vec<usize> = (0..ds.len()).collect();
        let split = Split::Indices { train: all.clone(), validation: all };
        let rep = evaluate_split(&ds, PaddingPolicy::DuplicateLast, &LayoutConfig::new(LayoutMode::Mirror, 4), EllipseSpec::unit(), &params(), &split)
            .unwrap();
        assert!(!rep.rules.is_empty());
        assert_eq!(rep.train, rep.validation);
        assert_eq!(rep.clamped, 0);
    }

    #[test]
    fn empty_validation_is_an_error() {
        let ds = toy();
        let split = Split::Fraction { train: 1.0, seed: 3 };
        let err = evaluate_split(&ds, PaddingPolicy::DuplicateLast, &LayoutConfig::new(LayoutMode::Mirror, 4), EllipseSpec::unit(), &params(), &split)
            .unwrap_err();
        assert!(matches!(err, RulesError::EmptyPartition("validation")));
    }

    #[test]
    fn seventy_thirty_is_seeded() {
        let ds = toy();
        let cfg = LayoutConfig::new(LayoutMode::Sequential, 4);
        let split = Split::Fraction { train: 0.7, seed: 11 };
        let a = evaluate_split(&ds, PaddingPolicy::DuplicateLast, &cfg, EllipseSpec::unit(), &params(), &split).unwrap();
        let b = evaluate_split(&ds, PaddingPolicy::DuplicateLast, &cfg, EllipseSpec::unit(), &params(), &split).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.train_rows.len(), 28);
        assert_eq!(a.validation_rows.len(), 12);
        assert_eq!(a.train.totals.cases, 28);
    }
}
