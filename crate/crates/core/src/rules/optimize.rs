use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::classify::classify;
use super::eval::Cases;
use super::mine::{mine, MiningParams};
use crate::data::Dataset;
use crate::error::RulesError;
use crate::geometry::{EllipseSpec, EpcGraph, Layout, LayoutConfig};
use crate::pipeline::embed_dataset;

/// Pairs sampled at most, per side, for the compactness ratio.
const COMPACTNESS_SAMPLE: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Weighted precision times covered fraction of auto-mined rules.
    RuleQuality,
    /// Mean distance between classes over mean distance within classes.
    ClassCompactness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimizeOptions {
    pub delta: f64,
    /// Steps per climb.
    pub budget: usize,
    /// Extra climbs from random starting weights.
    pub restarts: usize,
    pub seed: u64,
    pub initial: Option<Vec<f64>>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions { delta: 0.25, budget: 40, restarts: 0, seed: 1, initial: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceStep {
    pub step: usize,
    pub weights: Vec<f64>,
    /// None when the weights gave no valid layout or embedding.
    pub value: Option<f64>,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimizeResult {
    pub weights: Vec<f64>,
    pub value: f64,
    pub initial_value: f64,
    pub trace: Vec<TraceStep>,
}

fn graph_distance(a: &EpcGraph, b: &EpcGraph) -> f64 {
    let s: f64 = a.nodes.iter().zip(&b.nodes).map(|(p, q)| p.dist(*q)).sum();
    s / a.nodes.len().max(1) as f64
}

fn compactness(graphs: &[EpcGraph]) -> Option<f64> {
    let n = graphs.len();
    let take = n.min(COMPACTNESS_SAMPLE);
    let idx: Vec<usize> = (0..take).map(|k| k * n / take).collect();
    let (mut inter, mut ni, mut intra, mut na) = (0.0, 0usize, 0.0, 0usize);
    for (x, &i) in idx.iter().enumerate() {
        for &j in &idx[x + 1..] {
            let d = graph_distance(&graphs[i], &graphs[j]);
            if graphs[i].class == graphs[j].class {
                intra += d;
                na += 1;
            } else {
                inter += d;
                ni += 1;
            }
        }
    }
    (ni > 0 && na > 0 && intra > 0.0).then(|| (inter / ni as f64) / (intra / na as f64))
}

/// Objective value for one weight vector on a normalized, even-dimension dataset.
pub fn objective_value(
    ds: &Dataset,
    config: &LayoutConfig,
    ellipse: EllipseSpec,
    params: &MiningParams,
    objective: Objective,
    weights: &[f64],
) -> Result<f64, RulesError> {
    let layout = Layout::new(config.clone().with_weights(weights.to_vec()), ellipse)?;
    let emb = embed_dataset(ds, &layout)?;
    match objective {
        Objective::RuleQuality => {
            let cases = Cases::with_target(&emb.graphs, &emb.classes, &params.target)?;
            let rules = mine(&cases, params)?;
            let t = classify(&cases, &rules).report.totals;
            Ok(t.weighted_precision_pct / 100.0 * t.recall_pct / 100.0)
        }
        Objective::ClassCompactness => compactness(&emb.graphs)
            .ok_or_else(|| RulesError::InvalidParams("compactness needs two classes and distinct cases".into())),
    }
}

/// Hill climbing over sector weights: each step moves one weight by +-delta
/// and keeps the move if the objective strictly improves. Deterministic
/// given the seed.
pub fn optimize_weights(
    ds: &Dataset,
    config: &LayoutConfig,
    ellipse: EllipseSpec,
    params: &MiningParams,
    objective: Objective,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult, RulesError> {
    let n = ds.n();
    if !(opts.delta > 0.0) {
        return Err(RulesError::InvalidParams("delta must be positive".into()));
    }
    let start = opts.initial.clone().unwrap_or_else(|| vec![1.0; n]);
    if start.len() != n || start.iter().any(|&w| !(w > 0.0)) {
        return Err(RulesError::InvalidParams(format!("need {n} positive initial weights")));
    }
    let eval = |w: &[f64]| objective_value(ds, config, ellipse, params, objective, w);
    let initial_value = eval(&start)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut trace = vec![TraceStep { step: 0, weights: start.clone(), value: Some(initial_value), accepted: true }];
    let (mut best_w, mut best_v) = (start.clone(), initial_value);

    for climb in 0..=opts.restarts {
        let (mut w, mut v) = if climb == 0 {
            (start.clone(), initial_value)
        } else {
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(opts.delta..=2.0)).collect();
            let v = eval(&w).ok();
            trace.push(TraceStep { step: trace.len(), weights: w.clone(), value: v, accepted: v.is_some() });
            match v {
                Some(v) => (w, v),
                None => continue,
            }
        };
        for _ in 0..opts.budget {
            let i = rng.gen_range(0..n);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let mut cand = w.clone();
            cand[i] += sign * opts.delta;
            if cand[i] <= 0.0 {
                log::warn!("weight {} would drop to {}; clamped to {}", i + 1, cand[i], opts.delta);
                cand[i] = opts.delta;
            }
            let val = eval(&cand).ok();
            let accepted = val.is_some_and(|x| x > v);
            trace.push(TraceStep { step: trace.len(), weights: cand.clone(), value: val, accepted });
            if accepted {
                w = cand;
                v = val.expect("accepted has a value");
            }
        }
        if v > best_v {
            best_v = v;
            best_w = w;
        }
    }
    Ok(OptimizeResult { weights: best_w, value: best_v, initial_value, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::LayoutMode;
    use crate::rules::MatchMode;

    fn noisy() -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut rows = vec![];
        let mut labels = vec![];
        for k in 0..80 {
            let c = (k % 2) as f64;
            let mut r: Vec<f64> = (0..3).map(|_| (0.25 + 0.5 * c + rng.gen_range(-0.12..0.12f64)).clamp(0.0, 1.0)).collect();
            r.push(rng.gen_range(0.0..1.0));
            rows.push(r);
            labels.push(if c == 0.0 { "a".to_string() } else { "b".to_string() });
        }
        Dataset::new((1..=4).map(|i| format!("X{i}")).collect(), rows, labels).unwrap()
    }

    #[test]
    fn unit_weights_match_unweighted_pipeline() {
        let ds = noisy();
        let cfg = LayoutConfig::new(LayoutMode::Sequential, 4);
        let p = MiningParams::new(MatchMode::Point, 0.2, 0.2, 0.05);
        let a = objective_value(&ds, &cfg, EllipseSpec::unit(), &p, Objective::RuleQuality, &[1.0; 4]).unwrap();
        let layout = Layout::new(cfg.clone(), EllipseSpec::unit()).unwrap();
        let emb = embed_dataset(&ds, &layout).unwrap();
        let cases = Cases::new(&emb.graphs, &emb.classes);
        let t = classify(&cases, &mine(&cases, &p).unwrap()).report.totals;
        assert_eq!(a, t.weighted_precision_pct / 100.0 * t.recall_pct / 100.0);
    }

    #[test]
    fn noise_coordinate_loses_weight() {
        let ds = noisy();
        let cfg = LayoutConfig::new(LayoutMode::Sequential, 4);
        let p = MiningParams::new(MatchMode::Point, 0.2, 0.2, 0.05);
        let opts = OptimizeOptions { budget: 30, ..Default::default() };
        let r = optimize_weights(&ds, &cfg, EllipseSpec::unit(), &p, Objective::ClassCompactness, &opts).unwrap();
        assert!(r.value > r.initial_value, "{} vs {}", r.value, r.initial_value);
        let accepted: Vec<f64> = r.trace.iter().filter(|s| s.accepted).filter_map(|s| s.value).collect();
        assert!(accepted.windows(2).all(|w| w[1] > w[0]));
        let share = r.weights[3] / r.weights.iter().sum::<f64>();
        assert!(share < 0.25, "{:?}", r.weights);
        let again = optimize_weights(&ds, &cfg, EllipseSpec::unit(), &p, Objective::ClassCompactness, &opts).unwrap();
        assert_eq!(r, again);
    }
}
