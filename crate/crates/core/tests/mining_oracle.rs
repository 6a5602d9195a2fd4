//! Exhaustive-search oracle for the miner, plus rule-set properties.

mod common;

use common::{check_instances, oracle_matches};
use epc_core::geometry::{EpcGraph, Point};
use epc_core::rules::{classify, evaluate_rect, mine, Cases, MatchMode, MiningParams, Rect};
use proptest::prelude::*;

#[test]
fn per_round_choice_matches_exhaustive_search() {
    let rounds = check_instances(100).unwrap();
    assert!(rounds > 100, "only {rounds} rounds exercised");
}

fn graphs_strategy() -> impl Strategy<Value = Vec<EpcGraph>> {
    prop::collection::vec((0usize..3, prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..4)), 1..60).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (class, pts))| EpcGraph {
                row: i,
                class,
                nodes: pts.into_iter().map(|(x, y)| Point::new(x, y)).collect(),
                sides: vec![],
            })
            .collect()
    })
}

fn names() -> Vec<String> {
    vec!["a".into(), "b".into(), "c".into()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sequential_removal_partitions_cases(gs in graphs_strategy(), intersect in any::<bool>(), side in 0.2..1.0f64) {
        let names = names();
        let cases = Cases::new(&gs, &names);
        let mode = if intersect { MatchMode::Intersect } else { MatchMode::Point };
        let mut p = MiningParams::new(mode, side, side, 0.1);
        p.min_precision = 0.6;
        let rules = mine(&cases, &p).unwrap();
        let report = classify(&cases, &rules).report;
        let frozen: usize = rules.iter().map(|r| r.stats.total_hits).sum();
        prop_assert_eq!(frozen + report.totals.uncovered, gs.len());
        for (r, row) in rules.iter().zip(&report.rows) {
            prop_assert!(r.stats.coverage_in_class >= p.min_coverage);
            prop_assert!(r.stats.precision >= p.min_precision);
            prop_assert_eq!(r.stats.total_hits, row.covered);
        }
        prop_assert_eq!(mine(&cases, &p).unwrap(), rules);
    }

    #[test]
    fn growing_a_rectangle_never_loses_hits(
        gs in graphs_strategy(),
        x in -1.0..1.0f64, y in -1.0..1.0f64, w in 0.01..1.0f64, h in 0.01..1.0f64, grow in 0.0..0.5f64,
    ) {
        let names = names();
        let cases = Cases::new(&gs, &names);
        let act = cases.all_active();
        let small = Rect::new(x, y, x + w, y + h).unwrap();
        let big = Rect::new(x - grow, y - grow, x + w + grow, y + h + grow).unwrap();
        for mode in [MatchMode::Point, MatchMode::Intersect] {
            let a = evaluate_rect(&small, mode, &cases, &act).total_hits;
            let b = evaluate_rect(&big, mode, &cases, &act).total_hits;
            prop_assert!(b >= a);
        }
        // a node inside means an edge touches it too
        let pt = evaluate_rect(&small, MatchMode::Point, &cases, &act).total_hits;
        let it = evaluate_rect(&small, MatchMode::Intersect, &cases, &act).total_hits;
        prop_assert!(it >= pt);
    }

    #[test]
    fn liang_barsky_agrees_with_orientation_test(gs in graphs_strategy(), x in -1.0..1.0f64, y in -1.0..1.0f64, w in 0.01..1.0f64) {
        let r = Rect::new(x, y, x + w, y + w).unwrap();
        for g in &gs {
            prop_assert_eq!(epc_core::rules::graph_matches(g, &r, MatchMode::Intersect), oracle_matches(g, &r, MatchMode::Intersect));
        }
    }
}

#[test]
fn weighted_precision_single_and_equal_coverage() {
    use epc_core::rules::weighted_precision;
    for p in [0.5, 0.9, 0.987] {
        assert!((weighted_precision(&[(p, 17)]) - p).abs() < 1e-15);
    }
    let ps = [0.91, 0.97, 1.0];
    let mean = ps.iter().sum::<f64>() / 3.0;
    let wp = weighted_precision(&ps.iter().map(|&p| (p, 40)).collect::<Vec<_>>());
    assert!((wp - mean).abs() < 1e-15);
}
