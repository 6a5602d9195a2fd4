//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use epc_core::geometry::{EpcGraph, Point};
use epc_core::rules::{mine, Cases, MatchMode, MiningParams, Rect, ScanGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

pub fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

pub fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (d1, d2, d3, d4) = (orient(c, d, a), orient(c, d, b), orient(a, b, c), orient(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

pub fn inside(r: &Rect, p: Point) -> bool {
    r.xmin <= p.x && p.x <= r.xmax && r.ymin <= p.y && p.y <= r.ymax
}

/// Independent match test: endpoint inside, or the segment crosses an edge.
pub fn oracle_matches(g: &EpcGraph, r: &Rect, mode: MatchMode) -> bool {
    if mode == MatchMode::Point || g.nodes.len() == 1 {
        return g.nodes.iter().any(|&p| inside(r, p));
    }
    let c = [
        Point::new(r.xmin, r.ymin),
        Point::new(r.xmax, r.ymin),
        Point::new(r.xmax, r.ymax),
        Point::new(r.xmin, r.ymax),
    ];
    g.nodes.windows(2).any(|w| {
        inside(r, w[0]) || inside(r, w[1]) || (0..4).any(|k| segments_cross(w[0], w[1], c[k], c[(k + 1) % 4]))
    })
}

pub struct Pick {
    pub pos: usize,
    pub hits: Vec<usize>,
}

/// Scores every grid position on the active set and returns the winner:
/// coverage in class, then precision, then scan order.
pub fn oracle_round(gs: &[EpcGraph], ncls: usize, active: &[bool], grid: &ScanGrid, p: &MiningParams) -> Option<Pick> {
    let mut per_class = vec![0usize; ncls];
    for (g, _) in gs.iter().zip(active).filter(|(_, a)| **a) {
        per_class[g.class] += 1;
    }
    let mut best: Option<(f64, f64, Pick)> = None;
    for pos in 0..grid.len() {
        let r = grid.rect(pos);
        let mut hits = vec![0usize; ncls];
        for (g, _) in gs.iter().zip(active).filter(|(_, a)| **a) {
            if oracle_matches(g, &r, p.mode) {
                hits[g.class] += 1;
            }
        }
        let total: usize = hits.iter().sum();
        if total == 0 {
            continue;
        }
        let top = *hits.iter().max().unwrap();
        let d = hits.iter().position(|&h| h == top).unwrap();
        let cov = top as f64 / per_class[d] as f64;
        let prec = top as f64 / total as f64;
        if cov < p.min_coverage || prec < p.min_precision {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bc, bp, _)) => cov > *bc || (cov == *bc && prec > *bp),
        };
        if better {
            best = Some((cov, prec, Pick { pos, hits }));
        }
    }
    best.map(|b| b.2)
}

pub fn random_instance(seed: u64) -> (Vec<EpcGraph>, Vec<String>, MiningParams) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ncls = rng.gen_range(1..=3);
    let cases = rng.gen_range(5..=30);
    let nodes = rng.gen_range(1..=3);
    let mut gs = Vec::new();
    for i in 0..cases {
        let class = rng.gen_range(0..ncls);
        // class-dependent drift so some rectangles qualify
        let (cx, cy) = (class as f64 * 0.6, (class % 2) as f64 * 0.5);
        let pts = (0..nodes)
            .map(|_| Point::new(cx + rng.gen_range(-0.4..0.4), cy + rng.gen_range(-0.4..0.4)))
            .collect();
        gs.push(EpcGraph { row: i, class, nodes: pts, sides: vec![] });
    }
    let names = (0..ncls).map(|c| format!("c{c}")).collect();
    let mode = if rng.gen_bool(0.5) { MatchMode::Point } else { MatchMode::Intersect };
    let side = rng.gen_range(0.1..0.6);
    let mut p = MiningParams::new(mode, side, rng.gen_range(0.1..0.6), 0.0);
    // at most 20 positions per axis
    let span = 2.1_f64;
    p.stride = (span / 19.0).max(rng.gen_range(0.05..0.3));
    p.min_coverage = rng.gen_range(0.05..0.4);
    p.min_precision = rng.gen_range(0.5..1.0);
    (gs, names, p)
}

/// Replays `instances` random instances against the miner; returns the
/// number of rounds checked or the first disagreement.
pub fn check_instances(instances: u64) -> Result<usize, String> {
    let mut rounds = 0;
    for seed in 0..instances {
        let (gs, names, p) = random_instance(seed);
        let grid = ScanGrid::over(&gs, p.rect_w, p.rect_h, p.stride);
        if grid.nx > 20 || grid.ny > 20 {
            return Err(format!("seed {seed}: grid {}x{}", grid.nx, grid.ny));
        }
        let cases = Cases::new(&gs, &names);
        let rules = mine(&cases, &p).unwrap();
        let mut active = vec![true; gs.len()];
        for (k, rule) in rules.iter().enumerate() {
            let pick = oracle_round(&gs, names.len(), &active, &grid, &p)
                .ok_or_else(|| format!("seed {seed} round {k}: oracle found nothing"))?;
            if rule.rect != grid.rect(pick.pos) {
                return Err(format!("seed {seed} round {k}: rect {:?} vs {:?}", rule.rect, grid.rect(pick.pos)));
            }
            let hits: Vec<usize> = names.iter().map(|n| rule.stats.hits[n]).collect();
            if hits != pick.hits {
                return Err(format!("seed {seed} round {k}: hits {hits:?} vs {:?}", pick.hits));
            }
            for (g, a) in gs.iter().zip(active.iter_mut()) {
                if *a && oracle_matches(g, &rule.rect, p.mode) {
                    *a = false;
                }
            }
            rounds += 1;
        }
        if active.iter().any(|&a| a) && oracle_round(&gs, names.len(), &active, &grid, &p).is_some() {
            return Err(format!("seed {seed}: miner stopped early"));
        }
    }
    Ok(rounds)
}

