use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eval::{active_per_class, evaluate_rect, Cases, Evaluation};
use super::rect::{graph_matches, MatchMode, Rect};
use crate::error::RulesError;
use crate::geometry::{EpcGraph, Point};

/// Positions per round above this are refused; stride is likely a typo.
const MAX_POSITIONS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MiningParams {
    pub rect_w: f64,
    pub rect_h: f64,
    pub stride: f64,
    #[serde(default = "default_min_coverage")]
    pub min_coverage: f64,
    #[serde(default = "default_min_precision")]
    pub min_precision: f64,
    pub mode: MatchMode,
    #[serde(default)]
    pub target: super::Target,
    #[serde(default)]
    pub max_rules: Option<usize>,
}

fn default_min_coverage() -> f64 {
    0.10
}

fn default_min_precision() -> f64 {
    0.90
}

impl MiningParams {
    pub fn new(mode: MatchMode, rect_w: f64, rect_h: f64, stride: f64) -> Self {
        MiningParams {
            rect_w,
            rect_h,
            stride,
            min_coverage: default_min_coverage(),
            min_precision: default_min_precision(),
            mode,
            target: super::Target::Multiclass,
            max_rules: None,
        }
    }

    pub fn validate(&self) -> Result<(), RulesError> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.rect_w) || !pos(self.rect_h) {
            return Err(RulesError::InvalidParams("rectangle sides must be positive".into()));
        }
        if !pos(self.stride) {
            return Err(RulesError::InvalidParams("stride must be positive".into()));
        }
        for (name, t) in [("min-coverage", self.min_coverage), ("min-precision", self.min_precision)] {
            if !(t > 0.0 && t <= 1.0) {
                return Err(RulesError::InvalidParams(format!("{name} {t} outside (0, 1]")));
            }
        }
        Ok(())
    }
}

/// An accepted rectangle with the counts it had when accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DominanceRule {
    pub id: usize,
    pub rect: Rect,
    pub mode: MatchMode,
    pub class: String,
    pub stats: Evaluation,
}

/// Rectangle positions: lower-left corners at (x0 + i*stride, y0 + j*stride)
/// from the lower-left of the scene bounds, scanned row by row from the
/// bottom, each row left to right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub x0: f64,
    pub y0: f64,
    pub w: f64,
    pub h: f64,
    pub stride: f64,
    pub nx: usize,
    pub ny: usize,
}

impl ScanGrid {
    pub fn over(graphs: &[EpcGraph], w: f64, h: f64, stride: f64) -> Self {
        let b = graphs.iter().map(EpcGraph::bounds).fold(
            [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
            |a, g| [a[0].min(g[0]), a[1].min(g[1]), a[2].max(g[2]), a[3].max(g[3])],
        );
        if !b[0].is_finite() {
            return ScanGrid { x0: 0.0, y0: 0.0, w, h, stride, nx: 0, ny: 0 };
        }
        let count = |span: f64, side: f64| ((span - side).max(0.0) / stride).ceil() as usize + 1;
        ScanGrid { x0: b[0], y0: b[1], w, h, stride, nx: count(b[2] - b[0], w), ny: count(b[3] - b[1], h) }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rect(&self, idx: usize) -> Rect {
        let (i, j) = (idx % self.nx, idx / self.nx);
        let xmin = self.x0 + i as f64 * self.stride;
        let ymin = self.y0 + j as f64 * self.stride;
        Rect { xmin, ymin, xmax: xmin + self.w, ymax: ymin + self.h }
    }

    /// Columns (or rows) whose interval of length `side` may touch [lo, hi],
    /// padded by one on each side against rounding.
    fn span(&self, lo: f64, hi: f64, origin: f64, side: f64, count: usize) -> Option<(usize, usize)> {
        let a = ((lo - origin - side) / self.stride).ceil() - 1.0;
        let b = ((hi - origin) / self.stride).floor() + 1.0;
        let last = count as f64 - 1.0;
        if b < 0.0 || a > last {
            return None;
        }
        Some((a.max(0.0) as usize, b.min(last) as usize))
    }

    /// Visits a superset of the positions whose rectangle matches `g`.
    fn candidates(&self, g: &EpcGraph, mode: MatchMode, mut visit: impl FnMut(usize)) {
        let xs = |lo: f64, hi: f64| self.span(lo, hi, self.x0, self.w, self.nx);
        let ys = |lo: f64, hi: f64| self.span(lo, hi, self.y0, self.h, self.ny);
        if mode == MatchMode::Point || g.nodes.len() < 2 {
            for p in &g.nodes {
                if let (Some((i0, i1)), Some((j0, j1))) = (xs(p.x, p.x), ys(p.y, p.y)) {
                    for j in j0..=j1 {
                        for i in i0..=i1 {
                            visit(j * self.nx + i);
                        }
                    }
                }
            }
            return;
        }
        // Column by column: the part of the edge inside a column's x-range
        // is a sub-segment, so its y-extent decides the rows.
        for (a, b) in g.edges() {
            let Some((i0, i1)) = xs(a.x.min(b.x), a.x.max(b.x)) else {
                continue;
            };
            for i in i0..=i1 {
                let xl = self.x0 + i as f64 * self.stride;
                if let Some((j0, j1)) = clip_to_slab(a, b, xl, xl + self.w).and_then(|(yl, yh)| ys(yl, yh)) {
                    for j in j0..=j1 {
                        visit(j * self.nx + i);
                    }
                }
            }
        }
    }
}

/// y-extent of the part of segment ab with x in [xl, xh], slightly widened.
fn clip_to_slab(a: Point, b: Point, xl: f64, xh: f64) -> Option<(f64, f64)> {
    let eps = 1e-9 * (1.0 + a.x.abs().max(b.x.abs()).max(xh.abs()));
    let (xl, xh) = (xl - eps, xh + eps);
    let dx = b.x - a.x;
    let (t0, t1) = if dx == 0.0 {
        if a.x < xl || a.x > xh {
            return None;
        }
        (0.0, 1.0)
    } else {
        let (ta, tb) = ((xl - a.x) / dx, (xh - a.x) / dx);
        let (lo, hi) = (ta.min(tb).max(0.0), ta.max(tb).min(1.0));
        if lo > hi {
            return None;
        }
        (lo, hi)
    };
    let (ya, yb) = (a.y + t0 * (b.y - a.y), a.y + t1 * (b.y - a.y));
    let pad = 1e-9 * (1.0 + ya.abs().max(yb.abs()));
    Some((ya.min(yb) - pad, ya.max(yb) + pad))
}

/// Per-position class counts over the active cases.
fn count_hits(cases: &Cases, active: &[bool], grid: &ScanGrid, mode: MatchMode) -> Vec<u32> {
    let c = cases.names().len();
    let p = grid.len();
    let graphs = cases.graphs();
    let idx: Vec<usize> = (0..graphs.len()).filter(|&i| active[i]).collect();
    idx.par_chunks(2048)
        .fold(
            || (vec![0u32; p * c], vec![usize::MAX; p]),
            |(mut counts, mut stamp), chunk| {
                for &i in chunk {
                    let g = &graphs[i];
                    let cls = cases.label(i);
                    grid.candidates(g, mode, |pos| {
                        if stamp[pos] != i {
                            stamp[pos] = i;
                            if graph_matches(g, &grid.rect(pos), mode) {
                                counts[pos * c + cls] += 1;
                            }
                        }
                    });
                }
                (counts, stamp)
            },
        )
        .map(|(counts, _)| counts)
        .reduce(|| vec![0u32; p * c], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        })
}

/// Best qualifying position of one round: highest coverage in class, then
/// highest precision, then earliest in scan order.
pub(crate) fn best_position(
    cases: &Cases,
    active: &[bool],
    grid: &ScanGrid,
    params: &MiningParams,
) -> Option<(usize, Evaluation)> {
    if grid.is_empty() {
        return None;
    }
    let c = cases.names().len();
    let counts = count_hits(cases, active, grid, params.mode);
    let per_class = active_per_class(cases, active);
    let mut best: Option<(f64, f64, usize)> = None;
    for pos in 0..grid.len() {
        let row = &counts[pos * c..(pos + 1) * c];
        let total: u32 = row.iter().sum();
        if total == 0 {
            continue;
        }
        let top = *row.iter().max().expect("non-empty");
        let d = row.iter().position(|&h| h == top).expect("max exists");
        if cases.only().is_some_and(|o| o != d) {
            continue;
        }
        let cov = top as f64 / per_class[d] as f64;
        let prec = top as f64 / total as f64;
        if cov < params.min_coverage || prec < params.min_precision {
            continue;
        }
        if best.map_or(true, |(bc, bp, _)| cov > bc || (cov == bc && prec > bp)) {
            best = Some((cov, prec, pos));
        }
    }
    best.map(|(_, _, pos)| {
        let hits: Vec<usize> = counts[pos * c..(pos + 1) * c].iter().map(|&h| h as usize).collect();
        (pos, Evaluation::from_counts(cases.names(), &hits, &per_class))
    })
}

/// Drops the active cases `rect` matches; returns how many.
fn remove_matched(cases: &Cases, active: &mut [bool], rect: &Rect, mode: MatchMode) -> usize {
    let mut n = 0;
    for (i, g) in cases.graphs().iter().enumerate() {
        if active[i] && graph_matches(g, rect, mode) {
            active[i] = false;
            n += 1;
        }
    }
    n
}

/// Sequential covering from scratch. See [`mine_from`].
pub fn mine(cases: &Cases, params: &MiningParams) -> Result<Vec<DominanceRule>, RulesError> {
    let mut active = cases.all_active();
    mine_from(cases, &mut active, params, 1)
}

/// Sequential covering on the cases still flagged in `active`: each round
/// accepts the best qualifying rectangle and removes the cases it matches.
/// The grid spans every case, active or not, so positions stay put across
/// rounds. Rule ids count up from `first_id`.
pub fn mine_from(
    cases: &Cases,
    active: &mut [bool],
    params: &MiningParams,
    first_id: usize,
) -> Result<Vec<DominanceRule>, RulesError> {
    params.validate()?;
    let grid = ScanGrid::over(cases.graphs(), params.rect_w, params.rect_h, params.stride);
    if grid.len() > MAX_POSITIONS {
        return Err(RulesError::InvalidParams(format!(
            "{} rectangle positions per round; increase the stride",
            grid.len()
        )));
    }
    let mut rules = Vec::new();
    while params.max_rules.map_or(true, |m| rules.len() < m) && active.iter().any(|&a| a) {
        let Some((pos, stats)) = best_position(cases, active, &grid, params) else {
            break;
        };
        let rect = grid.rect(pos);
        let removed = remove_matched(cases, active, &rect, params.mode);
        debug_assert_eq!(removed, stats.total_hits);
        log::debug!("rule {} at {:?}: {} cases", first_id + rules.len(), rect, removed);
        rules.push(DominanceRule {
            id: first_id + rules.len(),
            rect,
            mode: params.mode,
            class: stats.dominant.clone().expect("qualifying rectangles have hits"),
            stats,
        });
    }
    Ok(rules)
}

/// Accepts a hand-drawn rectangle against the active set.
pub fn accept_rule(
    cases: &Cases,
    active: &mut [bool],
    rect: Rect,
    mode: MatchMode,
    id: usize,
) -> Result<DominanceRule, RulesError> {
    rect.validate()?;
    let stats = evaluate_rect(&rect, mode, cases, active);
    let Some(class) = stats.dominant.clone() else {
        return Err(RulesError::InvalidRect("rectangle matches no active case".into()));
    };
    remove_matched(cases, active, &rect, mode);
    Ok(DominanceRule { id, rect, mode, class, stats })
}

/// Replays `rules` in order from a full active set, refreezing their stats.
/// A rule left without hits keeps its class.
pub fn rebase(cases: &Cases, rules: &[DominanceRule]) -> (Vec<DominanceRule>, Vec<bool>) {
    let mut active = cases.all_active();
    let out = rules
        .iter()
        .map(|r| {
            let stats = evaluate_rect(&r.rect, r.mode, cases, &active);
            remove_matched(cases, &mut active, &r.rect, r.mode);
            DominanceRule { class: stats.dominant.clone().unwrap_or_else(|| r.class.clone()), stats, ..r.clone() }
        })
        .collect();
    (out, active)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::Target;

    fn cluster(cx: f64, cy: f64, class: usize, k: usize, start: usize) -> Vec<EpcGraph> {
        (0..k)
            .map(|i| EpcGraph {
                row: start + i,
                class,
                nodes: vec![Point::new(cx + 0.01 * (i % 3) as f64, cy + 0.01 * (i / 3) as f64)],
                sides: vec![],
            })
            .collect()
    }

    #[test]
    fn two_separated_clusters_give_two_pure_rules() {
        let mut gs = cluster(0.0, 0.0, 0, 10, 0);
        gs.extend(cluster(1.0, 1.0, 0, 10, 10));
        let names = vec!["a".to_string()];
        let cases = Cases::new(&gs, &names);
        let rules = mine(&cases, &MiningParams::new(MatchMode::Point, 0.1, 0.1, 0.02)).unwrap();
        assert_eq!(rules.len(), 2);
        for r in &rules {
            assert_eq!(r.stats.precision, 1.0);
            assert_eq!(r.stats.total_hits, 10);
        }
    }

    #[test]
    fn one_rect_over_everything() {
        let gs = cluster(0.0, 0.0, 0, 9, 0);
        let names = vec!["a".to_string()];
        let cases = Cases::new(&gs, &names);
        let rules = mine(&cases, &MiningParams::new(MatchMode::Intersect, 1.0, 1.0, 0.5)).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].stats.coverage_total, 1.0);
        assert_eq!(rules[0].stats.precision, 1.0);
    }

    #[test]
    fn grid_counts_cover_bounds() {
        let gs = cluster(0.0, 0.0, 0, 9, 0);
        let g = ScanGrid::over(&gs, 0.01, 0.01, 0.005);
        let last = g.rect(g.len() - 1);
        assert!(last.xmax >= 0.02 && last.ymax >= 0.02);
        assert_eq!(g.rect(0).xmin, 0.0);
        let big = ScanGrid::over(&gs, 5.0, 5.0, 0.1);
        assert_eq!(big.len(), 1);
    }

    #[test]
    fn fixed_class_only_predicts_that_class() {
        let mut gs = cluster(0.0, 0.0, 0, 10, 0);
        gs.extend(cluster(1.0, 1.0, 1, 6, 10));
        let names = vec!["a".to_string(), "b".to_string()];
        let cases = Cases::with_target(&gs, &names, &Target::FixedClass("b".into())).unwrap();
        let rules = mine(&cases, &MiningParams::new(MatchMode::Point, 0.1, 0.1, 0.02)).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].class, "b");
    }

    #[test]
    fn max_rules_stops_early() {
        let mut gs = cluster(0.0, 0.0, 0, 10, 0);
        gs.extend(cluster(1.0, 1.0, 0, 10, 10));
        let names = vec!["a".to_string()];
        let cases = Cases::new(&gs, &names);
        let mut p = MiningParams::new(MatchMode::Point, 0.1, 0.1, 0.02);
        p.max_rules = Some(1);
        assert_eq!(mine(&cases, &p).unwrap().len(), 1);
    }

    #[test]
    fn bad_params() {
        let gs = cluster(0.0, 0.0, 0, 3, 0);
        let names = vec!["a".to_string()];
        let cases = Cases::new(&gs, &names);
        let mut p = MiningParams::new(MatchMode::Point, 0.1, 0.1, 0.0);
        assert!(mine(&cases, &p).is_err());
        p.stride = 0.1;
        p.min_precision = 1.5;
        assert!(mine(&cases, &p).is_err());
    }

    #[test]
    fn rebase_after_removing_first_rule() {
        let mut gs = cluster(0.0, 0.0, 0, 10, 0);
        gs.extend(cluster(0.05, 0.0, 1, 4, 10));
        let names = vec!["a".to_string(), "b".to_string()];
        let cases = Cases::new(&gs, &names);
        let mut active = cases.all_active();
        let r1 = accept_rule(&cases, &mut active, Rect::new(-0.01, -0.01, 0.03, 0.05).unwrap(), MatchMode::Point, 1).unwrap();
        let r2 = accept_rule(&cases, &mut active, Rect::new(-0.01, -0.01, 0.1, 0.05).unwrap(), MatchMode::Point, 2).unwrap();
        assert_eq!(r1.stats.total_hits, 10);
        assert_eq!(r2.stats.total_hits, 4);
        let (rebased, act) = rebase(&cases, &[r2.clone()]);
        assert_eq!(rebased[0].stats.total_hits, 14);
        assert_eq!(rebased[0].class, "a");
        assert!(act.iter().all(|a| !a));
    }
}
