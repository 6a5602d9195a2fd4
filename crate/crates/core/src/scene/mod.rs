//! Render model: the central ellipse, sector marks, one arrow per case,
//! rule rectangles and a legend. Serialized as JSON for the browser and
//! written as SVG for files.

mod svg;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use svg::to_svg;

use crate::error::SceneError;
use crate::geometry::{anchor_value, side_ellipse_for_anchor, EpcGraph, Layout, Role};
use crate::rules::{graph_matches, DominanceRule, Evaluation, MatchMode, Rect};

pub const SCENE_VERSION: u32 = 1;

/// Categorical palette, assigned to classes in sorted order.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

/// Color of rectangles whose class has no legend entry, like `all-but-x`.
pub const OTHER_COLOR: &str = "#444444";

/// Which case lines are shown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Visibility {
    #[default]
    All,
    /// Cases no rule matches.
    OutsideRules,
    /// Cases some rule matches.
    InsideRules,
}

impl FromStr for Visibility {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Visibility::All),
            "outside-rules" | "outside" => Ok(Visibility::OutsideRules),
            "inside-rules" | "inside" => Ok(Visibility::InsideRules),
            _ => Err(format!("unknown visibility '{s}' (all, outside-rules, inside-rules)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneOptions {
    pub visibility: Visibility,
    pub selected_case: Option<usize>,
    /// Rectangle being drawn, not yet a rule.
    pub pending: Option<(Rect, MatchMode)>,
    /// Coordinate names for sector labels; `X1..` when empty.
    pub labels: Vec<String>,
    pub width_px: u32,
}

impl Default for SceneOptions {
    fn default() -> Self {
        SceneOptions { visibility: Visibility::All, selected_case: None, pending: None, labels: vec![], width_px: 800 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Viewport {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
    pub width_px: u32,
    pub height_px: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseShape {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

/// Arc of one coordinate, from value 0 at `s0` to value 1 at `s1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorMark {
    /// 1-based.
    pub coord: usize,
    pub label: String,
    pub s0: f64,
    pub s1: f64,
    pub p0: [f64; 2],
    pub p1: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneGraph {
    /// Row in the dataset.
    pub id: usize,
    pub class: String,
    pub visible: bool,
    pub nodes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneRect {
    pub id: usize,
    pub class: String,
    pub mode: MatchMode,
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
    pub stats: Evaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendingRect {
    pub mode: MatchMode,
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub class: String,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlayEllipse {
    /// 1-based coordinate.
    pub coord: usize,
    pub role: Role,
    pub value: f64,
    pub anchor: [f64; 2],
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

/// Side ellipses that build the selected case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub case: usize,
    pub ellipses: Vec<OverlayEllipse>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub version: u32,
    pub viewport: Viewport,
    pub ellipse: EllipseShape,
    pub sectors: Vec<SectorMark>,
    pub graphs: Vec<SceneGraph>,
    pub rects: Vec<SceneRect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pending: Option<PendingRect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlay: Option<Overlay>,
    pub legend: Vec<LegendEntry>,
}

impl Scene {
    pub fn color_of(&self, class: &str) -> &str {
        self.legend.iter().find(|e| e.class == class).map_or(OTHER_COLOR, |e| e.color.as_str())
    }
}

/// Legend for sorted class names; wraps the palette past 12 classes.
pub fn legend(classes: &[String]) -> Vec<LegendEntry> {
    let mut sorted = classes.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() > PALETTE.len() {
        log::warn!("{} classes share a {}-color palette; colors repeat", sorted.len(), PALETTE.len());
    }
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, class)| LegendEntry { class, color: PALETTE[i % PALETTE.len()].to_string() })
        .collect()
}

/// `classes[g.class]` names each graph's class.
pub fn build_scene(
    layout: &Layout,
    graphs: &[EpcGraph],
    classes: &[String],
    rules: &[DominanceRule],
    opts: &SceneOptions,
) -> Result<Scene, SceneError> {
    if let Some(index) = opts.selected_case {
        if index >= graphs.len() {
            return Err(SceneError::SelectedCase { index, count: graphs.len() });
        }
    }
    let e = *layout.ellipse();
    let arc = layout.arc();
    let pt = |s: f64| {
        let p = arc.point(s);
        [p.x, p.y]
    };
    let sectors = layout
        .sectors()
        .iter()
        .enumerate()
        .map(|(i, sec)| {
            let (s0, s1) = (sec.position(0.0), sec.position(1.0));
            SectorMark {
                coord: i + 1,
                label: opts.labels.get(i).cloned().unwrap_or_else(|| format!("X{}", i + 1)),
                s0,
                s1,
                p0: pt(s0),
                p1: pt(s1),
            }
        })
        .collect();

    let scene_graphs = graphs
        .iter()
        .map(|g| {
            let inside = rules.iter().any(|r| graph_matches(g, &r.rect, r.mode));
            let visible = match opts.visibility {
                Visibility::All => true,
                Visibility::OutsideRules => !inside,
                Visibility::InsideRules => inside,
            };
            SceneGraph {
                id: g.row,
                class: classes[g.class].clone(),
                visible,
                nodes: g.nodes.iter().map(|p| [p.x, p.y]).collect(),
            }
        })
        .collect();

    let rects = rules
        .iter()
        .map(|r| SceneRect {
            id: r.id,
            class: r.class.clone(),
            mode: r.mode,
            xmin: r.rect.xmin,
            ymin: r.rect.ymin,
            xmax: r.rect.xmax,
            ymax: r.rect.ymax,
            stats: r.stats.clone(),
        })
        .collect();
    let pending = opts.pending.map(|(r, mode)| PendingRect { mode, xmin: r.xmin, ymin: r.ymin, xmax: r.xmax, ymax: r.ymax });

    let overlay = match opts.selected_case {
        Some(i) => Some(overlay(layout, &graphs[i], i)?),
        None => None,
    };

    // ellipse, nodes and rectangles, with a margin
    let mut b = [e.cx - e.rw(), e.cy - e.rh(), e.cx + e.rw(), e.cy + e.rh()];
    let mut grow = |x: f64, y: f64| {
        b = [b[0].min(x), b[1].min(y), b[2].max(x), b[3].max(y)];
    };
    for p in graphs.iter().flat_map(|g| &g.nodes) {
        grow(p.x, p.y);
    }
    for r in rules.iter().map(|r| r.rect).chain(opts.pending.map(|p| p.0)) {
        grow(r.xmin, r.ymin);
        grow(r.xmax, r.ymax);
    }
    let pad = 0.05 * (b[2] - b[0]).max(b[3] - b[1]);
    let vp = [b[0] - pad, b[1] - pad, b[2] + pad, b[3] + pad];
    let height_px = (opts.width_px as f64 * (vp[3] - vp[1]) / (vp[2] - vp[0])).round().max(1.0) as u32;

    Ok(Scene {
        version: SCENE_VERSION,
        viewport: Viewport { xmin: vp[0], ymin: vp[1], xmax: vp[2], ymax: vp[3], width_px: opts.width_px, height_px },
        ellipse: EllipseShape { cx: e.cx, cy: e.cy, w: e.w, h: e.h },
        sectors,
        graphs: scene_graphs,
        rects,
        pending,
        overlay,
        legend: legend(classes),
    })
}

fn overlay(layout: &Layout, g: &EpcGraph, case: usize) -> Result<Overlay, SceneError> {
    let values = layout.invert(g)?;
    let e = layout.ellipse();
    let mut prev = 0.0;
    let mut ellipses = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        let a = anchor_value(v, i, layout, Some(prev))?;
        prev = a.s;
        let side = layout.side_of(g, i);
        let role = if i % 2 == 0 { Role::First } else { Role::Second };
        let s = side_ellipse_for_anchor(&a, e, role, side.guide, side.orientation)?;
        ellipses.push(OverlayEllipse {
            coord: i + 1,
            role,
            value: v,
            anchor: [a.point.x, a.point.y],
            cx: s.center.x,
            cy: s.center.y,
            w: 2.0 * s.rw,
            h: 2.0 * s.rh,
        });
    }
    Ok(Overlay { case, ellipses })
}

/// Pretty JSON with a trailing newline.
pub fn to_json(scene: &Scene) -> String {
    crate::pipeline::to_json(scene)
}

pub fn from_json(text: &str) -> Result<Scene, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{EllipseSpec, LayoutConfig, LayoutMode};
    use crate::rules::{evaluate_rect, Cases};

    fn setup(mode: LayoutMode) -> (Layout, Vec<EpcGraph>, Vec<String>) {
        let layout = Layout::new(LayoutConfig::new(mode, 4), EllipseSpec::unit()).unwrap();
        let rows = [[0.1, 0.2, 0.3, 0.4], [0.8, 0.7, 0.2, 0.9], [0.5, 0.5, 0.5, 0.5]];
        let graphs = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut g = layout.embed(r).unwrap();
                g.row = i;
                g.class = i % 2;
                g
            })
            .collect();
        (layout, graphs, vec!["a".into(), "b".into()])
    }

    fn rule_for(gs: &[EpcGraph], names: &[String], k: usize) -> DominanceRule {
        let p = gs[k].nodes[0];
        let rect = Rect::new(p.x - 0.01, p.y - 0.01, p.x + 0.01, p.y + 0.01).unwrap();
        let cases = Cases::new(gs, names);
        let stats = evaluate_rect(&rect, MatchMode::Point, &cases, &cases.all_active());
        DominanceRule { id: 1, rect, mode: MatchMode::Point, class: stats.dominant.clone().unwrap(), stats }
    }

    #[test]
    fn nodes_are_copied_exactly() {
        let (l, gs, names) = setup(LayoutMode::Mirror);
        let s = build_scene(&l, &gs, &names, &[], &SceneOptions::default()).unwrap();
        for (sg, g) in s.graphs.iter().zip(&gs) {
            assert_eq!(sg.nodes, g.nodes.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>());
        }
        assert_eq!(s.sectors.len(), 4);
        assert_eq!(s.sectors[0].s0, 0.0);
    }

    #[test]
    fn legend_is_stable_and_sorted() {
        let l = legend(&["b".into(), "a".into()]);
        assert_eq!(l, legend(&["a".into(), "b".into()]));
        assert_eq!(l[0].class, "a");
        assert_eq!(l[1].color, PALETTE[1]);
        let many: Vec<String> = (0..13).map(|i| format!("c{i:02}")).collect();
        assert_eq!(legend(&many)[12].color, PALETTE[0]);
    }

    #[test]
    fn visibility_states() {
        let (l, gs, names) = setup(LayoutMode::Sequential);
        let vis = |v, rules: &[DominanceRule]| -> Vec<bool> {
            let o = SceneOptions { visibility: v, ..Default::default() };
            build_scene(&l, &gs, &names, rules, &o).unwrap().graphs.iter().map(|g| g.visible).collect()
        };
        assert_eq!(vis(Visibility::InsideRules, &[]), vec![false; 3]);
        assert_eq!(vis(Visibility::OutsideRules, &[]), vec![true; 3]);
        let r = rule_for(&gs, &names, 1);
        let inside = vis(Visibility::InsideRules, std::slice::from_ref(&r));
        let outside = vis(Visibility::OutsideRules, std::slice::from_ref(&r));
        assert!(inside[1]);
        assert!(inside.iter().zip(&outside).all(|(a, b)| a != b));
        assert_eq!(vis(Visibility::All, &[r]), vec![true; 3]);
    }

    #[test]
    fn rect_stats_are_the_rules_stats() {
        let (l, gs, names) = setup(LayoutMode::Sequential);
        let r = rule_for(&gs, &names, 0);
        let s = build_scene(&l, &gs, &names, std::slice::from_ref(&r), &SceneOptions::default()).unwrap();
        assert_eq!(s.rects[0].stats, r.stats);
        assert_eq!(s.color_of(&r.class), PALETTE[0]);
        assert_eq!(s.color_of("all-but-a"), OTHER_COLOR);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        for mode in [LayoutMode::Sequential, LayoutMode::Mirror, LayoutMode::Dynamic] {
            let (l, gs, names) = setup(mode);
            let r = rule_for(&gs, &names, 2);
            let o = SceneOptions {
                selected_case: Some(1),
                pending: Some((Rect::new(0.0, 0.0, 0.3, 0.2).unwrap(), MatchMode::Intersect)),
                ..Default::default()
            };
            let s = build_scene(&l, &gs, &names, &[r], &o).unwrap();
            let text = to_json(&s);
            let back = from_json(&text).unwrap();
            assert_eq!(back, s);
            assert_eq!(to_json(&back), text);
        }
    }

    #[test]
    fn overlay_ellipses_pass_through_anchors_and_nodes() {
        for mode in [LayoutMode::Sequential, LayoutMode::Mirror, LayoutMode::Dynamic] {
            let (l, gs, names) = setup(mode);
            let o = SceneOptions { selected_case: Some(1), ..Default::default() };
            let ov = build_scene(&l, &gs, &names, &[], &o).unwrap().overlay.unwrap();
            assert_eq!(ov.ellipses.len(), 4);
            for el in &ov.ellipses {
                let node = gs[1].nodes[(el.coord - 1) / 2];
                for p in [el.anchor, [node.x, node.y]] {
                    let lv = ((p[0] - el.cx) / (el.w / 2.0)).powi(2) + ((p[1] - el.cy) / (el.h / 2.0)).powi(2);
                    assert!((lv - 1.0).abs() < 1e-7, "{mode:?} coord {}: {lv}", el.coord);
                }
            }
        }
    }

    #[test]
    fn selected_case_out_of_range() {
        let (l, gs, names) = setup(LayoutMode::Sequential);
        let o = SceneOptions { selected_case: Some(3), ..Default::default() };
        assert_eq!(build_scene(&l, &gs, &names, &[], &o), Err(SceneError::SelectedCase { index: 3, count: 3 }));
    }

    #[test]
    fn visibility_parses() {
        assert_eq!("outside-rules".parse(), Ok(Visibility::OutsideRules));
        assert_eq!("inside".parse(), Ok(Visibility::InsideRules));
        assert!("some".parse::<Visibility>().is_err());
    }
}
