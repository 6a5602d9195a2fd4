use serde::{Deserialize, Serialize};

use super::ellipse::Point;
use super::intersect::intersect_equal_ellipses;
use super::layout::{CoordinateAnchor, Guide, GuideAssignment, Layout, LayoutMode, SideOrientation};
use super::side::{side_ellipse_for_anchor, Role};
use crate::error::GeometryError;

/// The planar image of one n-D point: nodes P_1..P_m joined in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpcGraph {
    pub row: usize,
    pub class: usize,
    pub nodes: Vec<Point>,
    /// Per-coordinate side-ellipse choices made at embed time by dynamic
    /// layouts. Empty for static layouts, whose choices are fixed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sides: Vec<SideChoice>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideChoice {
    pub guide: Guide,
    pub orientation: SideOrientation,
    /// Whether the anchor is the left crossing of C_E with the side ellipse,
    /// seen from the center of C_E. Recorded only where it is not implied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<bool>,
    /// Whether the side ellipse's center lies beyond the node along the guide.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beyond: Option<bool>,
}

impl EpcGraph {
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    /// (xmin, ymin, xmax, ymax) over the nodes.
    pub fn bounds(&self) -> [f64; 4] {
        self.nodes.iter().fold(
            [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
            |b, p| [b[0].min(p.x), b[1].min(p.y), b[2].max(p.x), b[3].max(p.y)],
        )
    }
}

/// Anchor of one coordinate value. Dynamic layouts continue from `prev`,
/// the running arc position of the previous coordinate.
pub fn anchor_value(value: f64, index: usize, layout: &Layout, prev: Option<f64>) -> Result<CoordinateAnchor, GeometryError> {
    match layout.mode() {
        LayoutMode::Dynamic => layout.anchor_after(index, value, prev.unwrap_or(0.0)),
        _ => layout.anchor(index, value),
    }
}

pub fn embed(point: &[f64], layout: &Layout) -> Result<EpcGraph, GeometryError> {
    layout.embed(point)
}

impl Layout {
    pub fn embed(&self, x: &[f64]) -> Result<EpcGraph, GeometryError> {
        if x.len() != self.n() {
            return Err(GeometryError::Layout(format!("expected {} values, got {}", self.n(), x.len())));
        }
        let m = self.pairs();
        let mut nodes = Vec::with_capacity(m);
        let mut sides = Vec::new();
        if self.mode() == LayoutMode::Dynamic {
            let mut prev = 0.0;
            for k in 0..m {
                let a = self.anchor_after(2 * k, x[2 * k], prev)?;
                let b = self.anchor_after(2 * k + 1, x[2 * k + 1], a.s)?;
                prev = b.s;
                let (node, sa, sb) = self.dynamic_node(k, &a, &b)?;
                nodes.push(node);
                sides.extend([sa, sb]);
            }
        } else {
            for k in 0..m {
                let a = self.anchor(2 * k, x[2 * k])?;
                let b = self.anchor(2 * k + 1, x[2 * k + 1])?;
                let g = self.pair_guide(k);
                nodes.push(self.pair_node(&a, &b, g)?);
            }
        }
        Ok(EpcGraph { row: 0, class: 0, nodes, sides })
    }

    /// Node of one pair given both anchors and the pair's guide.
    pub(crate) fn pair_node(&self, a: &CoordinateAnchor, b: &CoordinateAnchor, g: Guide) -> Result<Point, GeometryError> {
        self.node_with(a, b, g, g, self.orientation(a.index), self.orientation(b.index))
    }

    pub(crate) fn node_with(
        &self,
        a: &CoordinateAnchor,
        b: &CoordinateAnchor,
        ga: Guide,
        gb: Guide,
        oa: SideOrientation,
        ob: SideOrientation,
    ) -> Result<Point, GeometryError> {
        let e = self.ellipse();
        let s1 = side_ellipse_for_anchor(a, e, Role::First, ga, oa)?;
        let s2 = side_ellipse_for_anchor(b, e, Role::Second, gb, ob)?;
        if ga == gb && s1.center == s2.center {
            // Both anchors on one side ellipse: the pair collapses to its tangency point.
            return Ok(s1.tangency(e));
        }
        intersect_equal_ellipses(&s1, &s2, self.root_rule(), e)
    }

    /// Side-ellipse choice of coordinate `i` in `graph`.
    pub fn side_of(&self, graph: &EpcGraph, i: usize) -> SideChoice {
        graph
            .sides
            .get(i)
            .copied()
            .unwrap_or_else(|| self.default_side(i))
    }

    fn recorded_side(&self, a: &CoordinateAnchor, node: Point, g: Guide, o: SideOrientation) -> Result<SideChoice, GeometryError> {
        let e = self.ellipse();
        let side = side_ellipse_for_anchor(a, e, Role::First, g, o)?;
        let c = side.center;
        let cross = (c.x - e.cx) * (a.point.y - e.cy) - (c.y - e.cy) * (a.point.x - e.cx);
        let along = if g.is_vertical() { node.y } else { node.x };
        Ok(SideChoice { guide: g, orientation: o, left: Some(cross > 0.0), beyond: Some(side.free() > along) })
    }

    /// Dynamic pairs take the first guide reaching both anchors, preferring the
    /// layout's guide and orientations. Anchor pairs no single guide serves
    /// get a mixed pair.
    fn dynamic_node(&self, k: usize, a: &CoordinateAnchor, b: &CoordinateAnchor) -> Result<(Point, SideChoice, SideChoice), GeometryError> {
        let first = self.pair_guide(k);
        let (oa, ob) = (self.orientation(a.index), self.orientation(b.index));
        let pinned = matches!(self.config().guides, GuideAssignment::PerPair(_));
        let guides: Vec<Guide> = if pinned {
            vec![first]
        } else {
            std::iter::once(first).chain(Guide::ALL.into_iter().filter(|g| *g != first)).collect()
        };
        let mut combos: Vec<(Guide, Guide)> = guides.iter().map(|&g| (g, g)).collect();
        for &ga in &guides {
            combos.extend(guides.iter().filter(|&&gb| gb != ga).map(|&gb| (ga, gb)));
        }
        let orients = [(oa, ob), (oa.flipped(), ob.flipped()), (oa, ob.flipped()), (oa.flipped(), ob)];
        let mut last_err = GeometryError::NoIntersection;
        for (ga, gb) in combos {
            for (xa, xb) in orients {
                match self.node_with(a, b, ga, gb, xa, xb) {
                    Ok(p) => return Ok((p, self.recorded_side(a, p, ga, xa)?, self.recorded_side(b, p, gb, xb)?)),
                    Err(e) => last_err = e,
                }
            }
        }
        Err(last_err)
    }
}
