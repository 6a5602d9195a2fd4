//! Graph → point. Each node determines its two side-ellipse centers up to
//! order; each center determines its anchor up to the two crossings with C_E.
//! The candidates are re-embedded and the one reproducing the node wins.

use super::ellipse::Point;
use super::embed::{EpcGraph, SideChoice};
use super::intersect::intersection_candidates;
use super::layout::{CoordinateAnchor, Guide, Layout, LayoutMode, SideOrientation};
use super::side::free_center;
use super::SQRT_SLACK;
use crate::error::GeometryError;

const VALUE_SLACK: f64 = 1e-7;

pub fn invert(graph: &EpcGraph, layout: &Layout) -> Result<Vec<f64>, GeometryError> {
    layout.invert(graph)
}

impl Layout {
    pub fn invert(&self, graph: &EpcGraph) -> Result<Vec<f64>, GeometryError> {
        let m = self.pairs();
        if graph.nodes.len() != m {
            return Err(GeometryError::Layout(format!("expected {m} nodes, got {}", graph.nodes.len())));
        }
        let mut out = Vec::with_capacity(self.n());
        let mut prev = 0.0;
        for (k, &p) in graph.nodes.iter().enumerate() {
            let sa = self.side_of(graph, 2 * k);
            let sb = self.side_of(graph, 2 * k + 1);
            let (va, vb, s_end) = self.invert_pair(k, p, sa, sb, prev).ok_or(GeometryError::Inversion { node: k + 1 })?;
            out.push(va);
            out.push(vb);
            prev = s_end;
        }
        Ok(out)
    }

    /// Values of pair `k` whose node is `p`, plus the arc position of the
    /// second anchor (needed to continue a dynamic layout).
    pub(crate) fn invert_pair(&self, k: usize, p: Point, sa: SideChoice, sb: SideChoice, prev: f64) -> Option<(f64, f64, f64)> {
        let (i, j) = (2 * k, 2 * k + 1);
        let (ga, gb) = (sa.guide, sb.guide);
        let (oi, oj) = (sa.orientation, sb.orientation);
        let ca = self.centers_through(p, ga)?;
        let cb = self.centers_through(p, gb)?;
        let scale = self.ellipse().rw().max(self.ellipse().rh());
        let mut best: Option<(f64, (f64, f64, f64))> = None;
        let pinned;
        let orders: &[(usize, usize)] = if let (Some(ba), Some(bb)) = (sa.beyond, sb.beyond) {
            pinned = [(ba as usize, bb as usize)];
            &pinned
        } else if ga != gb {
            &[(0, 0), (0, 1), (1, 0), (1, 1)]
        } else if ca.0 == ca.1 {
            &[(0, 0)]
        } else {
            &[(0, 1), (1, 0)]
        };
        let pick = |c: (Point, Point), t: usize| if t == 0 { c.0 } else { c.1 };
        for &(ci, cj) in orders {
            for ai in self.anchors_from_center(pick(ca, ci), sa) {
                let Some(va) = self.value_at(i, ai, prev) else { continue };
                let a = match self.rebuild(i, va, prev) {
                    Some(a) => a,
                    None => continue,
                };
                for aj in self.anchors_from_center(pick(cb, cj), sb) {
                    let Some(vb) = self.value_at(j, aj, a.s) else { continue };
                    let Some(b) = self.rebuild(j, vb, a.s) else { continue };
                    let Ok(q) = self.node_with(&a, &b, ga, gb, oi, oj) else { continue };
                    let err = q.dist(p) / scale;
                    if best.as_ref().map_or(true, |(e, _)| err < *e) {
                        best = Some((err, (va, vb, b.s)));
                    }
                }
            }
        }
        match best {
            Some((err, vals)) if err < 1e-6 => Some(vals),
            _ => None,
        }
    }

    /// The two centers (free coordinates) of side ellipses tangent to `g` through `p`.
    fn centers_through(&self, p: Point, g: Guide) -> Option<(Point, Point)> {
        let e = self.ellipse();
        let fixed = g.fixed(e);
        let lo = free_center(p, g, SideOrientation::TopArc, e)?;
        let hi = free_center(p, g, SideOrientation::BottomArc, e)?;
        let at = |f: f64| if g.is_vertical() { Point::new(fixed, f) } else { Point::new(f, fixed) };
        Some((at(lo), at(hi)))
    }

    /// Anchors on C_E of the side ellipse centered at `c`, consistent with the orientation.
    fn anchors_from_center(&self, c: Point, side: SideChoice) -> Vec<Point> {
        let (g, o) = (side.guide, side.orientation);
        let e = self.ellipse();
        let mut out = Vec::with_capacity(2);
        let cands = match intersection_candidates(e.center(), c, e.rw(), e.rh()) {
            Ok((l, r)) if l == r => vec![l],
            Ok((l, r)) => match side.left {
                Some(true) => vec![l],
                Some(false) => vec![r],
                None => vec![l, r],
            },
            Err(_) => return out,
        };
        let f_c = if g.is_vertical() { c.y } else { c.x };
        let span = if g.is_vertical() { e.rh() } else { e.rw() };
        for a in cands {
            if let Some(f) = free_center(a, g, o, e) {
                if (f - f_c).abs() <= 1e-6 * span + SQRT_SLACK {
                    out.push(a);
                }
            }
        }
        out
    }

    /// Value of coordinate `i` whose anchor is `a`, if it lies in range.
    fn value_at(&self, i: usize, a: Point, prev: f64) -> Option<f64> {
        let s = self.arc().fraction_of(a);
        let v = if self.mode() == LayoutMode::Dynamic {
            let mut d = (s - prev).rem_euclid(1.0);
            if d > 1.0 - 1e-12 {
                d = 0.0;
            }
            d / self.steps()[i]
        } else {
            self.sectors()[i].value_of(s)
        };
        if (-VALUE_SLACK..=1.0 + VALUE_SLACK).contains(&v) {
            Some(v.clamp(0.0, 1.0))
        } else {
            None
        }
    }

    fn rebuild(&self, i: usize, v: f64, prev: f64) -> Option<CoordinateAnchor> {
        if self.mode() == LayoutMode::Dynamic {
            self.anchor_after(i, v, prev).ok()
        } else {
            self.anchor(i, v).ok()
        }
    }
}
