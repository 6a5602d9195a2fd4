use serde::{Deserialize, Serialize};

use crate::error::RulesError;
use crate::geometry::{EpcGraph, Point};

/// Closed axis-aligned rectangle in scene coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self, RulesError> {
        let r = Rect { xmin, ymin, xmax, ymax };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), RulesError> {
        let ok = [self.xmin, self.ymin, self.xmax, self.ymax].iter().all(|v| v.is_finite())
            && self.xmin < self.xmax
            && self.ymin < self.ymax;
        if ok {
            Ok(())
        } else {
            Err(RulesError::InvalidRect(format!(
                "({}, {}, {}, {}) needs finite min < max",
                self.xmin, self.ymin, self.xmax, self.ymax
            )))
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    /// Liang-Barsky clipping; touching the boundary counts.
    pub fn meets_segment(&self, a: Point, b: Point) -> bool {
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        for (p, q) in [
            (-dx, a.x - self.xmin),
            (dx, self.xmax - a.x),
            (-dy, a.y - self.ymin),
            (dy, self.ymax - a.y),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return false;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    Point,
    Intersect,
}

impl MatchMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "point" => Some(MatchMode::Point),
            "intersect" => Some(MatchMode::Intersect),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MatchMode::Point => "point",
            MatchMode::Intersect => "intersect",
        }
    }
}

pub fn graph_matches(graph: &EpcGraph, rect: &Rect, mode: MatchMode) -> bool {
    match mode {
        MatchMode::Intersect if graph.nodes.len() > 1 => graph.edges().any(|(a, b)| rect.meets_segment(a, b)),
        _ => graph.nodes.iter().any(|&p| rect.contains(p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(pts: &[(f64, f64)]) -> EpcGraph {
        EpcGraph { row: 0, class: 0, nodes: pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), sides: vec![] }
    }

    fn r(a: f64, b: f64, c: f64, d: f64) -> Rect {
        Rect::new(a, b, c, d).unwrap()
    }

    #[test]
    fn listed_cases() {
        assert!(graph_matches(&g(&[(0.5, 0.5)]), &r(0.0, 0.0, 1.0, 1.0), MatchMode::Point));
        assert!(graph_matches(&g(&[(0.0, 0.0), (2.0, 2.0)]), &r(0.5, 0.5, 1.0, 1.0), MatchMode::Intersect));
        assert!(!graph_matches(&g(&[(0.0, 0.0), (0.4, 0.0)]), &r(0.5, -0.1, 1.0, 0.1), MatchMode::Intersect));
    }

    #[test]
    fn boundary_contact_counts() {
        let rect = r(0.0, 0.0, 1.0, 1.0);
        assert!(rect.contains(Point::new(1.0, 0.0)));
        assert!(rect.meets_segment(Point::new(-1.0, 2.0), Point::new(1.0, 0.0)));
        assert!(rect.meets_segment(Point::new(1.0, -1.0), Point::new(1.0, 2.0)));
        assert!(!rect.meets_segment(Point::new(1.0 + 1e-12, -1.0), Point::new(1.0 + 1e-12, 2.0)));
        // passes the corner region without touching
        assert!(!rect.meets_segment(Point::new(0.5, 2.0), Point::new(2.0, 0.5 + 1e-9)));
    }

    #[test]
    fn point_mode_ignores_edges() {
        let graph = g(&[(0.0, 0.0), (2.0, 2.0)]);
        assert!(!graph_matches(&graph, &r(0.5, 0.5, 1.0, 1.0), MatchMode::Point));
    }

    #[test]
    fn single_node_intersect_falls_back() {
        let graph = g(&[(0.5, 0.5)]);
        assert!(graph_matches(&graph, &r(0.0, 0.0, 1.0, 1.0), MatchMode::Intersect));
        assert!(!graph_matches(&graph, &r(0.6, 0.0, 1.0, 1.0), MatchMode::Intersect));
    }

    #[test]
    fn rejects_bad_rects() {
        assert!(Rect::new(1.0, 0.0, 1.0, 2.0).is_err());
        assert!(Rect::new(0.0, f64::NAN, 1.0, 2.0).is_err());
    }
}
