use serde::{Deserialize, Serialize};

use super::ellipse::{EllipseSpec, Point};
use super::layout::{CoordinateAnchor, Guide, SideOrientation};
use super::SQRT_SLACK;
use crate::error::GeometryError;

/// Role within a coordinate pair; drawings show the first red and the second blue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    First,
    Second,
}

/// An ellipse with the axes of C_E, tangent to a guide line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideEllipse {
    pub center: Point,
    pub rw: f64,
    pub rh: f64,
    pub role: Role,
    pub guide: Guide,
}

impl SideEllipse {
    pub fn new(center: Point, e: &EllipseSpec, role: Role, guide: Guide) -> Self {
        SideEllipse { center, rw: e.rw(), rh: e.rh(), role, guide }
    }

    /// Center coordinate along the guide (B for M guides, A for N guides).
    pub fn free(&self) -> f64 {
        if self.guide.is_vertical() {
            self.center.y
        } else {
            self.center.x
        }
    }

    pub fn level(&self, p: Point) -> f64 {
        let u = (p.x - self.center.x) / self.rw;
        let v = (p.y - self.center.y) / self.rh;
        u * u + v * v
    }

    /// Point where the ellipse touches its guide line.
    pub fn tangency(&self, e: &EllipseSpec) -> Point {
        if self.guide.is_vertical() {
            Point::new(e.cx, self.center.y)
        } else {
            Point::new(self.center.x, e.cy)
        }
    }
}

/// Free center coordinate of the side ellipse through `p` tangent to `guide`,
/// or None when `p` is out of reach.
pub(crate) fn free_center(p: Point, guide: Guide, o: SideOrientation, e: &EllipseSpec) -> Option<f64> {
    let fixed = guide.fixed(e);
    let (along, across, r_across, r_along) = if guide.is_vertical() {
        (p.y, p.x - fixed, e.rw(), e.rh())
    } else {
        (p.x, p.y - fixed, e.rh(), e.rw())
    };
    let d = 1.0 - (across / r_across).powi(2);
    if d < -SQRT_SLACK {
        return None;
    }
    Some(along + o.sign() * r_along * d.max(0.0).sqrt())
}

/// Side ellipse through an anchor, tangent to `guide`, with the center on the
/// side given by `orientation`.
pub fn side_ellipse_for_anchor(
    anchor: &CoordinateAnchor,
    ellipse: &EllipseSpec,
    role: Role,
    guide: Guide,
    orientation: SideOrientation,
) -> Result<SideEllipse, GeometryError> {
    let f = free_center(anchor.point, guide, orientation, ellipse).ok_or_else(|| {
        GeometryError::Unreachable { coordinate: anchor.index + 1, guide: guide.name().into() }
    })?;
    let center = if guide.is_vertical() {
        Point::new(guide.fixed(ellipse), f)
    } else {
        Point::new(f, guide.fixed(ellipse))
    };
    Ok(SideEllipse::new(center, ellipse, role, guide))
}
