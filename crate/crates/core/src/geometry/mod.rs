//! EPC mathematics: anchors on the central ellipse, side ellipses,
//! node intersections and the inverse map.

mod arc;
mod ellipse;
mod embed;
mod intersect;
mod invert;
mod layout;
mod lines;
mod side;

pub use arc::ArcTable;
pub use ellipse::{EllipseSpec, Point};
pub use embed::{anchor_value, embed, EpcGraph, SideChoice};
pub use intersect::{intersect_equal_ellipses, intersection_candidates, RootRule};
pub use invert::invert;
pub use layout::{
    CoordinateAnchor, Direction, Guide, GuideAssignment, Layout, LayoutConfig, LayoutFingerprint,
    LayoutMode, OrientationPreset, Sector, SectorScheme, SideOrientation,
};
pub use lines::points_on_horizontal_line;
pub use side::{side_ellipse_for_anchor, Role, SideEllipse};

/// Slack for square roots of quantities that are zero in exact arithmetic.
pub(crate) const SQRT_SLACK: f64 = 1e-12;
