use serde::{Deserialize, Serialize};

use super::ellipse::{EllipseSpec, Point};
use super::layout::Guide;
use super::side::SideEllipse;
use super::SQRT_SLACK;
use crate::error::GeometryError;

/// Which of the two crossings of a side-ellipse pair becomes the node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RootRule {
    /// Near the guide iff the first center precedes the second along it.
    /// Keeps the node a one-to-one function of the ordered pair.
    #[default]
    Oriented,
    /// The crossing inside C_E, ties to the one nearer its center.
    InsideCentral,
}

/// Both crossings of two ellipses with equal axes `rw`, `rh`, as
/// (left, right) of the directed center line c1 → c2.
pub fn intersection_candidates(c1: Point, c2: Point, rw: f64, rh: f64) -> Result<(Point, Point), GeometryError> {
    if c1 == c2 {
        return Err(GeometryError::Degenerate);
    }
    // In coordinates scaled by the semi-axes both ellipses are unit circles,
    // so the radical line is the perpendicular bisector of the centers.
    let du = (c2.x - c1.x) / rw;
    let dv = (c2.y - c1.y) / rh;
    let d2 = du * du + dv * dv;
    if d2 > 4.0 * (1.0 + SQRT_SLACK) {
        return Err(GeometryError::NoIntersection);
    }
    let h = (1.0 - d2 / 4.0).max(0.0).sqrt();
    if du == 0.0 {
        // Both tangent to the same vertical line: y = (B1+B2)/2, x = A ± rw·h.
        let y = 0.5 * (c1.y + c2.y);
        let off = rw * h * dv.signum();
        return Ok((Point::new(c1.x - off, y), Point::new(c1.x + off, y)));
    }
    if dv == 0.0 {
        let x = 0.5 * (c1.x + c2.x);
        let off = rh * h * du.signum();
        return Ok((Point::new(x, c1.y + off), Point::new(x, c1.y - off)));
    }
    let d = d2.sqrt();
    let (mu, mv) = (0.5 * du, 0.5 * dv);
    let (pu, pv) = (-dv / d * h, du / d * h);
    let left = Point::new(c1.x + (mu + pu) * rw, c1.y + (mv + pv) * rh);
    let right = Point::new(c1.x + (mu - pu) * rw, c1.y + (mv - pv) * rh);
    Ok((left, right))
}

/// Node of a side-ellipse pair under the given root rule.
pub fn intersect_equal_ellipses(
    e1: &SideEllipse,
    e2: &SideEllipse,
    rule: RootRule,
    central: &EllipseSpec,
) -> Result<Point, GeometryError> {
    let tol = 1e-12 * e1.rw.max(e1.rh);
    if (e1.rw - e2.rw).abs() > tol || (e1.rh - e2.rh).abs() > tol {
        return Err(GeometryError::InvalidEllipse("side ellipses must share semi-axes".into()));
    }
    let (left, right) = intersection_candidates(e1.center, e2.center, e1.rw, e1.rh)?;
    Ok(match rule {
        RootRule::Oriented => {
            if e1.guide == e2.guide && matches!(e1.guide, Guide::MLeft | Guide::NTop) {
                right
            } else {
                left
            }
        }
        RootRule::InsideCentral => {
            let (li, ri) = (central.contains(left), central.contains(right));
            if li != ri {
                if li {
                    left
                } else {
                    right
                }
            } else if central.level(right) < central.level(left) {
                right
            } else {
                left
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::side::Role;

    fn side(x: f64, y: f64, guide: Guide) -> SideEllipse {
        SideEllipse::new(Point::new(x, y), &EllipseSpec::unit(), Role::First, guide)
    }

    // Bisection on the x axis of |p - c|^2 = 1 for the symmetric configuration.
    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo).signum() == f(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn symmetric_pair_meets_on_axis() {
        let b = 0.8 - 0.84f64.sqrt();
        let e = EllipseSpec::unit();
        let p = intersect_equal_ellipses(&side(1.0, b, Guide::MRight), &side(1.0, -b, Guide::MRight), RootRule::Oriented, &e)
            .unwrap();
        let x = bisect(|x| (x - 1.0).powi(2) + b * b - 1.0, 0.0, 1.0);
        assert!(p.y.abs() < 1e-15);
        assert!((p.x - x).abs() < 1e-12);
        assert!((p.x - 0.006_811).abs() < 1e-5);
        let q = intersect_equal_ellipses(&side(1.0, b, Guide::MRight), &side(1.0, -b, Guide::MRight), RootRule::InsideCentral, &e)
            .unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn touching_centers_give_single_point() {
        let (l, r) = intersection_candidates(Point::new(1.0, -1.0), Point::new(1.0, 1.0), 1.0, 1.0).unwrap();
        assert_eq!(l, r);
        assert_eq!((l.x, l.y), (1.0, 0.0));
    }

    #[test]
    fn errors() {
        let c = Point::new(1.0, 0.5);
        assert_eq!(intersection_candidates(c, c, 1.0, 1.0), Err(GeometryError::Degenerate));
        assert_eq!(
            intersection_candidates(Point::new(0.0, 0.0), Point::new(2.5, 0.0), 1.0, 1.0),
            Err(GeometryError::NoIntersection)
        );
    }

    #[test]
    fn candidates_lie_on_both() {
        let (rw, rh) = (2.0, 0.5);
        let c1 = Point::new(0.3, -0.2);
        let c2 = Point::new(1.1, 0.4);
        let (l, r) = intersection_candidates(c1, c2, rw, rh).unwrap();
        for p in [l, r] {
            for c in [c1, c2] {
                let lv = ((p.x - c.x) / rw).powi(2) + ((p.y - c.y) / rh).powi(2);
                assert!((lv - 1.0).abs() < 1e-12);
            }
        }
        let cross = (c2.x - c1.x) * (l.y - c1.y) - (c2.y - c1.y) * (l.x - c1.x);
        assert!(cross > 0.0);
    }

    #[test]
    fn oriented_rule_is_near_iff_first_below() {
        let e = EllipseSpec::unit();
        let lo = side(1.0, -0.3, Guide::MRight);
        let hi = side(1.0, 0.4, Guide::MRight);
        let near = intersect_equal_ellipses(&lo, &hi, RootRule::Oriented, &e).unwrap();
        let far = intersect_equal_ellipses(&hi, &lo, RootRule::Oriented, &e).unwrap();
        assert!(near.x < 1.0 && far.x > 1.0);
        let lo = side(-1.0, -0.3, Guide::MLeft);
        let hi = side(-1.0, 0.4, Guide::MLeft);
        let near = intersect_equal_ellipses(&lo, &hi, RootRule::Oriented, &e).unwrap();
        assert!(near.x > -1.0);
    }
}
