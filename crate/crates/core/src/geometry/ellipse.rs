use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

/// The central ellipse. `w` and `h` are full extents; the semi-axes are half of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseSpec {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl EllipseSpec {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Result<Self, GeometryError> {
        let e = EllipseSpec { cx, cy, w, h };
        e.validate()?;
        Ok(e)
    }

    /// Unit circle at the origin, the default everywhere.
    pub const fn unit() -> Self {
        EllipseSpec { cx: 0.0, cy: 0.0, w: 2.0, h: 2.0 }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let finite = [self.cx, self.cy, self.w, self.h].iter().all(|v| v.is_finite());
        if !finite || self.w <= 0.0 || self.h <= 0.0 {
            return Err(GeometryError::InvalidEllipse(format!(
                "need finite center and positive size, got cx={} cy={} W={} H={}",
                self.cx, self.cy, self.w, self.h
            )));
        }
        Ok(())
    }

    pub fn rw(&self) -> f64 {
        self.w / 2.0
    }

    pub fn rh(&self) -> f64 {
        self.h / 2.0
    }

    pub fn center(&self) -> Point {
        Point::new(self.cx, self.cy)
    }

    pub fn is_circle(&self) -> bool {
        self.w == self.h
    }

    /// Point at parametric angle `t`, measured clockwise from the top.
    pub fn point_at(&self, t: f64) -> Point {
        let (s, c) = t.sin_cos();
        Point::new(self.cx + self.rw() * s, self.cy + self.rh() * c)
    }

    /// Parametric angle of a point, clockwise from the top, in [0, 2π).
    pub fn angle_of(&self, p: Point) -> f64 {
        let t = ((p.x - self.cx) / self.rw()).atan2((p.y - self.cy) / self.rh());
        if t < 0.0 {
            t + std::f64::consts::TAU
        } else {
            t
        }
    }

    /// Squared normalized radius: 1 on the ellipse, below 1 inside.
    pub fn level(&self, p: Point) -> f64 {
        let u = (p.x - self.cx) / self.rw();
        let v = (p.y - self.cy) / self.rh();
        u * u + v * v
    }

    pub fn contains(&self, p: Point) -> bool {
        self.level(p) <= 1.0 + 1e-12
    }

    pub fn on_boundary(&self, p: Point, tol: f64) -> bool {
        (self.level(p) - 1.0).abs() <= tol
    }
}

impl Default for EllipseSpec {
    fn default() -> Self {
        EllipseSpec::unit()
    }
}
