//! Arc-length parameterization of the central ellipse.
//!
//! Positions on the ellipse are fractions of its circumference, measured
//! clockwise from the top. Circles use the closed form. Ellipses use a
//! cumulative length table; lookups bracket by binary search, interpolate
//! linearly, then polish with Newton steps on the exact integral.

use std::f64::consts::TAU;

use super::ellipse::{EllipseSpec, Point};

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

#[derive(Debug, Clone)]
pub struct ArcTable {
    ellipse: EllipseSpec,
    // Cumulative length at angles k * step; empty for circles.
    cum: Vec<f64>,
    step: f64,
    total: f64,
}

impl ArcTable {
    pub fn new(ellipse: EllipseSpec, resolution: usize) -> Self {
        if ellipse.is_circle() {
            return ArcTable { ellipse, cum: Vec::new(), step: 0.0, total: TAU * ellipse.rw() };
        }
        let n = resolution.max(16);
        let step = TAU / n as f64;
        let mut cum = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for k in 0..n {
            acc += segment(&ellipse, k as f64 * step, (k + 1) as f64 * step);
            cum.push(acc);
        }
        ArcTable { ellipse, cum, step, total: acc }
    }

    pub fn ellipse(&self) -> &EllipseSpec {
        &self.ellipse
    }

    pub fn circumference(&self) -> f64 {
        self.total
    }

    /// Point at circumference fraction `s` (wrapped into [0, 1)).
    pub fn point(&self, s: f64) -> Point {
        // Axis ends exactly: a side ellipse through one is tangent to C_E
        // there, and sin(pi) ~ 1e-16 would become ~1e-8 in its center.
        let q = 4.0 * s.rem_euclid(1.0);
        if q == q.round() {
            let e = &self.ellipse;
            return match q as u8 {
                1 => Point::new(e.cx + e.rw(), e.cy),
                2 => Point::new(e.cx, e.cy - e.rh()),
                3 => Point::new(e.cx - e.rw(), e.cy),
                _ => Point::new(e.cx, e.cy + e.rh()),
            };
        }
        self.ellipse.point_at(self.angle_at(s))
    }

    /// Parametric angle for circumference fraction `s`.
    pub fn angle_at(&self, s: f64) -> f64 {
        let s = s.rem_euclid(1.0);
        if self.cum.is_empty() {
            return s * TAU;
        }
        let target = s * self.total;
        // Last k with cum[k] <= target.
        let k = self.cum.partition_point(|&c| c <= target).saturating_sub(1).min(self.cum.len() - 2);
        let (c0, c1) = (self.cum[k], self.cum[k + 1]);
        let t0 = k as f64 * self.step;
        let mut t = t0 + self.step * (target - c0) / (c1 - c0);
        for _ in 0..6 {
            let f = c0 + segment(&self.ellipse, t0, t) - target;
            if f.abs() <= 1e-15 * self.total {
                break;
            }
            t -= f / speed(&self.ellipse, t);
        }
        t
    }

    /// Circumference fraction of a point on (or projected radially onto) the ellipse.
    pub fn fraction_of(&self, p: Point) -> f64 {
        let t = self.ellipse.angle_of(p);
        if self.cum.is_empty() {
            return (t / TAU).rem_euclid(1.0);
        }
        let k = ((t / self.step) as usize).min(self.cum.len() - 2);
        let len = self.cum[k] + segment(&self.ellipse, k as f64 * self.step, t);
        (len / self.total).rem_euclid(1.0)
    }
}

fn speed(e: &EllipseSpec, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    (e.rw() * c).hypot(e.rh() * s)
}

fn segment(e: &EllipseSpec, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for i in 0..4 {
        acc += GL_W[i] * (speed(e, mid - half * GL_X[i]) + speed(e, mid + half * GL_X[i]));
    }
    acc * half
}
