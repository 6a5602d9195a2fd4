//! Layouts: where each coordinate lives on the central ellipse, which guide
//! line its side ellipse is tangent to, and on which side of the anchor the
//! side ellipse's center sits.

use serde::{Deserialize, Serialize};

use super::arc::ArcTable;
use super::ellipse::{EllipseSpec, Point};
use super::intersect::RootRule;
use super::side::free_center;
use crate::error::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutMode {
    #[serde(rename = "seq")]
    Sequential,
    Mirror,
    Dynamic,
}

impl LayoutMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "seq" | "sequential" => Some(LayoutMode::Sequential),
            "mirror" => Some(LayoutMode::Mirror),
            "dynamic" | "depc" => Some(LayoutMode::Dynamic),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LayoutMode::Sequential => "seq",
            LayoutMode::Mirror => "mirror",
            LayoutMode::Dynamic => "dynamic",
        }
    }
}

/// Guide line a side ellipse is tangent to. M is the vertical line through
/// the center of C_E, N the horizontal one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Guide {
    #[serde(rename = "M-right")]
    MRight,
    #[serde(rename = "M-left")]
    MLeft,
    #[serde(rename = "N-top")]
    NTop,
    #[serde(rename = "N-bottom")]
    NBottom,
}

impl Guide {
    pub const ALL: [Guide; 4] = [Guide::MRight, Guide::MLeft, Guide::NBottom, Guide::NTop];

    pub fn is_vertical(self) -> bool {
        matches!(self, Guide::MRight | Guide::MLeft)
    }

    pub fn name(self) -> &'static str {
        match self {
            Guide::MRight => "M-right",
            Guide::MLeft => "M-left",
            Guide::NTop => "N-top",
            Guide::NBottom => "N-bottom",
        }
    }

    /// The center coordinate fixed by tangency: A for M guides, B for N guides.
    pub fn fixed(self, e: &EllipseSpec) -> f64 {
        match self {
            Guide::MRight => e.cx + e.rw(),
            Guide::MLeft => e.cx - e.rw(),
            Guide::NTop => e.cy + e.rh(),
            Guide::NBottom => e.cy - e.rh(),
        }
    }

    /// Reflection across M.
    pub fn mirrored(self) -> Guide {
        match self {
            Guide::MRight => Guide::MLeft,
            Guide::MLeft => Guide::MRight,
            g => g,
        }
    }
}

/// Which arc of its side ellipse the anchor sits on. TopArc puts the center
/// below the anchor (for N guides: to the left of it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideOrientation {
    TopArc,
    BottomArc,
}

impl SideOrientation {
    pub fn sign(self) -> f64 {
        match self {
            SideOrientation::TopArc => -1.0,
            SideOrientation::BottomArc => 1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SideOrientation::TopArc => SideOrientation::BottomArc,
            SideOrientation::BottomArc => SideOrientation::TopArc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationPreset {
    /// Alternating where it keeps the coordinate invertible, flipped where not.
    #[default]
    Auto,
    AllUp,
    AllDown,
    Alternating,
    Custom(Vec<SideOrientation>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GuideAssignment {
    #[default]
    Auto,
    PerPair(Vec<Guide>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Clockwise,
    CounterClockwise,
}

/// How static layouts turn weights into sector fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SectorScheme {
    /// Weights are shared out inside each guide's reachable region.
    #[default]
    GuideRegions,
    /// w_i / Σw of the whole circumference, contiguous from the top.
    Circumference,
}

/// Arc of the central ellipse owned by one coordinate: value v sits at
/// circumference fraction `start + span * v`. Negative spans run counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub start: f64,
    pub span: f64,
}

impl Sector {
    pub fn position(&self, v: f64) -> f64 {
        let s = (self.start + self.span * v).rem_euclid(1.0);
        if s >= 1.0 {
            0.0
        } else {
            s
        }
    }

    /// Value whose position is `s`, unclamped; close to [0, 1] iff `s` is in the sector.
    pub fn value_of(&self, s: f64) -> f64 {
        let mid = 0.5 * self.span;
        let d = s - self.start;
        let d = d - (d - mid).round();
        d / self.span
    }

    pub fn end(&self) -> f64 {
        self.start + self.span
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinateAnchor {
    pub index: usize,
    pub value: f64,
    pub s: f64,
    pub point: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutConfig {
    pub mode: LayoutMode,
    pub n: usize,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub scheme: SectorScheme,
    #[serde(default)]
    pub directions: Option<Vec<Direction>>,
    #[serde(default)]
    pub orientation: OrientationPreset,
    #[serde(default)]
    pub guides: GuideAssignment,
    #[serde(default)]
    pub root: RootRule,
    #[serde(default = "default_resolution")]
    pub arc_resolution: usize,
}

fn default_resolution() -> usize {
    4096
}

impl LayoutConfig {
    pub fn new(mode: LayoutMode, n: usize) -> Self {
        LayoutConfig {
            mode,
            n,
            weights: None,
            scheme: SectorScheme::default(),
            directions: None,
            orientation: OrientationPreset::default(),
            guides: GuideAssignment::default(),
            root: RootRule::default(),
            arc_resolution: default_resolution(),
        }
    }

    pub fn with_weights(mut self, w: Vec<f64>) -> Self {
        self.weights = Some(w);
        self
    }

    pub fn weights_or_unit(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| vec![1.0; self.n])
    }
}

/// What rules must agree on to be applied to an embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutFingerprint {
    pub mode: LayoutMode,
    pub n: usize,
    pub fractions: Vec<f64>,
    pub weights: Vec<f64>,
    pub ellipse: EllipseSpec,
}

/// A validated layout, ready to embed and invert.
#[derive(Debug, Clone)]
pub struct Layout {
    config: LayoutConfig,
    arc: ArcTable,
    sectors: Vec<Sector>,
    orientations: Vec<SideOrientation>,
    pair_guides: Vec<Guide>,
    steps: Vec<f64>,
    fractions: Vec<f64>,
}

const MONOTONE_SAMPLES: usize = 256;

impl Layout {
    pub fn new(config: LayoutConfig, ellipse: EllipseSpec) -> Result<Self, GeometryError> {
        ellipse.validate()?;
        let n = config.n;
        if n == 0 {
            return Err(GeometryError::Layout("no coordinates".into()));
        }
        if n % 2 == 1 {
            return Err(GeometryError::Layout(format!(
                "n = {n} is odd; pad the data to an even dimension"
            )));
        }
        let weights = config.weights_or_unit();
        if weights.len() != n || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(GeometryError::Layout(format!(
                "need {n} positive weights, got {:?}",
                weights
            )));
        }
        if let Some(d) = &config.directions {
            if d.len() != n {
                return Err(GeometryError::Layout(format!("need {n} directions, got {}", d.len())));
            }
        }
        let m = n / 2;
        let pair_guides = match &config.guides {
            GuideAssignment::Auto => default_guides(m),
            GuideAssignment::PerPair(g) if g.len() == m => g.clone(),
            GuideAssignment::PerPair(g) => {
                return Err(GeometryError::Layout(format!("need {m} pair guides, got {}", g.len())))
            }
        };
        let arc = ArcTable::new(ellipse, config.arc_resolution);
        let mut layout = Layout {
            arc,
            sectors: Vec::new(),
            orientations: Vec::new(),
            pair_guides,
            steps: Vec::new(),
            fractions: Vec::new(),
            config,
        };
        match layout.config.mode {
            LayoutMode::Dynamic => layout.init_dynamic(&weights)?,
            _ => layout.init_static(&weights)?,
        }
        Ok(layout)
    }

    fn init_dynamic(&mut self, weights: &[f64]) -> Result<(), GeometryError> {
        let n = self.config.n as f64;
        let total: f64 = weights.iter().sum();
        self.steps = weights.iter().map(|w| n * w / total).collect();
        self.fractions = weights.iter().map(|w| w / total).collect();
        self.orientations = match &self.config.orientation {
            OrientationPreset::Auto | OrientationPreset::Alternating => alternating(self.config.n),
            other => preset_list(other, self.config.n)?,
        };
        Ok(())
    }

    fn init_static(&mut self, weights: &[f64]) -> Result<(), GeometryError> {
        let n = self.config.n;
        let m = n / 2;
        let mirror = self.config.mode == LayoutMode::Mirror;
        let mut sectors = vec![Sector { start: 0.0, span: 0.0 }; n];
        if mirror {
            let half = n / 2;
            let w: Vec<f64> = (0..half).map(|i| 0.5 * (weights[i] + weights[mirror_partner(i, m)])).collect();
            let (lo, hi) = if m == 1 { (0.25, 0.5) } else { (0.0, 0.5) };
            for (i, s) in contiguous(&w, lo, hi).into_iter().enumerate() {
                sectors[i] = s;
                let j = mirror_partner(i, m);
                sectors[j] = Sector { start: 1.0 - s.start, span: -s.span };
            }
        } else if self.config.scheme == SectorScheme::Circumference {
            sectors = contiguous(weights, 0.0, 1.0);
        } else if m == 1 {
            sectors = contiguous(weights, 0.25, 0.75);
        } else {
            let half = n / 2;
            let mut right = contiguous(&weights[..half], 0.0, 0.5);
            right.extend(contiguous(&weights[half..], 0.5, 1.0));
            sectors = right;
        }
        if let Some(dirs) = &self.config.directions {
            for (s, d) in sectors.iter_mut().zip(dirs) {
                let cw = s.span > 0.0;
                if cw != (*d == Direction::Clockwise) {
                    *s = Sector { start: s.start + s.span, span: -s.span };
                }
            }
        }
        self.fractions = sectors.iter().map(|s| s.span.abs()).collect();
        self.sectors = sectors;

        let explicit = match &self.config.orientation {
            OrientationPreset::Auto => None,
            other => Some(preset_list(other, n)?),
        };
        use SideOrientation::{BottomArc as Bot, TopArc as Top};
        self.orientations = vec![Top; n];
        for k in 0..m {
            let (i, j) = (2 * k, 2 * k + 1);
            let g = self.pair_guides[k];
            let middle = m % 2 == 1 && k == (m - 1) / 2;
            if let Some(list) = &explicit {
                self.check_reachable(i, g, list[i])?;
                self.check_reachable(j, g, list[j])?;
                self.orientations[i] = list[i];
                self.orientations[j] = list[j];
                self.check_pair_intersects(k)?;
                continue;
            }
            if mirror && !middle && mirror_partner(i, m) < i {
                // Keep the left half an exact reflection of the right half.
                self.orientations[i] = self.orientations[mirror_partner(i, m)];
                self.orientations[j] = self.orientations[mirror_partner(j, m)];
                self.check_pair_intersects(k)?;
                continue;
            }
            let combos: &[(SideOrientation, SideOrientation)] = if mirror && middle {
                &[(Top, Bot), (Bot, Top)]
            } else {
                &[(Top, Bot), (Bot, Top), (Top, Top), (Bot, Bot)]
            };
            let mut chosen = None;
            for &(oi, oj) in combos {
                if self.invertible(i, g, oi) && self.invertible(j, g, oj) {
                    self.orientations[i] = oi;
                    self.orientations[j] = oj;
                    if self.check_pair_intersects(k).is_ok() {
                        chosen = Some((oi, oj));
                        break;
                    }
                }
            }
            if chosen.is_none() {
                return Err(GeometryError::Layout(format!(
                    "coordinates {} and {} have no invertible side-ellipse orientation for guide {}",
                    i + 1,
                    j + 1,
                    g.name()
                )));
            }
        }
        Ok(())
    }

    fn check_reachable(&self, i: usize, g: Guide, o: SideOrientation) -> Result<(), GeometryError> {
        for k in 0..=MONOTONE_SAMPLES {
            let p = self.arc.point(self.sectors[i].position(k as f64 / MONOTONE_SAMPLES as f64));
            if free_center(p, g, o, self.ellipse()).is_none() {
                return Err(GeometryError::Unreachable { coordinate: i + 1, guide: g.name().into() });
            }
        }
        Ok(())
    }

    fn free_centers(&self, i: usize, g: Guide, o: SideOrientation) -> Option<Vec<f64>> {
        (0..=MONOTONE_SAMPLES)
            .map(|k| {
                let p = self.arc.point(self.sectors[i].position(k as f64 / MONOTONE_SAMPLES as f64));
                free_center(p, g, o, self.ellipse())
            })
            .collect()
    }

    fn invertible(&self, i: usize, g: Guide, o: SideOrientation) -> bool {
        let Some(f) = self.free_centers(i, g, o) else {
            return false;
        };
        let up = f.windows(2).all(|w| w[1] > w[0]);
        let down = f.windows(2).all(|w| w[1] < w[0]);
        up || down
    }

    fn check_pair_intersects(&self, k: usize) -> Result<(), GeometryError> {
        let (i, j) = (2 * k, 2 * k + 1);
        let g = self.pair_guides[k];
        let fi = self
            .free_centers(i, g, self.orientations[i])
            .ok_or(GeometryError::Unreachable { coordinate: i + 1, guide: g.name().into() })?;
        let fj = self
            .free_centers(j, g, self.orientations[j])
            .ok_or(GeometryError::Unreachable { coordinate: j + 1, guide: g.name().into() })?;
        let reach = if g.is_vertical() { 2.0 * self.ellipse().rh() } else { 2.0 * self.ellipse().rw() };
        let span = |f: &[f64]| {
            f.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
        };
        let (a0, a1) = span(&fi);
        let (b0, b1) = span(&fj);
        let worst = (a1 - b0).abs().max((b1 - a0).abs());
        if worst > reach * (1.0 + 1e-12) {
            return Err(GeometryError::Layout(format!(
                "side ellipses of coordinates {} and {} stop intersecting inside their sectors",
                i + 1,
                j + 1
            )));
        }
        Ok(())
    }

    pub fn config(&self) -> &LayoutConfig {
        &self.config
    }

    pub fn ellipse(&self) -> &EllipseSpec {
        self.arc.ellipse()
    }

    pub fn arc(&self) -> &ArcTable {
        &self.arc
    }

    pub fn mode(&self) -> LayoutMode {
        self.config.mode
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn pairs(&self) -> usize {
        self.config.n / 2
    }

    pub fn root_rule(&self) -> RootRule {
        self.config.root
    }

    /// Static sectors; empty in dynamic mode.
    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Fraction of the circumference given to each coordinate (dynamic: share of a turn).
    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    /// Dynamic mode: arc advanced per unit of each coordinate.
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn orientation(&self, i: usize) -> SideOrientation {
        self.orientations[i]
    }

    pub fn orientations(&self) -> &[SideOrientation] {
        &self.orientations
    }

    /// Preferred guide of pair `k`; in dynamic mode the embedding may pick another.
    pub fn pair_guide(&self, k: usize) -> Guide {
        self.pair_guides[k]
    }

    pub fn guide_of(&self, i: usize) -> Guide {
        self.pair_guides[i / 2]
    }

    pub(crate) fn default_side(&self, i: usize) -> super::embed::SideChoice {
        super::embed::SideChoice { guide: self.guide_of(i), orientation: self.orientations[i], left: None, beyond: None }
    }

    pub fn fingerprint(&self) -> LayoutFingerprint {
        LayoutFingerprint {
            mode: self.config.mode,
            n: self.config.n,
            fractions: self.fractions.clone(),
            weights: self.config.weights_or_unit(),
            ellipse: *self.ellipse(),
        }
    }

    /// Static anchor of coordinate `i` at value `v`.
    pub fn anchor(&self, i: usize, v: f64) -> Result<CoordinateAnchor, GeometryError> {
        check_value(i, v)?;
        if self.config.mode == LayoutMode::Dynamic {
            return Err(GeometryError::Layout(
                "dynamic anchors need the running position; use anchor_after".into(),
            ));
        }
        let s = self.sectors[i].position(v);
        Ok(CoordinateAnchor { index: i, value: v, s, point: self.arc.point(s) })
    }

    /// Dynamic anchor of coordinate `i`, continuing from arc position `prev`.
    pub fn anchor_after(&self, i: usize, v: f64, prev: f64) -> Result<CoordinateAnchor, GeometryError> {
        check_value(i, v)?;
        let step = if self.steps.is_empty() { 1.0 } else { self.steps[i] };
        let s = (prev + v * step).rem_euclid(1.0);
        let s = if s >= 1.0 { 0.0 } else { s };
        Ok(CoordinateAnchor { index: i, value: v, s, point: self.arc.point(s) })
    }
}

fn check_value(i: usize, v: f64) -> Result<(), GeometryError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(GeometryError::Domain { coordinate: i + 1, value: v })
    }
}

/// Right M for the first half of the pairs, left M for the second half, and
/// bottom N for the middle pair when the pair count is odd.
pub(crate) fn default_guides(m: usize) -> Vec<Guide> {
    (0..m)
        .map(|k| {
            if m % 2 == 1 && k == (m - 1) / 2 {
                Guide::NBottom
            } else if k < m / 2 {
                Guide::MRight
            } else {
                Guide::MLeft
            }
        })
        .collect()
}

/// Coordinate reflected onto coordinate `i` across M in the mirror layout.
pub(crate) fn mirror_partner(i: usize, m: usize) -> usize {
    let (k, r) = (i / 2, i % 2);
    if m % 2 == 1 && k == (m - 1) / 2 {
        i ^ 1
    } else {
        2 * (m - 1 - k) + r
    }
}

fn contiguous(weights: &[f64], lo: f64, hi: f64) -> Vec<Sector> {
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            let start = lo + (hi - lo) * acc / total;
            acc += w;
            let end = lo + (hi - lo) * acc / total;
            Sector { start, span: end - start }
        })
        .collect()
}

fn alternating(n: usize) -> Vec<SideOrientation> {
    (0..n)
        .map(|i| if i % 2 == 0 { SideOrientation::TopArc } else { SideOrientation::BottomArc })
        .collect()
}

fn preset_list(p: &OrientationPreset, n: usize) -> Result<Vec<SideOrientation>, GeometryError> {
    Ok(match p {
        OrientationPreset::Auto | OrientationPreset::Alternating => alternating(n),
        OrientationPreset::AllUp => vec![SideOrientation::TopArc; n],
        OrientationPreset::AllDown => vec![SideOrientation::BottomArc; n],
        OrientationPreset::Custom(v) if v.len() == n => v.clone(),
        OrientationPreset::Custom(v) => {
            return Err(GeometryError::Layout(format!("need {n} orientations, got {}", v.len())))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(mode: LayoutMode, n: usize) -> Layout {
        Layout::new(LayoutConfig::new(mode, n), EllipseSpec::unit()).unwrap()
    }

    #[test]
    fn guides_follow_pair_position() {
        use Guide::*;
        assert_eq!(default_guides(1), vec![NBottom]);
        assert_eq!(default_guides(2), vec![MRight, MLeft]);
        assert_eq!(default_guides(3), vec![MRight, NBottom, MLeft]);
        assert_eq!(default_guides(5), vec![MRight, MRight, NBottom, MLeft, MLeft]);
    }

    #[test]
    fn mirror_partners_are_involutions() {
        for m in 1..7 {
            for i in 0..2 * m {
                assert_eq!(mirror_partner(mirror_partner(i, m), m), i);
            }
        }
        assert_eq!(mirror_partner(0, 2), 2);
        assert_eq!(mirror_partner(4, 5), 5);
    }

    #[test]
    fn unit_weights_give_uniform_sectors() {
        for n in [4, 6, 8, 10] {
            let l = unit(LayoutMode::Sequential, n);
            for (i, s) in l.sectors().iter().enumerate() {
                assert!((s.start - i as f64 / n as f64).abs() < 1e-15);
                assert!((s.span - 1.0 / n as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mirror_sectors_reflect() {
        let l = unit(LayoutMode::Mirror, 8);
        for i in 0..4 {
            let a = l.sectors()[i];
            let b = l.sectors()[mirror_partner(i, 4)];
            for v in [0.0, 0.3, 1.0] {
                assert!((a.position(v) + b.position(v) - 1.0).abs().min(
                    (a.position(v) + b.position(v)).abs()) < 1e-15);
            }
        }
    }

    #[test]
    fn circumference_weights_match_worked_example() {
        let cfg = LayoutConfig {
            scheme: SectorScheme::Circumference,
            ..LayoutConfig::new(LayoutMode::Sequential, 4).with_weights(vec![4.0, 2.0, 6.0, 5.0])
        };
        let sectors = {
            let w = cfg.weights_or_unit();
            contiguous(&w, 0.0, 1.0)
        };
        assert!((sectors[0].position(0.3) - 0.3 * 4.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn sector_value_wraps_around_top() {
        let s = Sector { start: 1.0, span: -0.25 };
        assert!((s.value_of(0.0)).abs() < 1e-15);
        assert!((s.value_of(0.75) - 1.0).abs() < 1e-15);
        let t = Sector { start: 0.0, span: 0.25 };
        assert!((t.value_of(0.999_999_999_999_999_9)).abs() < 1e-12);
    }

    #[test]
    fn odd_dimension_is_rejected() {
        let err = Layout::new(LayoutConfig::new(LayoutMode::Sequential, 3), EllipseSpec::unit()).unwrap_err();
        assert!(matches!(err, GeometryError::Layout(_)));
    }

    #[test]
    fn every_even_n_builds() {
        for mode in [LayoutMode::Sequential, LayoutMode::Mirror, LayoutMode::Dynamic] {
            for n in (2..=20).step_by(2) {
                Layout::new(LayoutConfig::new(mode, n), EllipseSpec::unit())
                    .unwrap_or_else(|e| panic!("{mode:?} n={n}: {e}"));
            }
        }
    }

    #[test]
    fn wide_ellipse_builds() {
        for n in [2, 4, 6, 8, 10] {
            Layout::new(LayoutConfig::new(LayoutMode::Sequential, n), EllipseSpec::new(0.0, 0.0, 4.0, 2.0).unwrap())
                .unwrap();
        }
    }
}
