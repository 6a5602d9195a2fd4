use super::ellipse::Point;
use super::layout::{Layout, LayoutMode};
use crate::error::GeometryError;

const LINE_SAMPLES: usize = 4096;

/// 4-D points (a, b, a, b) whose mirror-layout graphs lie on the horizontal
/// line y = `line_y`. P_1 is swept along the line and inverted; P_2 follows
/// as its reflection across M, so the whole arrow stays on the line.
pub fn points_on_horizontal_line(line_y: f64, count: usize, layout: &Layout) -> Result<Vec<[f64; 4]>, GeometryError> {
    if layout.mode() != LayoutMode::Mirror || layout.n() != 4 {
        return Err(GeometryError::Layout("line construction needs the 4-D mirror layout".into()));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let e = layout.ellipse();
    let (sa, sb) = (layout.default_side(0), layout.default_side(1));
    let (x0, x1) = (e.cx - 2.0 * e.rw(), e.cx + 2.0 * e.rw());
    let mut found = Vec::new();
    for k in 0..=LINE_SAMPLES {
        let x = x0 + (x1 - x0) * k as f64 / LINE_SAMPLES as f64;
        if let Some((a, b, _)) = layout.invert_pair(0, Point::new(x, line_y), sa, sb, 0.0) {
            found.push([a, b, a, b]);
        }
    }
    if found.is_empty() {
        return Err(GeometryError::EmptyResult);
    }
    if count == 1 {
        return Ok(vec![found[found.len() / 2]]);
    }
    let last = found.len() - 1;
    Ok((0..count).map(|i| found[(i * last + (count - 1) / 2) / (count - 1)]).collect())
}
