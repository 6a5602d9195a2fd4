use std::fmt::Write;

use super::{Scene, OTHER_COLOR};

/// Six decimals, without a negative zero.
fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Scene y points up; SVG y points down.
fn xy(p: [f64; 2]) -> String {
    format!("{},{}", num(p[0]), num(-p[1]))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Standalone SVG 1.1 document; identical scenes give identical bytes.
pub fn to_svg(scene: &Scene) -> String {
    let v = &scene.viewport;
    let (w, h) = (v.xmax - v.xmin, v.ymax - v.ymin);
    let stroke = w.max(h) / 500.0;
    let font = w.max(h) / 45.0;
    let mut o = String::new();
    let _ = writeln!(o, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        o,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        v.width_px,
        v.height_px,
        num(v.xmin),
        num(-v.ymax),
        num(w),
        num(h)
    );

    // one arrowhead marker per color in use
    let mut colors: Vec<&str> = scene.legend.iter().map(|e| e.color.as_str()).collect();
    colors.dedup();
    o.push_str("<defs>\n");
    for (i, c) in colors.iter().enumerate() {
        let _ = writeln!(
            o,
            r#"<marker id="arrow{i}" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="5" markerHeight="5" markerUnits="strokeWidth" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="{c}"/></marker>"#
        );
    }
    o.push_str("</defs>\n");

    let e = &scene.ellipse;
    let (rw, rh) = (e.w / 2.0, e.h / 2.0);
    let _ = writeln!(
        o,
        r#"<path class="ellipse" d="M{} A{},{} 0 1,1 {} A{},{} 0 1,1 {} Z" fill="none" stroke="black" stroke-width="{}"/>"#,
        xy([e.cx, e.cy + rh]),
        num(rw),
        num(rh),
        xy([e.cx, e.cy - rh]),
        num(rw),
        num(rh),
        xy([e.cx, e.cy + rh]),
        num(stroke)
    );

    o.push_str("<g class=\"sectors\">\n");
    for s in &scene.sectors {
        for p in [s.p0, s.p1] {
            let _ = writeln!(o, r#"<circle cx="{}" cy="{}" r="{}" fill="black"/>"#, num(p[0]), num(-p[1]), num(2.0 * stroke));
        }
        // label just outside the middle of the arc
        let mid = [(s.p0[0] + s.p1[0]) / 2.0 - e.cx, (s.p0[1] + s.p1[1]) / 2.0 - e.cy];
        let len = mid[0].hypot(mid[1]);
        let at = if len > 1e-12 {
            let k = 1.0 + 2.0 * font / len.max(font);
            [e.cx + mid[0] * k, e.cy + mid[1] * k]
        } else {
            s.p0
        };
        let _ = writeln!(
            o,
            r#"<text x="{}" y="{}" font-size="{}" text-anchor="middle">{}</text>"#,
            num(at[0]),
            num(-at[1]),
            num(font),
            escape(&s.label)
        );
    }
    o.push_str("</g>\n");

    if let Some(ov) = &scene.overlay {
        o.push_str("<g class=\"overlay\">\n");
        for el in &ov.ellipses {
            let color = if el.coord % 2 == 1 { "#d62728" } else { "#1f77b4" };
            let _ = writeln!(
                o,
                r#"<ellipse cx="{}" cy="{}" rx="{}" ry="{}" fill="none" stroke="{color}" stroke-width="{}" stroke-dasharray="{},{}"/>"#,
                num(el.cx),
                num(-el.cy),
                num(el.w / 2.0),
                num(el.h / 2.0),
                num(stroke),
                num(4.0 * stroke),
                num(2.0 * stroke)
            );
        }
        o.push_str("</g>\n");
    }

    o.push_str("<g class=\"graphs\">\n");
    for g in scene.graphs.iter().filter(|g| g.visible) {
        let color = scene.color_of(&g.class);
        match g.nodes.as_slice() {
            [] => {}
            [p] => {
                let _ = writeln!(
                    o,
                    r#"<circle data-case="{}" cx="{}" cy="{}" r="{}" fill="{color}"/>"#,
                    g.id,
                    num(p[0]),
                    num(-p[1]),
                    num(2.0 * stroke)
                );
            }
            nodes => {
                let marker = colors.iter().position(|c| *c == color).unwrap_or(0);
                let pts: Vec<String> = nodes.iter().map(|&p| xy(p)).collect();
                let _ = writeln!(
                    o,
                    r#"<polyline data-case="{}" points="{}" fill="none" stroke="{color}" stroke-width="{}" marker-end="url(#arrow{marker})"/>"#,
                    g.id,
                    pts.join(" "),
                    num(stroke)
                );
            }
        }
    }
    o.push_str("</g>\n");

    o.push_str("<g class=\"rects\">\n");
    let rects = scene.rects.iter().map(|r| (Some(r.id), r.class.as_str(), r.xmin, r.ymin, r.xmax, r.ymax));
    let pending = scene.pending.iter().map(|p| (None, "", p.xmin, p.ymin, p.xmax, p.ymax));
    for (id, class, x0, y0, x1, y1) in rects.chain(pending) {
        let color = if id.is_some() { scene.color_of(class) } else { OTHER_COLOR };
        let tag = id.map_or_else(
            || format!(r#"class="pending" stroke-dasharray="{},{}""#, num(6.0 * stroke), num(3.0 * stroke)),
            |i| format!(r#"data-rule="{i}""#),
        );
        let _ = writeln!(
            o,
            r#"<rect {tag} x="{}" y="{}" width="{}" height="{}" fill="{color}" fill-opacity="0.08" stroke="{color}" stroke-width="{}"/>"#,
            num(x0),
            num(-y1),
            num(x1 - x0),
            num(y1 - y0),
            num(1.5 * stroke)
        );
    }
    o.push_str("</g>\n");

    o.push_str("<g class=\"legend\">\n");
    for (i, entry) in scene.legend.iter().enumerate() {
        let y = v.ymax - font * (1.5 + 1.3 * i as f64);
        let x = v.xmin + font;
        let _ = writeln!(
            o,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/><text x="{}" y="{}" font-size="{}">{}</text>"#,
            num(x),
            num(-y - 0.8 * font),
            num(font),
            num(0.8 * font),
            entry.color,
            num(x + 1.5 * font),
            num(-y),
            num(font),
            escape(&entry.class)
        );
    }
    o.push_str("</g>\n</svg>\n");
    o
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::geometry::{EllipseSpec, Layout, LayoutConfig, LayoutMode};

    fn layout() -> Layout {
        Layout::new(LayoutConfig::new(LayoutMode::Sequential, 4), EllipseSpec::unit()).unwrap()
    }

    #[test]
    fn empty_scene_has_ellipse_and_marks() {
        let s = build_scene(&layout(), &[], &[], &[], &SceneOptions::default()).unwrap();
        let svg = to_svg(&s);
        assert_eq!(svg.matches("<path class=\"ellipse\"").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 8);
        assert_eq!(svg.matches("<polyline").count(), 0);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn one_case_is_one_arrow() {
        let l = layout();
        let g = l.embed(&[0.2, 0.4, 0.6, 0.8]).unwrap();
        let s = build_scene(&l, &[g.clone()], &["a".into()], &[], &SceneOptions::default()).unwrap();
        let svg = to_svg(&s);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("marker-end").count(), 1);
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let pts = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split(' ').count(), 2);
        // y is flipped, six decimals
        assert!(pts.starts_with(&format!("{:.6},{:.6}", g.nodes[0].x, -g.nodes[0].y)));
        assert_eq!(to_svg(&s), svg);
    }

    #[test]
    fn numbers_have_no_negative_zero() {
        assert_eq!(super::num(-0.0000001), "0.000000");
        assert_eq!(super::num(-1.5), "-1.500000");
    }
}
