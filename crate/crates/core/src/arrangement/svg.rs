use std::fmt::Write;

use super::{Arrangement, ArrangementError, BoundedComplex, Hyperplane};

const CANVAS: f64 = 400.0;
const MARGIN: f64 = 10.0;
const CELL_FILL: &str = "#c6d4ea";
const LINE_STROKE: &str = "#1f2d3d";

#[derive(Clone, Copy, Debug)]
struct ViewBox {
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl ViewBox {
    fn around(complex: &BoundedComplex) -> ViewBox {
        let pts: Vec<(f64, f64)> = complex
            .vertices()
            .iter()
            .map(|v| (v.witness[0].to_f64(), v.witness[1].to_f64()))
            .collect();
        if pts.is_empty() {
            return ViewBox { xmin: -1.0, xmax: 1.0, ymin: -1.0, ymax: 1.0 };
        }
        let mut diam: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                diam = diam.max(((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt());
            }
        }
        let pad = if diam > 0.0 { 0.1 * diam } else { 0.5 };
        let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64)) -> f64| pts.iter().map(sel).fold(init, f);
        ViewBox {
            xmin: fold(f64::min, f64::INFINITY, |p| p.0) - pad,
            xmax: fold(f64::max, f64::NEG_INFINITY, |p| p.0) + pad,
            ymin: fold(f64::min, f64::INFINITY, |p| p.1) - pad,
            ymax: fold(f64::max, f64::NEG_INFINITY, |p| p.1) + pad,
        }
    }

    fn scale(&self) -> f64 {
        CANVAS / (self.xmax - self.xmin).max(self.ymax - self.ymin)
    }

    fn canvas_point(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let s = self.scale();
        (MARGIN + (x - self.xmin) * s, MARGIN + (self.ymax - y) * s)
    }

    fn size(&self) -> (f64, f64) {
        let s = self.scale();
        (2.0 * MARGIN + (self.xmax - self.xmin) * s, 2.0 * MARGIN + (self.ymax - self.ymin) * s)
    }

    /// Liang–Barsky clip of the full line `⟨x, a⟩ = c`.
    fn clip(&self, h: &Hyperplane) -> Option<((f64, f64), (f64, f64))> {
        let (a0, a1) = (h.normal[0].to_f64(), h.normal[1].to_f64());
        let c = h.offset.to_f64();
        let norm2 = a0 * a0 + a1 * a1;
        let base = (c * a0 / norm2, c * a1 / norm2);
        let dir = (-a1, a0);
        let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
        for (p, d, lo, hi) in [(base.0, dir.0, self.xmin, self.xmax), (base.1, dir.1, self.ymin, self.ymax)] {
            if d == 0.0 {
                if p < lo || p > hi {
                    return None;
                }
                continue;
            }
            let (ta, tb) = ((lo - p) / d, (hi - p) / d);
            t0 = t0.max(ta.min(tb));
            t1 = t1.min(ta.max(tb));
        }
        if t0 >= t1 {
            return None;
        }
        let at = |t: f64| (base.0 + t * dir.0, base.1 + t * dir.1);
        Some((at(t0), at(t1)))
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

/// Planar drawing of the arrangement with the bounded 2-cells shaded.
///
/// The view is the bounding box of the complex's vertices padded by a tenth
/// of their diameter. Output depends only on the input, byte for byte.
pub fn render_svg(arr: &Arrangement, complex: &BoundedComplex) -> Result<String, ArrangementError> {
    if arr.dim() != 2 {
        return Err(ArrangementError::UnsupportedDimension(arr.dim()));
    }
    let view = ViewBox::around(complex);
    let (width, height) = view.size();
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(width),
        h = num(height)
    );
    let _ = writeln!(out, r#"  <rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, num(width), num(height));

    let _ = writeln!(out, r#"  <g class="cells">"#);
    for cell in &complex.faces_by_dim[2] {
        let mut corners: Vec<(f64, f64)> = complex
            .vertices()
            .iter()
            .filter(|v| cell.sign.is_refined_by(&v.sign))
            .map(|v| (v.witness[0].to_f64(), v.witness[1].to_f64()))
            .collect();
        let k = corners.len() as f64;
        let centre = (corners.iter().map(|p| p.0).sum::<f64>() / k, corners.iter().map(|p| p.1).sum::<f64>() / k);
        corners.sort_by(|a, b| {
            let ta = (a.1 - centre.1).atan2(a.0 - centre.0);
            let tb = (b.1 - centre.1).atan2(b.0 - centre.0);
            ta.total_cmp(&tb)
        });
        let points: Vec<String> = corners
            .iter()
            .map(|&p| {
                let (x, y) = view.canvas_point(p);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        let _ = writeln!(
            out,
            r#"    <polygon points="{}" fill="{CELL_FILL}" stroke="none" data-sign="{}"/>"#,
            points.join(" "),
            cell.sign
        );
    }
    let _ = writeln!(out, "  </g>");

    let _ = writeln!(out, r#"  <g class="hyperplanes" stroke="{LINE_STROKE}" stroke-width="1.5">"#);
    for (i, h) in arr.hyperplanes().iter().enumerate() {
        if let Some((p, q)) = view.clip(h) {
            let (x1, y1) = view.canvas_point(p);
            let (x2, y2) = view.canvas_point(q);
            let _ = writeln!(
                out,
                r#"    <line x1="{}" y1="{}" x2="{}" y2="{}" data-index="{i}"/>"#,
                num(x1),
                num(y1),
                num(x2),
                num(y2)
            );
        }
    }
    let _ = writeln!(out, "  </g>");

    let _ = writeln!(out, r#"  <g class="vertices" fill="{LINE_STROKE}">"#);
    for v in complex.vertices() {
        let (x, y) = view.canvas_point((v.witness[0].to_f64(), v.witness[1].to_f64()));
        let _ = writeln!(out, r#"    <circle cx="{}" cy="{}" r="3"/>"#, num(x), num(y));
    }
    let _ = writeln!(out, "  </g>");
    out.push_str("</svg>\n");
    Ok(out)
}
