//! SVG drawing of a density with the true and reconstructed graphs on top.

use std::fmt::Write as _;

use dmgraph::extraction::ReconstructedGraph;
use dmgraph::{DensityField, PlanarGraph, Point};

const TRUTH_COLOR: &str = "#d62728";
const RECON_COLOR: &str = "#2ca02c";
const PX_PER_UNIT: f64 = 6.0;

struct Frame {
    min: Point,
    max: Point,
    unit: f64,
}

impl Frame {
    fn of(density: Option<&DensityField>, truth: Option<&PlanarGraph>, recon: Option<&ReconstructedGraph>) -> Frame {
        if let Some(d) = density {
            let g = d.grid();
            let half = g.spacing / 2.0;
            let (lo, hi) = (g.origin, g.max_corner());
            return Frame {
                min: Point::new(lo.x - half, lo.y - half),
                max: Point::new(hi.x + half, hi.y + half),
                unit: g.spacing,
            };
        }
        let mut pts: Vec<Point> = Vec::new();
        if let Some(t) = truth {
            pts.extend(t.vertices());
            pts.extend(t.edges().iter().flat_map(|e| e.polyline.iter().copied()));
        }
        if let Some(r) = recon {
            pts.extend(r.nodes.iter().map(|n| n.point));
            pts.extend(r.edges.iter().flat_map(|e| e.polyline.iter().copied()));
        }
        let (mut min, mut max) = (Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        if let Some(first) = pts.first() {
            min = *first;
            max = *first;
            for p in &pts {
                min = Point::new(min.x.min(p.x), min.y.min(p.y));
                max = Point::new(max.x.max(p.x), max.y.max(p.y));
            }
        }
        let span = (max.x - min.x).max(max.y - min.y).max(1.0);
        let pad = span * 0.05;
        Frame {
            min: Point::new(min.x - pad, min.y - pad),
            max: Point::new(max.x + pad, max.y + pad),
            unit: span / 96.0,
        }
    }

    fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// SVG coordinates have y pointing down.
    fn map(&self, p: Point) -> (f64, f64) {
        (p.x - self.min.x, self.max.y - p.y)
    }
}

fn path_data(frame: &Frame, line: &[Point]) -> String {
    let mut d = String::new();
    for (k, p) in line.iter().enumerate() {
        let (x, y) = frame.map(*p);
        let _ = write!(d, "{}{} {}", if k == 0 { "M" } else { " L" }, x, y);
    }
    d
}

pub fn render_svg(
    density: Option<&DensityField>,
    truth: Option<&PlanarGraph>,
    recon: Option<&ReconstructedGraph>,
) -> String {
    let frame = Frame::of(density, truth, recon);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        (frame.width() / frame.unit * PX_PER_UNIT).round(),
        (frame.height() / frame.unit * PX_PER_UNIT).round(),
        frame.width(),
        frame.height()
    );

    out.push_str(r#"<g id="density" shape-rendering="crispEdges">"#);
    out.push('\n');
    if let Some(d) = density {
        let g = *d.grid();
        let max = d.max_value();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let level = if max > 0.0 { 255.0 * (1.0 - d.value(i, j) / max) } else { 255.0 };
                let c = level.round().clamp(0.0, 255.0) as u8;
                let p = g.world(i, j);
                let (x, y) = frame.map(Point::new(p.x - g.spacing / 2.0, p.y + g.spacing / 2.0));
                let _ = writeln!(
                    out,
                    r#"<rect x="{x}" y="{y}" width="{s}" height="{s}" fill="rgb({c},{c},{c})"/>"#,
                    s = g.spacing
                );
            }
        }
    }
    out.push_str("</g>\n");

    let stroke = frame.unit * 0.4;
    let _ = writeln!(
        out,
        r#"<g id="truth" fill="none" stroke="{TRUTH_COLOR}" stroke-width="{stroke}" stroke-linecap="round">"#
    );
    if let Some(t) = truth {
        for e in t.edges() {
            let _ = writeln!(out, r#"<path d="{}"/>"#, path_data(&frame, &e.polyline));
        }
    }
    out.push_str("</g>\n");

    let _ = writeln!(
        out,
        r#"<g id="recon" fill="none" stroke="{RECON_COLOR}" stroke-width="{stroke}" stroke-linejoin="round">"#
    );
    if let Some(r) = recon {
        for e in &r.edges {
            let _ = writeln!(out, r#"<path d="{}"/>"#, path_data(&frame, &e.polyline));
        }
    }
    out.push_str("</g>\n");

    let _ = writeln!(out, r#"<g id="nodes" fill="{RECON_COLOR}" stroke="black" stroke-width="{}">"#, stroke / 3.0);
    if let Some(r) = recon {
        for n in &r.nodes {
            let (x, y) = frame.map(n.point);
            let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="{}"/>"#, frame.unit);
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use dmgraph::GridSpec;

    #[test]
    fn zero_is_white_and_max_is_black() {
        let grid = GridSpec::unit(2, 2).unwrap();
        let d = DensityField::new(grid, vec![0.0, 2.0, 1.0, 4.0]).unwrap();
        let svg = render_svg(Some(&d), None, None);
        assert!(svg.contains("rgb(255,255,255)"));
        assert!(svg.contains("rgb(0,0,0)"));
        assert!(svg.contains("rgb(128,128,128)"));
        assert_eq!(svg.matches("<rect").count(), 4);
    }

    #[test]
    fn origin_pixel_is_bottom_left() {
        let grid = GridSpec::unit(3, 2).unwrap();
        let d = DensityField::new(grid, vec![5.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let svg = render_svg(Some(&d), None, None);
        assert!(svg.contains(r#"<rect x="0" y="1" width="1" height="1" fill="rgb(0,0,0)"/>"#));
    }

    #[test]
    fn empty_recon_layer_is_still_valid() {
        let t = PlanarGraph::straight(vec![Point::new(0.0, 0.0), Point::new(5.0, 5.0)], &[(0, 1)]).unwrap();
        let svg = render_svg(None, Some(&t), Some(&ReconstructedGraph::default()));
        assert!(svg.contains("<g id=\"recon\""));
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 0);
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
