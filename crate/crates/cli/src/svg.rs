//! Scenes of exact geometry rendered to standalone SVG.
//!
//! Coordinates are printed at 12 significant digits; nothing reads them
//! back. The y axis is flipped so that up is up.

use aperiodic::geometry::Point;
use aperiodic::rational::{fmt_sig, fmt_sig_f64, to_f64, Q};
use std::fmt::Write;
use std::path::Path;

const DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polygon {
    pub class: String,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circle {
    pub class: String,
    pub center: Point,
    pub r: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dot {
    pub class: String,
    pub at: Point,
}

/// Layers are drawn bottom to top in field order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SvgScene {
    pub title: String,
    /// Filled closed paths.
    pub regions: Vec<Polygon>,
    /// Stroked closed paths.
    pub outlines: Vec<Polygon>,
    pub circles: Vec<Circle>,
    pub polylines: Vec<Polygon>,
    pub points: Vec<Dot>,
}

#[derive(Debug, thiserror::Error)]
pub enum SvgError {
    #[error("nothing to draw")]
    Empty,
    #[error("writing {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl SvgScene {
    pub fn new(title: &str) -> Self {
        SvgScene { title: title.to_string(), ..Default::default() }
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
            && self.outlines.is_empty()
            && self.circles.is_empty()
            && self.polylines.is_empty()
            && self.points.is_empty()
    }

    pub fn region(&mut self, class: &str, points: Vec<Point>) {
        self.regions.push(Polygon { class: class.into(), points });
    }

    pub fn outline(&mut self, class: &str, points: Vec<Point>) {
        self.outlines.push(Polygon { class: class.into(), points });
    }

    pub fn circle(&mut self, class: &str, center: Point, r: Q) {
        self.circles.push(Circle { class: class.into(), center, r });
    }

    pub fn polyline(&mut self, class: &str, points: Vec<Point>) {
        self.polylines.push(Polygon { class: class.into(), points });
    }

    pub fn point(&mut self, class: &str, at: Point) {
        self.points.push(Dot { class: class.into(), at });
    }

    /// `(min_x, min_y, max_x, max_y)` over everything drawn, circles by
    /// their bounding squares.
    pub fn bounds(&self) -> Option<(f64, f64, f64, f64)> {
        let mut b: Option<(f64, f64, f64, f64)> = None;
        let mut add = |x: f64, y: f64| {
            b = Some(match b {
                None => (x, y, x, y),
                Some((a, c, d, e)) => (a.min(x), c.min(y), d.max(x), e.max(y)),
            });
        };
        let polys = self.regions.iter().chain(&self.outlines).chain(&self.polylines);
        for p in polys.flat_map(|p| &p.points).chain(self.points.iter().map(|d| &d.at)) {
            add(to_f64(&p.x), to_f64(&p.y));
        }
        for c in &self.circles {
            let (x, y, r) = (to_f64(&c.center.x), to_f64(&c.center.y), to_f64(&c.r));
            add(x - r, y - r);
            add(x + r, y + r);
        }
        b
    }
}

fn num(v: f64) -> String {
    fmt_sig_f64(v, DIGITS)
}

fn q(v: &Q) -> String {
    fmt_sig(v, DIGITS)
}

fn neg(v: &Q) -> String {
    fmt_sig(&-v, DIGITS)
}

fn path_data(points: &[Point], closed: bool) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, q(&p.x), neg(&p.y));
    }
    if closed {
        d.push_str(" Z");
    }
    d
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const STYLE: &str = "path,circle{vector-effect:non-scaling-stroke;stroke-width:1}\n\
.hull,.ey{fill:#4a6fa5;fill-opacity:0.5;stroke:none}\n\
.gap{fill:#e0b040;fill-opacity:0.6;stroke:none}\n\
.diamond,.box{fill:none;stroke:#222}\n\
.section{fill:none;stroke:#999}\n\
.window{fill:none;stroke:#888;stroke-dasharray:4 3}\n\
.frame{fill:none;stroke:#c0392b}\n\
.path{fill:none;stroke:#27ae60}\n\
.relocation{fill:none;stroke:#8e44ad}\n\
.witness{fill:#111}\n\
.query{fill:#c0392b}\n";

/// The SVG document for a nonempty scene. The viewport is the content
/// bounds widened by 5% of the larger side on every edge.
pub fn svg_string(scene: &SvgScene) -> Result<String, SvgError> {
    let (x0, y0, x1, y1) = scene.bounds().ok_or(SvgError::Empty)?;
    let span = (x1 - x0).max(y1 - y0);
    let margin = if span > 0.0 { span * 0.05 } else { 1.0 };
    let (vx, vy) = (x0 - margin, -y1 - margin);
    let (vw, vh) = (x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin);
    let dot = (vw.max(vh) * 0.004).max(f64::MIN_POSITIVE);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">",
        num(vx),
        num(vy),
        num(vw),
        num(vh),
        num((800.0 * vh / vw).round().max(1.0)),
    );
    let _ = writeln!(out, "<title>{}</title>", escape(&scene.title));
    let _ = writeln!(out, "<style>\n{STYLE}</style>");
    let _ = writeln!(
        out,
        "<rect class=\"background\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"white\"/>",
        num(vx),
        num(vy),
        num(vw),
        num(vh)
    );

    let _ = writeln!(out, "<g id=\"regions\">");
    for p in &scene.regions {
        let _ = writeln!(out, "<path class=\"{}\" d=\"{}\"/>", escape(&p.class), path_data(&p.points, true));
    }
    let _ = writeln!(out, "</g>\n<g id=\"outlines\">");
    for p in &scene.outlines {
        let _ = writeln!(out, "<path class=\"{}\" d=\"{}\"/>", escape(&p.class), path_data(&p.points, true));
    }
    for c in &scene.circles {
        let _ = writeln!(
            out,
            "<circle class=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
            escape(&c.class),
            q(&c.center.x),
            neg(&c.center.y),
            q(&c.r)
        );
    }
    let _ = writeln!(out, "</g>\n<g id=\"polylines\">");
    for p in &scene.polylines {
        let _ = writeln!(out, "<path class=\"{}\" d=\"{}\"/>", escape(&p.class), path_data(&p.points, false));
    }
    let _ = writeln!(out, "</g>\n<g id=\"points\">");
    for d in &scene.points {
        let _ = writeln!(
            out,
            "<circle class=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
            escape(&d.class),
            q(&d.at.x),
            neg(&d.at.y),
            num(dot)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

pub fn render_svg(scene: &SvgScene, path: &Path) -> Result<(), SvgError> {
    let text = svg_string(scene)?;
    std::fs::write(path, text).map_err(|source| SvgError::Io { path: path.display().to_string(), source })
}
