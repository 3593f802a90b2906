//! Minimal SVG figures: trajectories over a shaded seabed, and line charts.

use std::fmt::Write;

use crate::seabed::{Locus, Seabed};
use crate::types::ComplexNumber;

type C = ComplexNumber;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 40.0;
const SHADE_CELLS: usize = 120;

/// Axis-aligned plot window in plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Bounds {
    /// Smallest window containing `points`, padded by 5% on each side.
    pub fn around<'a>(points: impl IntoIterator<Item = &'a C>) -> Option<Self> {
        let mut b: Option<Bounds> = None;
        for z in points {
            if !(z.re.is_finite() && z.im.is_finite()) {
                continue;
            }
            let nb = b.get_or_insert(Bounds {
                xmin: z.re,
                xmax: z.re,
                ymin: z.im,
                ymax: z.im,
            });
            nb.xmin = nb.xmin.min(z.re);
            nb.xmax = nb.xmax.max(z.re);
            nb.ymin = nb.ymin.min(z.im);
            nb.ymax = nb.ymax.max(z.im);
        }
        b.map(|b| {
            let pad = 0.05 * (b.xmax - b.xmin).max(b.ymax - b.ymin).max(1e-3);
            Bounds {
                xmin: b.xmin - pad,
                xmax: b.xmax + pad,
                ymin: b.ymin - pad,
                ymax: b.ymax + pad,
            }
        })
    }

    fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    fn height(&self) -> f64 {
        self.ymax - self.ymin
    }
}

/// A polyline with its stroke.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub points: Vec<C>,
    pub color: String,
    pub width: f64,
    pub dashed: bool,
}

impl Curve {
    pub fn new(points: Vec<C>, color: &str) -> Self {
        Self {
            points,
            color: color.into(),
            width: 1.0,
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

/// Stroke color of a pole: blue for positive circulation, red for negative,
/// green for sources and sinks.
pub fn pole_color(mu: C) -> &'static str {
    if mu.im > 0.0 {
        "#1f4fd1"
    } else if mu.im < 0.0 {
        "#d1281f"
    } else {
        "#2a8c3a"
    }
}

struct Frame {
    b: Bounds,
    scale_x: f64,
    scale_y: f64,
    height: f64,
}

impl Frame {
    fn equal(b: Bounds) -> Self {
        let scale = (WIDTH - 2.0 * MARGIN) / b.width();
        Frame {
            b,
            scale_x: scale,
            scale_y: scale,
            height: b.height() * scale + 2.0 * MARGIN,
        }
    }

    fn px(&self, z: C) -> (f64, f64) {
        (
            MARGIN + (z.re - self.b.xmin) * self.scale_x,
            self.height - MARGIN - (z.im - self.b.ymin) * self.scale_y,
        )
    }
}

fn header(out: &mut String, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.1}" viewBox="0 0 {WIDTH} {height:.1}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="20">{}</text>"#, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn polyline(out: &mut String, frame: &Frame, curve: &Curve) {
    if curve.points.len() < 2 {
        return;
    }
    let mut pts = String::new();
    for z in &curve.points {
        let (x, y) = frame.px(*z);
        let _ = write!(pts, "{x:.2},{y:.2} ");
    }
    let dash = if curve.dashed {
        r#" stroke-dasharray="6 4""#
    } else {
        ""
    };
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{}" stroke-width="{}"{dash} points="{}"/>"#,
        curve.color,
        curve.width,
        pts.trim_end()
    );
}

fn shade_color(s: f64, max: f64) -> String {
    let level = if max > 0.0 {
        (s.abs() / max).min(1.0)
    } else {
        0.0
    };
    let q = (level * 8.0).round() / 8.0;
    let light = (245.0 - 75.0 * q) as u8;
    if s < 0.0 {
        format!("rgb(250,{light},{light})")
    } else {
        format!("rgb({light},{light},{})", 250u8.max(light))
    }
}

fn shade(out: &mut String, frame: &Frame, seabed: &Seabed) {
    let b = frame.b;
    let nx = SHADE_CELLS;
    let dx = b.width() / nx as f64;
    let ny = ((b.height() / dx).ceil() as usize).max(1);
    let dy = b.height() / ny as f64;
    let value = |i: usize, j: usize| {
        seabed.eval(C::new(
            b.xmin + (i as f64 + 0.5) * dx,
            b.ymin + (j as f64 + 0.5) * dy,
        ))
    };
    let mut max = 0.0f64;
    for j in 0..ny {
        for i in 0..nx {
            max = max.max(value(i, j).abs());
        }
    }
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for j in 0..ny {
        let mut i = 0;
        while i < nx {
            let color = shade_color(value(i, j), max);
            let mut k = i + 1;
            while k < nx && shade_color(value(k, j), max) == color {
                k += 1;
            }
            let (x0, y1) = frame.px(C::new(b.xmin + i as f64 * dx, b.ymin + j as f64 * dy));
            let (x1, y0) = frame.px(C::new(b.xmin + k as f64 * dx, b.ymin + (j + 1) as f64 * dy));
            let _ = writeln!(
                out,
                r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
                x1 - x0 + 0.5,
                y1 - y0 + 0.5
            );
            i = k;
        }
    }
    let _ = writeln!(out, "</g>");
}

fn arc_points(center: C, radius: f64, from: f64, to: f64) -> Vec<C> {
    (0..=180)
        .map(|k| center + C::from_polar(radius, from + (to - from) * k as f64 / 180.0))
        .collect()
}

fn locus_curves(locus: Locus, b: Bounds) -> Vec<Vec<C>> {
    match locus {
        Locus::Horizontal(y) => vec![vec![C::new(b.xmin, y), C::new(b.xmax, y)]],
        Locus::Vertical(x) => vec![vec![C::new(x, b.ymin), C::new(x, b.ymax)]],
        Locus::Circle { center, radius } => {
            vec![arc_points(center, radius, 0.0, 2.0 * std::f64::consts::PI)]
        }
        Locus::UpperArc { center, radius } => vec![
            vec![C::new(b.xmin, center.im), center - radius],
            arc_points(center, radius, std::f64::consts::PI, 0.0),
            vec![center + radius, C::new(b.xmax, center.im)],
        ],
    }
}

/// Trajectories over the seabed with equal horizontal and vertical scales.
pub fn trajectory_svg(
    title: &str,
    seabed: Option<&Seabed>,
    curves: &[Curve],
    view: Option<Bounds>,
) -> String {
    let bounds = view
        .or_else(|| Bounds::around(curves.iter().flat_map(|c| c.points.iter())))
        .unwrap_or(Bounds {
            xmin: -1.0,
            xmax: 1.0,
            ymin: -1.0,
            ymax: 1.0,
        });
    let frame = Frame::equal(bounds);
    let mut out = String::new();
    header(&mut out, frame.height, title);
    let (cx0, cy0) = frame.px(C::new(bounds.xmin, bounds.ymax));
    let (cx1, cy1) = frame.px(C::new(bounds.xmax, bounds.ymin));
    let _ = writeln!(
        out,
        r#"<clipPath id="plot"><rect x="{cx0:.2}" y="{cy0:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#,
        cx1 - cx0,
        cy1 - cy0
    );
    let _ = writeln!(out, r#"<g clip-path="url(#plot)">"#);
    if let Some(seabed) = seabed {
        shade(&mut out, &frame, seabed);
        for locus in seabed.loci() {
            for pts in locus_curves(locus, bounds) {
                polyline(
                    &mut out,
                    &frame,
                    &Curve {
                        points: pts,
                        color: "#666666".into(),
                        width: 1.5,
                        dashed: false,
                    },
                );
            }
        }
    }
    for c in curves {
        polyline(&mut out, &frame, c);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r##"<rect x="{cx0:.2}" y="{cy0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333333"/>"##,
        cx1 - cx0,
        cy1 - cy0
    );
    let _ = writeln!(
        out,
        r#"<text x="{cx0:.2}" y="{:.2}">x ∈ [{:.3}, {:.3}], y ∈ [{:.3}, {:.3}]</text>"#,
        cy1 + 16.0,
        bounds.xmin,
        bounds.xmax,
        bounds.ymin,
        bounds.ymax
    );
    out.push_str("</svg>\n");
    out
}

/// One labelled series of a line chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: String,
}

/// Line chart with independent axis scales and tick labels at the extremes.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let all: Vec<C> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(x, y)| C::new(x, y)))
        .collect();
    let b = Bounds::around(&all).unwrap_or(Bounds {
        xmin: 0.0,
        xmax: 1.0,
        ymin: 0.0,
        ymax: 1.0,
    });
    let height = 500.0;
    let frame = Frame {
        b,
        scale_x: (WIDTH - 3.0 * MARGIN) / b.width(),
        scale_y: (height - 2.5 * MARGIN) / b.height(),
        height,
    };
    let mut out = String::new();
    header(&mut out, height, title);
    let shifted = |z: C| {
        let (x, y) = frame.px(z);
        (x + MARGIN, y - 0.5 * MARGIN)
    };
    let (x0, y0) = shifted(C::new(b.xmin, b.ymin));
    let (x1, y1) = shifted(C::new(b.xmax, b.ymax));
    let _ = writeln!(
        out,
        r##"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333333"/>"##,
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(
        out,
        r#"<text x="{x0:.2}" y="{:.2}">{:.3}</text>"#,
        y0 + 14.0,
        b.xmin
    );
    let _ = writeln!(
        out,
        r#"<text x="{x1:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#,
        y0 + 14.0,
        b.xmax
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        y0 + 28.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{y0:.2}" text-anchor="end">{:.3}</text>"#,
        x0 - 4.0,
        b.ymin
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#,
        x0 - 4.0,
        y1 + 10.0,
        b.ymax
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate({:.2},{:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        x0 - 48.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
    for (k, s) in series.iter().enumerate() {
        let mut pts = String::new();
        for &(x, y) in &s.points {
            let (px, py) = shifted(C::new(x, y));
            let _ = write!(pts, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            s.color,
            pts.trim_end()
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" fill="{}">{}</text>"#,
            x0 + 8.0,
            y1 + 16.0 * (k + 1) as f64,
            s.color,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
