//! Minimal standalone SVG line and scatter plots.

use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 5;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("plot has no series")]
    NoSeries,
    #[error("series {0:?} has a non-finite point")]
    NonFinite(String),
    #[error("series {0:?} is empty")]
    EmptySeries(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Scatter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    /// Half-height of a vertical error bar.
    pub err: Option<f64>,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y, err: None }
    }

    pub fn with_err(x: f64, y: f64, err: f64) -> Self {
        Self {
            x,
            y,
            err: Some(err),
        }
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.err.is_none_or(f64::is_finite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<Point>,
    pub style: Style,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<Point>, style: Style) -> Self {
        Self {
            name: name.into(),
            points,
            style,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi - lo <= 1e-12 * lo.abs().max(1.0) {
            return Self {
                lo: lo - 0.5,
                hi: hi + 0.5,
            };
        }
        let pad = 0.05 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn map(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }

    fn ticks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..TICKS).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

impl PlotSpec {
    pub fn validate(&self) -> Result<(), PlotError> {
        if self.series.is_empty() {
            return Err(PlotError::NoSeries);
        }
        for s in &self.series {
            if s.points.is_empty() {
                return Err(PlotError::EmptySeries(s.name.clone()));
            }
            if !s.points.iter().all(Point::is_finite) {
                return Err(PlotError::NonFinite(s.name.clone()));
            }
        }
        Ok(())
    }

    /// The full SVG document: inline axes, one `<g class="series">` per
    /// series and a legend.
    pub fn render(&self) -> Result<String, PlotError> {
        self.validate()?;
        let points = || self.series.iter().flat_map(|s| s.points.iter());
        let xr = Range::of(points().map(|p| p.x));
        let yr = Range::of(points().flat_map(|p| {
            let e = p.err.unwrap_or(0.0);
            [p.y - e, p.y + e]
        }));
        let (x0, x1) = (LEFT, WIDTH - RIGHT);
        let (y0, y1) = (HEIGHT - BOTTOM, TOP);
        let px = |x: f64| xr.map(x, x0, x1);
        let py = |y: f64| yr.map(y, y0, y1);

        let mut svg = String::new();
        // Writing to a String cannot fail.
        let _ = writeln!(
            svg,
            r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.1}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
            (x0 + x1) / 2.0,
            escape(&self.title)
        );

        let _ = writeln!(svg, r#"<g class="axes" stroke="black" fill="none">"#);
        let _ = writeln!(
            svg,
            r#"<rect x="{x0:.1}" y="{y1:.1}" width="{:.1}" height="{:.1}"/>"#,
            x1 - x0,
            y0 - y1
        );
        for t in xr.ticks() {
            let x = px(t);
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}"/>"#,
                y0 + 6.0
            );
        }
        for t in yr.ticks() {
            let y = py(t);
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}"/>"#,
                x0 - 6.0
            );
        }
        let _ = writeln!(svg, "</g>");

        let _ = writeln!(svg, r#"<g class="tick-labels" fill="black">"#);
        for t in xr.ticks() {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                px(t),
                y0 + 22.0,
                tick_label(t)
            );
        }
        for t in yr.ticks() {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 10.0,
                py(t) + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 20.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="25" y="{:.1}" text-anchor="middle" transform="rotate(-90 25 {:.1})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        );
        let _ = writeln!(svg, "</g>");

        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let name = escape(&s.name);
            match s.style {
                Style::Line => {
                    let mut d = String::new();
                    for (j, p) in s.points.iter().enumerate() {
                        let _ = write!(
                            d,
                            "{}{:.2},{:.2} ",
                            if j == 0 { 'M' } else { 'L' },
                            px(p.x),
                            py(p.y)
                        );
                    }
                    let _ = writeln!(
                        svg,
                        r#"<g class="series" data-name="{name}"><path d="{}" fill="none" stroke="{color}" stroke-width="2"/></g>"#,
                        d.trim_end()
                    );
                }
                Style::Scatter => {
                    let _ = writeln!(
                        svg,
                        r#"<g class="series" data-name="{name}" fill="{color}" stroke="{color}">"#
                    );
                    for p in &s.points {
                        let (x, y) = (px(p.x), py(p.y));
                        if let Some(e) = p.err {
                            let _ = writeln!(
                                svg,
                                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"#,
                                py(p.y - e),
                                py(p.y + e)
                            );
                        }
                        let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5"/>"#);
                    }
                    let _ = writeln!(svg, "</g>");
                }
            }
        }

        let _ = writeln!(svg, r#"<g class="legend">"#);
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let y = TOP + 10.0 + 20.0 * i as f64;
            let lx = WIDTH - RIGHT + 15.0;
            match s.style {
                Style::Line => {
                    let _ = writeln!(
                        svg,
                        r#"<line x1="{lx:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"/>"#,
                        lx + 20.0
                    );
                }
                Style::Scatter => {
                    let _ = writeln!(
                        svg,
                        r#"<circle cx="{:.1}" cy="{y:.1}" r="3.5" fill="{color}"/>"#,
                        lx + 10.0
                    );
                }
            }
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
                lx + 26.0,
                y + 4.0,
                escape(&s.name)
            );
        }
        let _ = writeln!(svg, "</g>\n</svg>");
        Ok(svg)
    }
}
