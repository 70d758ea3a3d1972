//! Multi-test plots as SVG 1.1 text.
//!
//! X is the window distance, Y the relative switching propensity. One line
//! per (direction, mode): colour encodes the direction, solid strokes are
//! `precede` tests and dashed strokes `neighbor` tests. Tests that are not
//! significant at `alpha` get a black diamond. Undefined points are left out
//! and break their line.

use std::fmt::Write as _;

use crate::association::{Direction, Mode};
use crate::exact::DEFAULT_ALPHA;
use crate::grid::GridResult;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    /// Stroke colours for l1→l2, l2→l1 and both.
    pub colors: [String; 3],
    pub neighbor_dash: String,
    pub alpha: f64,
    pub log_y: bool,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            colors: [
                "#e8b100".to_string(),
                "#d62728".to_string(),
                "#2ca02c".to_string(),
            ],
            neighbor_dash: "7,5".to_string(),
            alpha: DEFAULT_ALPHA,
            log_y: false,
            width: 800.0,
            height: 460.0,
        }
    }
}

impl PlotStyle {
    pub fn color(&self, direction: Direction) -> &str {
        match direction {
            Direction::L1ToL2 => &self.colors[0],
            Direction::L2ToL1 => &self.colors[1],
            Direction::Both => &self.colors[2],
        }
    }
}

const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const BOTTOM_MARGIN: f64 = 55.0;
const LEGEND_WIDTH: f64 = 190.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Tick step from {1, 2, 5} × 10^k giving at most `max_ticks` intervals.
fn nice_step(span: f64, max_ticks: usize) -> f64 {
    let raw = span / max_ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

struct YAxis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl YAxis {
    fn value(&self, rsp: f64) -> Option<f64> {
        if self.log {
            (rsp > 0.0).then(|| rsp.log10())
        } else {
            Some(rsp)
        }
    }

    fn fit(values: &[f64], log: bool) -> YAxis {
        if log {
            let logs: Vec<f64> = values
                .iter()
                .filter(|v| **v > 0.0)
                .map(|v| v.log10())
                .collect();
            let lo = logs.iter().copied().fold(0.0f64, f64::min).floor();
            let hi = logs.iter().copied().fold(0.0f64, f64::max).ceil();
            let hi = if hi <= lo { lo + 1.0 } else { hi };
            YAxis { lo, hi, log }
        } else {
            let max = values.iter().copied().fold(1.0f64, f64::max);
            let step = nice_step(max, 8);
            let hi = (max / step).ceil() * step;
            let hi = if hi <= max { hi + step } else { hi };
            YAxis { lo: 0.0, hi, log }
        }
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let mut out = Vec::new();
            let mut e = self.lo;
            while e <= self.hi + 1e-9 {
                let v = 10f64.powf(e);
                let label = if e >= 0.0 {
                    format!("{v:.0}")
                } else {
                    format!("{v:.*}", (-e) as usize)
                };
                out.push((e, label));
                e += 1.0;
            }
            out
        } else {
            let step = nice_step(self.hi - self.lo, 8);
            let decimals = if step >= 1.0 {
                0
            } else {
                (-step.log10().floor()) as usize
            };
            let count = ((self.hi - self.lo) / step).round() as usize;
            (0..=count)
                .map(|i| {
                    let v = self.lo + i as f64 * step;
                    (v, format!("{v:.decimals$}"))
                })
                .collect()
        }
    }
}

/// Renders `grid` as a standalone SVG document. Output depends only on the
/// grid and the style.
pub fn render_multitest_svg(grid: &GridResult, style: &PlotStyle) -> String {
    let w = style.width;
    let h = style.height;
    let right = w - LEGEND_WIDTH;
    let bottom = h - BOTTOM_MARGIN;
    let plot_w = right - LEFT;
    let plot_h = bottom - TOP;

    let defined: Vec<f64> = grid
        .lines
        .iter()
        .flat_map(|l| l.rsp.iter().flatten().copied())
        .filter(|v| !style.log_y || *v > 0.0)
        .collect();
    let y_axis = YAxis::fit(&defined, style.log_y);
    let distances = &grid.spec.distances;
    let (x_lo, x_hi) = match (distances.first(), distances.last()) {
        (Some(&a), Some(&b)) if b > a => (a as f64, b as f64),
        (Some(&a), _) => (a as f64 - 1.0, a as f64 + 1.0),
        _ => (0.0, 1.0),
    };
    let sx = |d: f64| LEFT + (d - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |v: f64| bottom - (v - y_axis.lo) / (y_axis.hi - y_axis.lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="Helvetica, Arial, sans-serif" font-size="12">"#
    );
    let pair = &grid.spec.pair;
    let title = format!(
        "{} · {} · {} ({} tests)",
        grid.spec.corpus,
        grid.spec.shared_type,
        pair.name,
        grid.cells.len()
    );
    let _ = writeln!(svg, "<title>{}</title>", escape(&title));
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&title)
    );

    // axes
    let _ = writeln!(svg, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT:.2}" y1="{bottom:.2}" x2="{right:.2}" y2="{bottom:.2}"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{bottom:.2}"/>"#
    );
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g class="x-ticks" text-anchor="middle">"#);
    for &d in distances {
        let x = sx(d as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}">{d}</text>"#,
            bottom + 5.0,
            bottom + 19.0
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g class="y-ticks" text-anchor="end">"#);
    for (v, label) in y_axis.ticks() {
        let y = sy(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="black"/><line x1="{LEFT:.2}" y1="{y:.2}" x2="{right:.2}" y2="{y:.2}" stroke="#e5e5e5"/><text x="{:.2}" y="{:.2}">{label}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">distance (tokens)</text>"#,
        LEFT + plot_w / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">relative switching propensity{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        if style.log_y { " (log)" } else { "" }
    );

    if defined.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text class="no-data" x="{:.2}" y="{:.2}" text-anchor="middle" font-size="16">no data</text>"#,
            LEFT + plot_w / 2.0,
            TOP + plot_h / 2.0
        );
    } else {
        // reference line at RSP = 1
        if let Some(one) = y_axis.value(1.0) {
            if one >= y_axis.lo && one <= y_axis.hi {
                let y = sy(one);
                let _ = writeln!(
                    svg,
                    r##"<line class="unity" x1="{LEFT:.2}" y1="{y:.2}" x2="{right:.2}" y2="{y:.2}" stroke="#888888" stroke-dasharray="2,3"/>"##
                );
            }
        }
        for line in &grid.lines {
            let color = style.color(line.direction);
            let dash = match line.mode {
                Mode::Precede => String::new(),
                Mode::Neighbor => format!(r#" stroke-dasharray="{}""#, style.neighbor_dash),
            };
            let _ = writeln!(
                svg,
                r#"<g class="series" id="{}-{}">"#,
                line.direction, line.mode
            );
            let points: Vec<Option<(f64, f64)>> = line
                .distances
                .iter()
                .zip(&line.rsp)
                .map(|(&d, rsp)| {
                    rsp.and_then(|v| y_axis.value(v))
                        .map(|v| (sx(d as f64), sy(v)))
                })
                .collect();
            for segment in points.split(Option::is_none) {
                if segment.len() < 2 {
                    continue;
                }
                let coords: Vec<String> = segment
                    .iter()
                    .flatten()
                    .map(|(x, y)| format!("{x:.2},{y:.2}"))
                    .collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
                    coords.join(" ")
                );
            }
            for (i, point) in points.iter().enumerate() {
                let Some((x, y)) = point else { continue };
                let _ = writeln!(
                    svg,
                    r#"<circle class="point" cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#
                );
                if line.p_values[i] >= style.alpha {
                    let _ = writeln!(
                        svg,
                        r#"<path class="nonsig" d="M {x:.2} {:.2} L {:.2} {y:.2} L {x:.2} {:.2} L {:.2} {y:.2} Z" fill="black"/>"#,
                        y - 6.0,
                        x + 6.0,
                        y + 6.0,
                        x - 6.0
                    );
                }
            }
            let _ = writeln!(svg, "</g>");
        }
    }

    // legend
    let lx = right + 20.0;
    let _ = writeln!(svg, r#"<g class="legend">"#);
    let mut ly = TOP + 10.0;
    for line in &grid.lines {
        let color = style.color(line.direction);
        let dash = match line.mode {
            Mode::Precede => String::new(),
            Mode::Neighbor => format!(r#" stroke-dasharray="{}""#, style.neighbor_dash),
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{} {}</text>"#,
            lx + 30.0,
            lx + 38.0,
            ly + 4.0,
            escape(&line.direction.label(pair)),
            line.mode
        );
        ly += 20.0;
    }
    let _ = writeln!(
        svg,
        r#"<path d="M {:.2} {:.2} L {:.2} {ly:.2} L {:.2} {:.2} L {:.2} {ly:.2} Z" fill="black"/><text x="{:.2}" y="{:.2}">p &#8805; {}</text>"#,
        lx + 15.0,
        ly - 6.0,
        lx + 21.0,
        lx + 15.0,
        ly + 6.0,
        lx + 9.0,
        lx + 38.0,
        ly + 4.0,
        style.alpha
    );
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}
