//! Two-panel SVG plots: a kappa(SQ) panel (trial markers plus bound lines,
//! y capped) and a failure-rate panel (percentages with optional confidence
//! band). Rendering goes through an intermediate geometry model so that a
//! plot regenerated from the CSV files can be compared for exact equality
//! with one rendered from the in-memory result.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundPoint;
use crate::csvio::{self, BoundRow, OutputPaths, TrialRow};
use crate::error::{Error, Result};
use crate::experiment::{
    failure_confidence_interval, failure_confidence_interval_wilson, CiMethod, ExperimentResult,
    SweepSpec,
};
use crate::sampling::SampleMethod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisScale {
    Linear,
    Log,
}

/// Optional per-series overrides, keyed by the sampler or bound name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesStyle {
    pub color: Option<String>,
    pub marker_size: Option<f64>,
    pub line_width: Option<f64>,
    pub dash: Option<String>,
}

/// Declarative plot styling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlotStyle {
    pub x_scale: AxisScale,
    pub kappa_y_scale: AxisScale,
    /// Upper clip for the kappa panel's y axis.
    pub y_cap: f64,
    pub width: f64,
    pub height: f64,
    pub ci_display: bool,
    pub ci_level: f64,
    pub ci_method: CiMethod,
    pub series: BTreeMap<String, SeriesStyle>,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            x_scale: AxisScale::Log,
            kappa_y_scale: AxisScale::Log,
            y_cap: 10.0,
            width: 640.0,
            height: 420.0,
            ci_display: true,
            ci_level: 0.95,
            ci_method: CiMethod::Wald,
            series: BTreeMap::new(),
        }
    }
}

impl PlotStyle {
    pub fn validate(&self) -> Result<()> {
        if !(self.y_cap > 1.0) {
            return Err(Error::Config(format!(
                "plot y_cap must exceed 1, got {}",
                self.y_cap
            )));
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(Error::Config("plot dimensions must be positive".into()));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::Config(format!(
                "plot ci_level {} outside (0, 1)",
                self.ci_level
            )));
        }
        Ok(())
    }

    fn series_style(&self, name: &str) -> SeriesStyle {
        self.series.get(name).cloned().unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerShape {
    Triangle,
    Circle,
    Square,
    Diamond,
    /// Drawn at the cap line when a value was clipped.
    OverflowArrow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Start,
    Middle,
    End,
}

/// Geometry primitives of a rendered panel, in pixel coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Line {
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        stroke: String,
        width: f64,
    },
    Polyline {
        points: Vec<(f64, f64)>,
        stroke: String,
        width: f64,
        dash: Option<String>,
    },
    Polygon {
        points: Vec<(f64, f64)>,
        fill: String,
        opacity: f64,
    },
    Marker {
        x: f64,
        y: f64,
        size: f64,
        shape: MarkerShape,
        color: String,
    },
    Text {
        x: f64,
        y: f64,
        content: String,
        size: f64,
        anchor: Anchor,
    },
}

/// A fully laid-out panel; `to_svg` is a pure serialization of the geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub width: f64,
    pub height: f64,
    pub shapes: Vec<Shape>,
}

const MARGIN_LEFT: f64 = 62.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 18.0;
const MARGIN_BOTTOM: f64 = 48.0;
const AXIS_COLOR: &str = "#333333";
const GRID_COLOR: &str = "#dddddd";
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

#[derive(Clone, Copy)]
struct AxisMap {
    scale: AxisScale,
    lo: f64,
    hi: f64,
    pix_lo: f64,
    pix_hi: f64,
}

impl AxisMap {
    fn map(&self, v: f64) -> f64 {
        let t = match self.scale {
            AxisScale::Linear => {
                if self.hi == self.lo {
                    0.5
                } else {
                    (v - self.lo) / (self.hi - self.lo)
                }
            }
            AxisScale::Log => {
                if self.hi == self.lo {
                    0.5
                } else {
                    (v.ln() - self.lo.ln()) / (self.hi.ln() - self.lo.ln())
                }
            }
        };
        self.pix_lo + t * (self.pix_hi - self.pix_lo)
    }
}

/// Tick positions for a linear axis: at most 8, on a 1-2-5 progression.
pub fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    assert!(hi >= lo);
    if hi == lo {
        return vec![lo];
    }
    let span = hi - lo;
    let mut step = 10f64.powf((span / 8.0).log10().floor());
    loop {
        for mult in [1.0, 2.0, 5.0] {
            let s = step * mult;
            let count = (hi / s).floor() - (lo / s).ceil() + 1.0;
            if count <= 8.0 {
                let mut ticks = Vec::new();
                let mut k = (lo / s).ceil();
                while k * s <= hi + 1e-9 * span {
                    // snap near-zero round-off to an exact zero label
                    let v = k * s;
                    ticks.push(if v.abs() < 1e-12 * span { 0.0 } else { v });
                    k += 1.0;
                }
                return ticks;
            }
        }
        step *= 10.0;
    }
}

/// Tick positions for a log axis: decades, thinned to at most 8; when fewer
/// than two decades fit, falls back to 1-2-5 mantissa ticks in range.
pub fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo);
    if hi == lo {
        return vec![lo];
    }
    let k_lo = lo.log10().ceil() as i32;
    let k_hi = hi.log10().floor() as i32;
    let decades: Vec<f64> = (k_lo..=k_hi).map(|k| 10f64.powi(k)).collect();
    if decades.len() >= 2 {
        if decades.len() <= 8 {
            return decades;
        }
        let stride = decades.len().div_ceil(8);
        return decades.into_iter().step_by(stride).collect();
    }
    // less than two decades of span: use 1-2-5 mantissas
    let mut ticks = Vec::new();
    for k in (k_lo - 1)..=(k_hi + 1) {
        for mult in [1.0, 2.0, 5.0] {
            let v = mult * 10f64.powi(k);
            if v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12) {
                ticks.push(v);
            }
        }
    }
    while ticks.len() > 8 {
        // drop every other tick until the budget holds
        ticks = ticks.iter().copied().step_by(2).collect();
    }
    ticks
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

struct Frame {
    x: AxisMap,
    y: AxisMap,
}

fn frame(style: &PlotStyle, x_scale: AxisScale, x: (f64, f64), y_scale: AxisScale, y: (f64, f64)) -> Frame {
    Frame {
        x: AxisMap {
            scale: x_scale,
            lo: x.0,
            hi: x.1,
            pix_lo: MARGIN_LEFT,
            pix_hi: style.width - MARGIN_RIGHT,
        },
        y: AxisMap {
            scale: y_scale,
            lo: y.0,
            hi: y.1,
            pix_lo: style.height - MARGIN_BOTTOM,
            pix_hi: MARGIN_TOP,
        },
    }
}

fn axes_shapes(
    style: &PlotStyle,
    fr: &Frame,
    x_ticks: &[f64],
    y_ticks: &[f64],
    x_label: &str,
    y_label: &str,
    title: &str,
) -> Vec<Shape> {
    let mut shapes = Vec::new();
    let (x0, x1) = (MARGIN_LEFT, style.width - MARGIN_RIGHT);
    let (y0, y1) = (style.height - MARGIN_BOTTOM, MARGIN_TOP);
    for &t in x_ticks {
        let px = fr.x.map(t);
        shapes.push(Shape::Line {
            x1: px,
            y1: y0,
            x2: px,
            y2: y1,
            stroke: GRID_COLOR.into(),
            width: 1.0,
        });
        shapes.push(Shape::Text {
            x: px,
            y: y0 + 16.0,
            content: fmt_tick(t),
            size: 11.0,
            anchor: Anchor::Middle,
        });
    }
    for &t in y_ticks {
        let py = fr.y.map(t);
        shapes.push(Shape::Line {
            x1: x0,
            y1: py,
            x2: x1,
            y2: py,
            stroke: GRID_COLOR.into(),
            width: 1.0,
        });
        shapes.push(Shape::Text {
            x: x0 - 6.0,
            y: py + 4.0,
            content: fmt_tick(t),
            size: 11.0,
            anchor: Anchor::End,
        });
    }
    // axis frame drawn after the grid so it stays on top
    shapes.push(Shape::Line {
        x1: x0,
        y1: y0,
        x2: x1,
        y2: y0,
        stroke: AXIS_COLOR.into(),
        width: 1.5,
    });
    shapes.push(Shape::Line {
        x1: x0,
        y1: y0,
        x2: x0,
        y2: y1,
        stroke: AXIS_COLOR.into(),
        width: 1.5,
    });
    shapes.push(Shape::Text {
        x: 0.5 * (x0 + x1),
        y: style.height - 12.0,
        content: x_label.into(),
        size: 13.0,
        anchor: Anchor::Middle,
    });
    shapes.push(Shape::Text {
        x: 14.0,
        y: 0.5 * (y0 + y1),
        content: y_label.into(),
        size: 13.0,
        anchor: Anchor::Middle,
    });
    shapes.push(Shape::Text {
        x: 0.5 * (x0 + x1),
        y: 13.0,
        content: title.into(),
        size: 13.0,
        anchor: Anchor::Middle,
    });
    shapes
}

fn x_extent(grid: &[f64]) -> (f64, f64) {
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn effective_x_scale(style: &PlotStyle, lo: f64) -> AxisScale {
    if style.x_scale == AxisScale::Log && lo <= 0.0 {
        AxisScale::Linear
    } else {
        style.x_scale
    }
}

fn x_ticks_for(scale: AxisScale, lo: f64, hi: f64) -> Vec<f64> {
    match scale {
        AxisScale::Linear => linear_ticks(lo, hi),
        AxisScale::Log => log_ticks(lo, hi),
    }
}

fn sampler_series(trials: &[TrialRow]) -> Vec<SampleMethod> {
    SampleMethod::ALL
        .into_iter()
        .filter(|s| trials.iter().any(|t| t.sampler == *s))
        .collect()
}

fn palette_color(style: &PlotStyle, name: &str, slot: usize) -> String {
    style
        .series_style(name)
        .color
        .unwrap_or_else(|| PALETTE[slot % PALETTE.len()].to_string())
}

/// Unique swept x values from trial and bound rows, in grid order.
fn grid_values(trials: &[TrialRow], bounds: &[BoundRow]) -> Vec<f64> {
    if !trials.is_empty() {
        let max_idx = trials.iter().map(|t| t.grid_index).max().unwrap();
        let mut grid = vec![f64::NAN; max_idx + 1];
        for t in trials {
            grid[t.grid_index] = t.grid_value;
        }
        return grid;
    }
    if let Some(first) = bounds.first() {
        return bounds
            .iter()
            .take_while(|r| r.bound == first.bound)
            .map(|r| r.grid_value)
            .collect();
    }
    Vec::new()
}

/// Lays out the kappa panel from CSV-level rows.
pub fn render_kappa_panel(
    trials: &[TrialRow],
    bounds: &[BoundRow],
    style: &PlotStyle,
    x_label: &str,
) -> Result<Panel> {
    style.validate()?;
    let grid = grid_values(trials, bounds);
    if grid.is_empty() {
        return Err(Error::InvalidArgument(
            "nothing to plot: no trials and no bound points".into(),
        ));
    }
    let (x_lo, x_hi) = x_extent(&grid);
    let x_scale = effective_x_scale(style, x_lo);
    let cap = style.y_cap;
    let fr = frame(style, x_scale, (x_lo, x_hi), style.kappa_y_scale, (1.0, cap));
    let y_ticks = match style.kappa_y_scale {
        AxisScale::Linear => linear_ticks(1.0, cap),
        AxisScale::Log => log_ticks(1.0, cap),
    };
    let mut shapes = axes_shapes(
        style,
        &fr,
        &x_ticks_for(x_scale, x_lo, x_hi),
        &y_ticks,
        x_label,
        "kappa(SQ)",
        "condition number of the sampled matrix",
    );

    // bound lines first, markers on top
    let mut slot = 4; // bounds draw from the latter half of the palette
    let mut seen = Vec::new();
    for row in bounds {
        if !seen.contains(&row.bound) {
            seen.push(row.bound);
        }
    }
    for bound in seen {
        let name = bound.name();
        let color = palette_color(style, name, slot);
        let s = style.series_style(name);
        let width = s.line_width.unwrap_or(1.8);
        let mut segment: Vec<(f64, f64)> = Vec::new();
        let flush = |segment: &mut Vec<(f64, f64)>, shapes: &mut Vec<Shape>| {
            if segment.len() >= 2 {
                shapes.push(Shape::Polyline {
                    points: std::mem::take(segment),
                    stroke: color.clone(),
                    width,
                    dash: s.dash.clone(),
                });
            } else {
                segment.clear();
            }
        };
        for row in bounds.iter().filter(|r| r.bound == bound) {
            match row.point {
                BoundPoint::Applicable { kappa_bound, .. } => {
                    segment.push((fr.x.map(row.grid_value), fr.y.map(kappa_bound.min(cap))));
                }
                // inapplicable point: break the line so the gap is visible
                BoundPoint::NotApplicable => flush(&mut segment, &mut shapes),
            }
        }
        flush(&mut segment, &mut shapes);
        slot += 1;
    }

    let marker_shapes = [
        MarkerShape::Triangle,
        MarkerShape::Circle,
        MarkerShape::Square,
        MarkerShape::Diamond,
    ];
    for (k, sampler) in sampler_series(trials).into_iter().enumerate() {
        let name = sampler.name();
        let color = palette_color(style, name, k);
        let size = style.series_style(name).marker_size.unwrap_or(4.0);
        for t in trials.iter().filter(|t| t.sampler == sampler) {
            let Some(kappa) = t.kappa else { continue };
            let clipped = kappa > cap;
            shapes.push(Shape::Marker {
                x: fr.x.map(t.grid_value),
                y: fr.y.map(kappa.min(cap)),
                size,
                shape: if clipped {
                    MarkerShape::OverflowArrow
                } else {
                    marker_shapes[k % marker_shapes.len()]
                },
                color: color.clone(),
            });
        }
    }

    Ok(Panel {
        width: style.width,
        height: style.height,
        shapes,
    })
}

/// Lays out the failure-rate panel (percent of rank-deficient trials) from
/// CSV-level rows; aggregates are recomputed from the rows so the plot stays
/// a pure view of the serialized data.
pub fn render_failure_panel(
    trials: &[TrialRow],
    style: &PlotStyle,
    x_label: &str,
) -> Result<Panel> {
    style.validate()?;
    let grid = grid_values(trials, &[]);
    if grid.is_empty() {
        return Err(Error::InvalidArgument("nothing to plot: no trials".into()));
    }
    let (x_lo, x_hi) = x_extent(&grid);
    let x_scale = effective_x_scale(style, x_lo);
    let samplers = sampler_series(trials);

    // per (grid point, sampler): failure percentage and its CI
    struct SeriesPoint {
        x: f64,
        rate: f64,
        lo: f64,
        hi: f64,
    }
    let mut series: Vec<(SampleMethod, Vec<SeriesPoint>)> = Vec::new();
    let mut y_max = 0.0f64;
    for &sampler in &samplers {
        let mut pts = Vec::with_capacity(grid.len());
        for (g, &x) in grid.iter().enumerate() {
            let subset: Vec<&TrialRow> = trials
                .iter()
                .filter(|t| t.grid_index == g && t.sampler == sampler)
                .collect();
            if subset.is_empty() {
                continue;
            }
            let runs = subset.len();
            let failures = subset.iter().filter(|t| t.failed).count();
            let (lo, hi) = match style.ci_method {
                CiMethod::Wald => failure_confidence_interval(failures, runs, style.ci_level)?,
                CiMethod::Wilson => {
                    failure_confidence_interval_wilson(failures, runs, style.ci_level)?
                }
            };
            let rate = 100.0 * failures as f64 / runs as f64;
            let (lo, hi) = (100.0 * lo, 100.0 * hi);
            y_max = y_max.max(if style.ci_display { hi } else { rate });
            pts.push(SeriesPoint { x, rate, lo, hi });
        }
        series.push((sampler, pts));
    }
    let y_hi = if y_max <= 0.0 {
        1.0
    } else {
        // round the top of the axis up to a 1-2-5 value
        let mag = 10f64.powf(y_max.log10().floor());
        [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|&v| v >= y_max)
            .unwrap_or(10.0 * mag)
    };
    let fr = frame(style, x_scale, (x_lo, x_hi), AxisScale::Linear, (0.0, y_hi));
    let mut shapes = axes_shapes(
        style,
        &fr,
        &x_ticks_for(x_scale, x_lo, x_hi),
        &linear_ticks(0.0, y_hi),
        x_label,
        "failure rate (%)",
        "fraction of rank-deficient samples",
    );

    for (k, (sampler, pts)) in series.iter().enumerate() {
        let name = sampler.name();
        let color = palette_color(style, name, k);
        let s = style.series_style(name);
        if style.ci_display && pts.len() >= 2 {
            let mut poly: Vec<(f64, f64)> =
                pts.iter().map(|p| (fr.x.map(p.x), fr.y.map(p.hi))).collect();
            poly.extend(pts.iter().rev().map(|p| (fr.x.map(p.x), fr.y.map(p.lo))));
            shapes.push(Shape::Polygon {
                points: poly,
                fill: color.clone(),
                opacity: 0.15,
            });
        }
        if pts.len() >= 2 {
            shapes.push(Shape::Polyline {
                points: pts.iter().map(|p| (fr.x.map(p.x), fr.y.map(p.rate))).collect(),
                stroke: color.clone(),
                width: s.line_width.unwrap_or(1.8),
                dash: s.dash.clone(),
            });
        }
        for p in pts {
            shapes.push(Shape::Marker {
                x: fr.x.map(p.x),
                y: fr.y.map(p.rate),
                size: s.marker_size.unwrap_or(3.5),
                shape: MarkerShape::Circle,
                color: color.clone(),
            });
        }
    }

    Ok(Panel {
        width: style.width,
        height: style.height,
        shapes,
    })
}

fn fmt_px(v: f64) -> String {
    // fixed 2-decimal pixel coordinates keep files small and comparisons stable
    format!("{v:.2}")
}

impl Panel {
    /// Serializes the panel as a self-contained SVG 1.1 document.
    pub fn to_svg(&self) -> String {
        let mut out = String::with_capacity(1024 + 96 * self.shapes.len());
        let _ = write!(
            out,
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
             width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" \
             font-family=\"sans-serif\">\n\
             <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n",
            w = fmt_px(self.width),
            h = fmt_px(self.height)
        );
        for shape in &self.shapes {
            match shape {
                Shape::Line {
                    x1,
                    y1,
                    x2,
                    y2,
                    stroke,
                    width,
                } => {
                    let _ = writeln!(
                        out,
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
                        fmt_px(*x1),
                        fmt_px(*y1),
                        fmt_px(*x2),
                        fmt_px(*y2)
                    );
                }
                Shape::Polyline {
                    points,
                    stroke,
                    width,
                    dash,
                } => {
                    let pts: Vec<String> = points
                        .iter()
                        .map(|(x, y)| format!("{},{}", fmt_px(*x), fmt_px(*y)))
                        .collect();
                    let dash_attr = dash
                        .as_ref()
                        .map(|d| format!(" stroke-dasharray=\"{d}\""))
                        .unwrap_or_default();
                    let _ = writeln!(
                        out,
                        "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"{dash_attr}/>",
                        pts.join(" ")
                    );
                }
                Shape::Polygon {
                    points,
                    fill,
                    opacity,
                } => {
                    let pts: Vec<String> = points
                        .iter()
                        .map(|(x, y)| format!("{},{}", fmt_px(*x), fmt_px(*y)))
                        .collect();
                    let _ = writeln!(
                        out,
                        "<polygon points=\"{}\" fill=\"{fill}\" fill-opacity=\"{opacity}\" stroke=\"none\"/>",
                        pts.join(" ")
                    );
                }
                Shape::Marker {
                    x,
                    y,
                    size,
                    shape,
                    color,
                } => {
                    let s = *size;
                    match shape {
                        MarkerShape::Triangle => {
                            let _ = writeln!(
                                out,
                                "<polygon points=\"{},{} {},{} {},{}\" fill=\"{color}\"/>",
                                fmt_px(*x),
                                fmt_px(y - s),
                                fmt_px(x - 0.866 * s),
                                fmt_px(y + 0.5 * s),
                                fmt_px(x + 0.866 * s),
                                fmt_px(y + 0.5 * s)
                            );
                        }
                        MarkerShape::Circle => {
                            let _ = writeln!(
                                out,
                                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\"/>",
                                fmt_px(*x),
                                fmt_px(*y),
                                fmt_px(s)
                            );
                        }
                        MarkerShape::Square => {
                            let _ = writeln!(
                                out,
                                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\"/>",
                                fmt_px(x - s),
                                fmt_px(y - s),
                                fmt_px(2.0 * s),
                                fmt_px(2.0 * s)
                            );
                        }
                        MarkerShape::Diamond => {
                            let _ = writeln!(
                                out,
                                "<polygon points=\"{},{} {},{} {},{} {},{}\" fill=\"{color}\"/>",
                                fmt_px(*x),
                                fmt_px(y - s),
                                fmt_px(x + s),
                                fmt_px(*y),
                                fmt_px(*x),
                                fmt_px(y + s),
                                fmt_px(x - s),
                                fmt_px(*y)
                            );
                        }
                        MarkerShape::OverflowArrow => {
                            // upward arrow sitting on the cap line
                            let _ = writeln!(
                                out,
                                "<path d=\"M {} {} l {} {} h {} l {} {} Z\" fill=\"{color}\"/>",
                                fmt_px(*x),
                                fmt_px(y - 1.4 * s),
                                fmt_px(-s),
                                fmt_px(1.4 * s),
                                fmt_px(2.0 * s),
                                fmt_px(-s),
                                fmt_px(-1.4 * s)
                            );
                        }
                    }
                }
                Shape::Text {
                    x,
                    y,
                    content,
                    size,
                    anchor,
                } => {
                    let anchor = match anchor {
                        Anchor::Start => "start",
                        Anchor::Middle => "middle",
                        Anchor::End => "end",
                    };
                    let _ = writeln!(
                        out,
                        "<text x=\"{}\" y=\"{}\" font-size=\"{size}\" fill=\"{AXIS_COLOR}\" text-anchor=\"{anchor}\">{}</text>",
                        fmt_px(*x),
                        fmt_px(*y),
                        escape_xml(content)
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Axis label for the swept quantity.
pub fn sweep_label(sweep: &SweepSpec) -> &'static str {
    match sweep {
        SweepSpec::SampleCount { .. } => "c (rows sampled)",
        SweepSpec::Coherence { .. } => "mu (coherence)",
    }
}

/// Renders both panels of an experiment and writes
/// `<stem>_kappa.svg` and `<stem>_failure.svg`.
pub fn render_plots(result: &ExperimentResult, style: &PlotStyle, stem: &Path) -> Result<Vec<std::path::PathBuf>> {
    let trials = csvio::trial_rows(result);
    let bounds = csvio::bound_rows(result);
    let label = sweep_label(&result.config.sweep);
    let paths = OutputPaths::from_stem(stem);
    let mut written = Vec::new();
    let kappa = render_kappa_panel(&trials, &bounds, style, label)?;
    write_svg(&kappa, &paths.kappa_svg)?;
    written.push(paths.kappa_svg);
    if !trials.is_empty() {
        let failure = render_failure_panel(&trials, style, label)?;
        write_svg(&failure, &paths.failure_svg)?;
        written.push(paths.failure_svg);
    }
    Ok(written)
}

fn write_svg(panel: &Panel, path: &Path) -> Result<()> {
    std::fs::write(path, panel.to_svg()).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
