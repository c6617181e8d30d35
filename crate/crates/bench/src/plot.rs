//! Line charts of result rows, one SVG per figure id.
//!
//! The SVG is written by hand with fixed-precision coordinates so that the
//! same CSV always produces the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::Axis;
use crate::runner::{from_csv, ResultRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 230.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const COLORS: [&str; 6] = ["#c2185b", "#1565c0", "#2e7d32", "#ef6c00", "#6a1b9a", "#00838f"];
const DASHES: [&str; 5] = ["", "6,4", "2,3", "10,3,2,3", "1,5"];

#[derive(Debug, Default)]
pub struct PlotReport {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn algorithm_label(name: &str) -> String {
    match name {
        "ORACLE" => "OPT".to_owned(),
        other => format!("ALG-{other}"),
    }
}

fn axis_label(name: &str) -> String {
    Axis::from_name(name).map_or_else(|| name.to_owned(), |a| a.label().to_owned())
}

/// A round step of 1, 2 or 5 times a power of ten giving about `ticks` ticks.
fn nice_step(span: f64, ticks: usize) -> f64 {
    let raw = span / ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// SVG for all rows of one figure.
pub fn render_figure(figure: &str, rows: &[&ResultRow]) -> String {
    // (extra axes, algorithm) -> points sorted by x.
    let mut series: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        series
            .entry((r.extra_axes.clone(), r.algorithm.clone()))
            .or_default()
            .push((r.axis_value, r.mean));
    }
    for pts in series.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.axis_value).collect();
    let (mut x_lo, mut x_hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if x_lo == x_hi {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    let y_max = rows.iter().map(|r| r.mean).fold(0.0, f64::max);
    let y_step = nice_step(y_max.max(1.0), 6);
    let y_hi = (y_max / y_step).ceil().max(1.0) * y_step;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| TOP + plot_h - y / y_hi * plot_h;

    let axis_name = rows.first().map_or("", |r| r.axis_name.as_str());
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}: avg. number of served users</text>"#,
        LEFT + plot_w / 2.0,
        esc(figure)
    );

    // Grid and ticks.
    let mut y = 0.0;
    while y <= y_hi + 1e-9 {
        let yy = py(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.1}" y1="{yy:.1}" x2="{:.1}" y2="{yy:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            yy + 4.0,
            trim_num(y)
        );
        y += y_step;
    }
    let mut ticks: Vec<f64> = xs.clone();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for x in ticks {
        let xx = px(x);
        let _ = writeln!(
            svg,
            r##"<line x1="{xx:.1}" y1="{TOP:.1}" x2="{xx:.1}" y2="{:.1}" stroke="#eeeeee"/><text x="{xx:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 16.0,
            trim_num(x)
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT:.1}" y="{TOP:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 18.0,
        esc(&axis_label(axis_name))
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">Avg. number of served users</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    // Colors follow the algorithm, dashes the other axes.
    let algorithms: Vec<&String> = {
        let mut v: Vec<&String> = series.keys().map(|k| &k.1).collect();
        v.sort();
        v.dedup();
        v
    };
    let extras: Vec<&String> = {
        let mut v: Vec<&String> = series.keys().map(|k| &k.0).collect();
        v.sort();
        v.dedup();
        v
    };
    for (i, ((extra, alg), pts)) in series.iter().enumerate() {
        let color = COLORS[algorithms.iter().position(|a| *a == alg).unwrap_or(0) % COLORS.len()];
        let dash = DASHES[extras.iter().position(|e| *e == extra).unwrap_or(0) % DASHES.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
        let dash_attr = if dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash_attr}/>"#,
            path.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="{color}"/>"#, px(x), py(y));
        }
        let ly = TOP + 10.0 + i as f64 * 30.0;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="1.5"{dash_attr}/><text x="{:.1}" y="{:.1}">{}</text><text x="{:.1}" y="{:.1}" font-size="10">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            esc(&algorithm_label(alg)),
            lx + 30.0,
            ly + 16.0,
            esc(&extra.replace(';', " "))
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn trim_num(x: f64) -> String {
    let s = format!("{x:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

/// Writes `<out_dir>/<figure>.svg` for every figure in `rows`.
pub fn emit_plots(rows: &[ResultRow], out_dir: &Path) -> Result<PlotReport> {
    let mut report = PlotReport::default();
    if rows.is_empty() {
        report.warnings.push("no result rows; nothing to plot".into());
        return Ok(report);
    }
    let mut by_figure: BTreeMap<&str, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        by_figure.entry(r.figure.as_str()).or_default().push(r);
    }
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for (figure, rows) in by_figure {
        let path = out_dir.join(format!("{figure}.svg"));
        std::fs::write(&path, render_figure(figure, &rows)).with_context(|| format!("writing {}", path.display()))?;
        report.written.push(path);
    }
    Ok(report)
}

pub fn emit_plots_from_csv(text: &str, out_dir: &Path) -> Result<PlotReport> {
    emit_plots(&from_csv(text)?, out_dir)
}
