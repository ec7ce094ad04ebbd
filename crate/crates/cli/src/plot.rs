//! Minimal line plots as standalone SVG.

use std::fmt::Write as _;
use std::io::{self, Write};

use thiserror::Error;

use crate::scenario::Output;
use crate::sweep::ResultRow;
use crate::table::value_of;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Tick positions covering `[lo, hi]` at a 1-2-5 spacing, with the number of
/// decimals needed to print them.
fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), decimals)
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Draws one polyline per column (split where values are missing) against
/// the sweep variable.
pub fn emit_svg<W: Write>(rows: &[ResultRow], x_label: &str, columns: &[Output], mut dest: W) -> Result<(), PlotError> {
    if columns.is_empty() {
        return Err(PlotError::InsufficientData("no columns to plot".into()));
    }
    let mut series = Vec::new();
    for &col in columns {
        if !col.is_numeric() {
            return Err(PlotError::InsufficientData(format!("`{col}` is not numeric")));
        }
        let points: Vec<Option<(f64, f64)>> = rows
            .iter()
            .map(|r| r.report().and_then(|rep| value_of(rep, col)).filter(|y| y.is_finite()).map(|y| (r.x, y)))
            .collect();
        if points.iter().flatten().count() < 2 {
            return Err(PlotError::InsufficientData(format!("`{col}` has fewer than two finite points")));
        }
        series.push((col, points));
    }

    let all = || series.iter().flat_map(|(_, p)| p.iter().flatten());
    let (x0, x1) = padded_range(all().map(|p| p.0));
    let (y0, y1) = padded_range(all().map(|p| p.1));
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g font-family="sans-serif" font-size="12" fill="black" stroke="none">"#
    );
    let (xt, xd) = ticks(x0, x1);
    for x in xt {
        let _ = writeln!(
            s,
            r##"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="#dddddd"/><text x="{0:.2}" y="{3:.2}" text-anchor="middle">{4:.5$}</text>"##,
            sx(x),
            TOP,
            TOP + ph,
            TOP + ph + 18.0,
            x,
            xd
        );
    }
    let (yt, yd) = ticks(y0, y1);
    for y in yt {
        let _ = writeln!(
            s,
            r##"<line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="#dddddd"/><text x="{3:.2}" y="{4:.2}" text-anchor="end">{5:.6$}</text>"##,
            LEFT,
            sy(y),
            LEFT + pw,
            LEFT - 6.0,
            sy(y) + 4.0,
            y,
            yd
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    for (i, (col, _)) in series.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let x = LEFT + pw + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 25.0,
            COLORS[i % COLORS.len()],
            x + 32.0,
            y + 4.0,
            escape(col.name())
        );
    }
    let _ = writeln!(s, "</g>");

    for (i, (col, points)) in series.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<g id="{}" fill="none" stroke="{}" stroke-width="1.5">"#,
            escape(col.name()),
            COLORS[i % COLORS.len()]
        );
        for segment in points.split(|p| p.is_none()) {
            if segment.len() < 2 {
                continue;
            }
            let coords: Vec<String> = segment
                .iter()
                .flatten()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(s, r#"<polyline points="{}"/>"#, coords.join(" "));
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    dest.write_all(s.as_bytes())?;
    Ok(())
}
