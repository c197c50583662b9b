//! Trace CSV files and overlay SVG charts.

use std::fmt::Write as _;
use std::path::Path;

use hessdamp_core::algorithms::Trace;
use hessdamp_core::dynamics::TrajectorySample;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const CSV_HEADER: &str = "index,t,f_gap,grad_norm,energy";

/// One line of a trace file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub index: usize,
    pub t: f64,
    pub f_gap: f64,
    pub grad_norm: f64,
    pub energy: Option<f64>,
}

/// A labelled trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub rows: Vec<TraceRow>,
}

impl Series {
    /// Rows of a discrete run; `t` is the iteration counter.
    pub fn from_trace(label: impl Into<String>, trace: &Trace) -> Self {
        let rows = trace
            .iters
            .iter()
            .map(|it| TraceRow { index: it.k, t: it.k as f64, f_gap: it.f_gap, grad_norm: it.grad_norm, energy: it.energy })
            .collect();
        Self { label: label.into(), rows }
    }

    pub fn from_samples(label: impl Into<String>, samples: &[TrajectorySample]) -> Self {
        let rows = samples
            .iter()
            .enumerate()
            .map(|(i, s)| TraceRow { index: i, t: s.t, f_gap: s.f_gap, grad_norm: s.grad_norm, energy: s.energy })
            .collect();
        Self { label: label.into(), rows }
    }

    /// `(t, f_gap)` pairs.
    pub fn gap_series(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.t, r.f_gap)).collect()
    }
}

fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// CSV text with 17 significant digits and LF line endings.
pub fn csv_string(rows: &[TraceRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(HarnessError::Config("refusing to write an empty trace".into()));
    }
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let energy = r.energy.map(fmt_float).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", r.index, fmt_float(r.t), fmt_float(r.f_gap), fmt_float(r.grad_norm), energy)
            .expect("writing to a String");
    }
    Ok(out)
}

pub fn emit_csv(rows: &[TraceRow], path: &Path) -> Result<()> {
    let text = csv_string(rows)?;
    write_file(path, text.as_bytes())
}

pub fn parse_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.split('\n');
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(HarnessError::Parse(format!("expected header `{CSV_HEADER}`, found {other:?}"))),
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(HarnessError::Parse(format!("line {}: expected 5 fields, found {}", n + 2, fields.len())));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|e| HarnessError::Parse(format!("line {}, field {}: {e}", n + 2, i + 1)))
        };
        let index = fields[0].parse::<usize>().map_err(|e| HarnessError::Parse(format!("line {}: {e}", n + 2)))?;
        let energy = if fields[4].is_empty() { None } else { Some(num(4)?) };
        rows.push(TraceRow { index, t: num(1)?, f_gap: num(2)?, grad_norm: num(3)?, energy });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_csv(&text)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        }
    }
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axes {
    LogLog,
    /// Linear abscissa, logarithmic ordinate.
    SemiLog,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Overlay of `f_gap` against `t`. Points that cannot be placed on a
/// logarithmic axis split the polyline. Output depends only on the input.
pub fn svg_string(series: &[Series], title: &str, axes: Axes) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.rows.is_empty()) {
        return Err(HarnessError::Config("nothing to plot".into()));
    }
    let tx = |t: f64| match axes {
        Axes::LogLog if t > 0.0 => Some(t.log10()),
        Axes::LogLog => None,
        Axes::SemiLog => t.is_finite().then_some(t),
    };
    let ty = |v: f64| (v > 0.0 && v.is_finite()).then(|| v.log10());
    let pts: Vec<Vec<Option<(f64, f64)>>> = series
        .iter()
        .map(|s| s.rows.iter().map(|r| tx(r.t).zip(ty(r.f_gap))).collect())
        .collect();
    let all: Vec<(f64, f64)> = pts.iter().flatten().flatten().copied().collect();
    if all.is_empty() {
        return Err(HarnessError::Config("no plottable points".into()));
    }
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    y0 = y0.floor();
    y1 = y1.ceil().max(y0 + 1.0);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let w = &mut out;
    writeln!(w, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#).unwrap();
    writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(w, r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title)).unwrap();
    writeln!(w, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#).unwrap();
    // Ordinate: one tick per decade, thinned to at most ~10 labels.
    let decades = (y1 - y0) as i64;
    let ystep = (decades / 10 + 1).max(1);
    let mut d = y0 as i64;
    while d <= y1 as i64 {
        let y = sy(d as f64);
        writeln!(w, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##, LEFT + pw).unwrap();
        writeln!(w, r#"<text x="{:.1}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">1e{d}</text>"#, LEFT - 6.0, y + 4.0).unwrap();
        d += ystep;
    }
    // Abscissa: decades on a log axis, five even ticks otherwise.
    let xticks: Vec<(f64, String)> = match axes {
        Axes::LogLog => (x0.ceil() as i64..=x1.floor() as i64).map(|d| (d as f64, format!("1e{d}"))).collect(),
        Axes::SemiLog => (0..=4).map(|i| {
            let x = x0 + (x1 - x0) * i as f64 / 4.0;
            (x, format!("{x:.4}").trim_end_matches('0').trim_end_matches('.').to_string())
        }).collect(),
    };
    for (x, label) in xticks {
        let px = sx(x);
        writeln!(w, r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#dddddd"/>"##, TOP + ph).unwrap();
        writeln!(w, r#"<text x="{px:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#, TOP + ph + 16.0).unwrap();
    }
    let xlabel = if axes == Axes::LogLog { "t (log scale)" } else { "t" };
    writeln!(w, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{xlabel}</text>"#, LEFT + pw / 2.0, HEIGHT - 10.0).unwrap();
    writeln!(w, r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">f_gap</text>"#, TOP + ph / 2.0, TOP + ph / 2.0).unwrap();
    for (i, (s, p)) in series.iter().zip(&pts).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for run in p.split(|q| q.is_none()).filter(|r| !r.is_empty()) {
            let coords: Vec<String> = run.iter().flatten().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            writeln!(w, r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, coords.join(" ")).unwrap();
        }
        let ly = TOP + 16.0 + 18.0 * i as f64;
        let lx = LEFT + pw - 170.0;
        writeln!(w, r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, lx + 24.0).unwrap();
        writeln!(w, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#, lx + 30.0, ly + 4.0, escape(&s.label)).unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_svg(series: &[Series], title: &str, axes: Axes, path: &Path) -> Result<()> {
    let text = svg_string(series, title, axes)?;
    write_file(path, text.as_bytes())
}
