//! Static SVG line charts of the CSV outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Chosen from the CSV header.
    Auto,
    /// Mean of `value` against `width`, one series per schedule.
    Metrics,
    /// `value` against `x` for the first network in the file, one series per layer.
    Probes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str) -> CliResult<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| CliError::Validation("CSV is empty".into()))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(|s| s.trim().to_string()).collect()).collect();
        if rows.is_empty() {
            return Err(CliError::Validation("CSV has a header but no rows".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != header.len()) {
            return Err(CliError::Validation(format!(
                "CSV row {} has {} fields, header has {}",
                i + 2,
                rows[i].len(),
                header.len()
            )));
        }
        Ok(Table { header, rows })
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn need(&self, name: &str) -> CliResult<usize> {
        self.col(name).ok_or_else(|| CliError::Validation(format!("CSV has no '{name}' column")))
    }

    fn num(&self, row: usize, col: usize) -> CliResult<f64> {
        let cell = &self.rows[row][col];
        cell.parse()
            .map_err(|_| CliError::Validation(format!("CSV row {}: '{cell}' in column '{}' is not a number", row + 2, self.header[col])))
    }
}

fn push_point(series: &mut Vec<(String, Vec<(f64, f64)>)>, label: &str, p: (f64, f64)) {
    match series.iter_mut().find(|(l, _)| l == label) {
        Some((_, pts)) => pts.push(p),
        None => series.push((label.to_string(), vec![p])),
    }
}

/// Extracts the series a chart of `kind` would draw.
pub fn extract_series(csv: &str, kind: PlotKind) -> CliResult<Vec<Series>> {
    let t = Table::parse(csv)?;
    let kind = match kind {
        PlotKind::Auto if t.col("width").is_some() && (t.col("value").is_some() || t.col("mean").is_some()) && t.col("x").is_none() => {
            PlotKind::Metrics
        }
        PlotKind::Auto if t.col("layer").is_some() && t.col("x").is_some() => PlotKind::Probes,
        PlotKind::Auto => return Err(CliError::Validation(format!("unrecognised CSV header: {}", t.header.join(",")))),
        k => k,
    };
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    match kind {
        PlotKind::Metrics => {
            let (s, w) = (t.need("schedule")?, t.need("width")?);
            let v = t.col("mean").map_or_else(|| t.need("value"), Ok)?;
            // average over seeds
            let mut acc: Vec<(String, f64, f64, usize)> = Vec::new();
            for r in 0..t.rows.len() {
                let (label, x, y) = (t.rows[r][s].clone(), t.num(r, w)?, t.num(r, v)?);
                match acc.iter_mut().find(|(l, ax, _, _)| *l == label && *ax == x) {
                    Some(e) => {
                        e.2 += y;
                        e.3 += 1;
                    }
                    None => acc.push((label, x, y, 1)),
                }
            }
            for (label, x, sum, n) in acc {
                push_point(&mut series, &label, (x, sum / n as f64));
            }
        }
        PlotKind::Probes => {
            let (l, x, v) = (t.need("layer")?, t.need("x")?, t.need("value")?);
            let key_cols: Vec<usize> = ["schedule", "width", "seed"].iter().filter_map(|c| t.col(c)).collect();
            let key = |r: usize| key_cols.iter().map(|&c| t.rows[r][c].as_str()).collect::<Vec<_>>().join(",");
            let first = (0..t.rows.len())
                .find(|&r| t.rows[r][l] != "target")
                .ok_or_else(|| CliError::Validation("probe CSV has no probe rows".into()))?;
            let chosen = key(first);
            for r in 0..t.rows.len() {
                if key(r) == chosen && t.rows[r][l] != "target" {
                    let label = match t.rows[r][l].as_str() {
                        "output" => "output".to_string(),
                        n => format!("layer {n}"),
                    };
                    push_point(&mut series, &label, (t.num(r, x)?, t.num(r, v)?));
                }
            }
        }
        PlotKind::Auto => unreachable!(),
    }
    for (_, pts) in &mut series {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    Ok(series.into_iter().map(|(label, points)| Series { label, points }).collect())
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders series as an SVG line chart. The x axis is log2 when every x is
/// positive and the values span a factor of 8 or more.
pub fn render_svg(series: &[Series], title: &str) -> CliResult<String> {
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    if all.is_empty() {
        return Err(CliError::Validation("nothing to plot".into()));
    }
    if all.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(CliError::Numeric("non-finite value in plot data".into()));
    }
    let fold = |f: fn(&(f64, f64)) -> f64| {
        all.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (x0, x1) = fold(|p| p.0);
    let (y0, y1) = fold(|p| p.1);
    let log_x = x0 > 0.0 && x1 / x0 >= 8.0;
    let tx = |x: f64| if log_x { x.log2() } else { x };
    let (ax0, ax1) = (tx(x0), tx(x1));
    let (ax0, ax1) = if ax1 > ax0 { (ax0, ax1) } else { (ax0 - 0.5, ax1 + 0.5) };
    let pad = if y1 > y0 { 0.05 * (y1 - y0) } else { 0.5 };
    let (ay0, ay1) = (y0 - pad, y1 + pad);

    let (w, h, left, right, top, bottom) = (720.0, 440.0, 70.0, 170.0, 40.0, 50.0);
    let px = |x: f64| left + (tx(x) - ax0) / (ax1 - ax0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - ay0) / (ay1 - ay0) * (h - top - bottom);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#, (w - right + left) / 2.0, escape(title)).unwrap();
    let (bx0, bx1, by0, by1) = (left, w - right, top, h - bottom);
    writeln!(s, r#"<path d="M{bx0},{by0} L{bx0},{by1} L{bx1},{by1}" fill="none" stroke="black"/>"#).unwrap();
    let label = |v: f64| format!("{:.4}", v).trim_end_matches('0').trim_end_matches('.').to_string();
    for (v, y) in [(ay0, by1), (ay1, by0)] {
        writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#, bx0 - 6.0, y + 4.0, label(v)).unwrap();
    }
    for (v, x) in [(x0, px(x0)), (x1, px(x1))] {
        writeln!(s, r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#, by1 + 16.0, label(v)).unwrap();
    }
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" ")).unwrap();
        let ly = top + 16.0 + 18.0 * i as f64;
        writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, bx1 + 14.0, bx1 + 36.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#, bx1 + 42.0, ly + 4.0, escape(&ser.label)).unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// SVG chart of a metrics, summary or probe CSV.
pub fn emit_plot(csv: &str, kind: PlotKind, title: &str) -> CliResult<String> {
    render_svg(&extract_series(csv, kind)?, title)
}

pub fn emit_plot_to_file(input: &Path, output: &Path, kind: PlotKind) -> CliResult<()> {
    let csv = fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let title = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let svg = emit_plot(&csv, kind, &title)?;
    fs::write(output, svg).map_err(|e| CliError::io(output, e))
}
