use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::results::{summarize, CellSummary};
use super::{ExperimentRecord, Method};
use crate::error::{Error, Result};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn series_label(method: Method, k: u32) -> String {
    match method {
        Method::QuboSvm => format!("k={k}"),
        Method::Baseline => "baseline".to_string(),
    }
}

/// Mean accuracy against `log₂ C`, one line per `k` plus the baseline.
/// Cells without an accuracy for every fold leave a gap in their line.
pub fn render_svg(dataset: &str, cells: &[CellSummary]) -> Result<String> {
    if cells.is_empty() {
        return Err(Error::invalid(format!("no cells to plot for `{dataset}`")));
    }
    let mut series: BTreeMap<(Method, u32), Vec<&CellSummary>> = BTreeMap::new();
    for cell in cells.iter().filter(|c| c.dataset == dataset) {
        series.entry((cell.method, cell.k)).or_default().push(cell);
    }
    for s in series.values_mut() {
        s.sort_by(|a, b| a.c.total_cmp(&b.c));
    }
    let (lo, hi) = cells
        .iter()
        .map(|c| c.c.log2())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (lo, hi) = (lo.floor() - 0.5, hi.ceil() + 0.5);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |v: f64| LEFT + (v - lo) / (hi - lo) * pw;
    let sy = |a: f64| TOP + (1.0 - a) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}: cross-validated accuracy</text>"#,
        LEFT + pw / 2.0,
        escape(dataset)
    );

    let _ = writeln!(svg, r##"<g class="grid" stroke="#dddddd">"##);
    for t in 0..=10 {
        let a = f64::from(t) / 10.0;
        let _ = writeln!(svg, r#"<line x1="{LEFT}" y1="{0:.1}" x2="{1:.1}" y2="{0:.1}"/>"#, sy(a), LEFT + pw);
    }
    for e in (lo.ceil() as i64)..=(hi.floor() as i64) {
        let x = sx(e as f64);
        let _ = writeln!(svg, r#"<line x1="{x:.1}" y1="{TOP}" x2="{x:.1}" y2="{:.1}"/>"#, TOP + ph);
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="axes" stroke="black" fill="none">"#);
    let _ = writeln!(svg, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/>"#);
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g class="ticks">"#);
    for t in 0..=5 {
        let a = f64::from(t) / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{a:.1}</text>"#,
            LEFT - 6.0,
            sy(a) + 4.0
        );
    }
    for e in (lo.ceil() as i64)..=(hi.floor() as i64) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{e}</text>"#,
            sx(e as f64),
            TOP + ph + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">log2 C</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0:.1}" text-anchor="middle" transform="rotate(-90 18 {0:.1})">mean accuracy</text>"#,
        TOP + ph / 2.0
    );
    let _ = writeln!(svg, "</g>");

    for (idx, ((method, k), points)) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let label = series_label(*method, *k);
        let _ = writeln!(
            svg,
            r#"<g class="series" data-series="{label}" stroke="{color}" fill="{color}">"#
        );
        let mut segment: Vec<(f64, f64)> = Vec::new();
        let flush = |segment: &mut Vec<(f64, f64)>, svg: &mut String| {
            if segment.len() >= 2 {
                let pts: Vec<String> = segment.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline fill="none" stroke-width="2" points="{}"/>"#,
                    pts.join(" ")
                );
            }
            segment.clear();
        };
        for p in points {
            match p.mean_accuracy {
                Some(a) => segment.push((sx(p.c.log2()), sy(a))),
                None => flush(&mut segment, &mut svg),
            }
        }
        flush(&mut segment, &mut svg);
        for p in points {
            if let Some(a) = p.mean_accuracy {
                let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#, sx(p.c.log2()), sy(a));
            }
        }
        let _ = writeln!(svg, "</g>");

        let ly = TOP + 12.0 + idx as f64 * 20.0;
        let lx = LEFT + pw + 16.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><rect x="{lx:.1}" y="{:.1}" width="18" height="4" fill="{color}"/><text x="{:.1}" y="{:.1}">{label}</text></g>"#,
            ly - 2.0,
            lx + 24.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes one SVG per dataset. With a single dataset the file is `out`
/// itself; otherwise `out`'s stem gets a `-<dataset>` suffix.
pub fn emit_plot(records: &[ExperimentRecord], out: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::invalid("no records to plot"));
    }
    let cells = summarize(records);
    let mut datasets: Vec<&str> = cells.iter().map(|c| c.dataset.as_str()).collect();
    datasets.dedup();
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut written = Vec::new();
    for ds in &datasets {
        let path = if datasets.len() == 1 {
            out.to_path_buf()
        } else {
            let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
            out.with_file_name(format!("{stem}-{ds}.svg"))
        };
        let own: Vec<CellSummary> = cells.iter().filter(|c| c.dataset == *ds).cloned().collect();
        let svg = render_svg(ds, &own)?;
        std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
