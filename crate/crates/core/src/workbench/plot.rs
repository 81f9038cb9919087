use std::fmt::Write as _;
use std::path::Path;

use super::{JsdRow, MiRow, Report, WorkbenchError};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn plot_w() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_h() -> f64 {
    HEIGHT - TOP - BOTTOM
}

fn y_px(v: f64, y_max: f64) -> f64 {
    TOP + plot_h() * (1.0 - v / y_max)
}

/// First-appearance order.
fn distinct<'a>(keys: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for k in keys {
        if !out.contains(&k) {
            out.push(k);
        }
    }
    out
}

fn frame(svg: &mut String, title: &str, x_label: &str, y_label: &str, y_max: f64) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w() / 2.0,
        escape(title)
    );
    let (x0, y0, x1) = (LEFT, TOP + plot_h(), LEFT + plot_w());
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.2}" y1="{TOP:.2}" x2="{x0:.2}" y2="{y0:.2}" stroke="black"/>"#
    );
    for i in 0..=4 {
        let v = y_max * f64::from(i) / 4.0;
        let y = y_px(v, y_max);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#,
            x0 - 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w() / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + plot_h() / 2.0,
        TOP + plot_h() / 2.0,
        escape(y_label)
    );
}

fn no_data(svg: &mut String) {
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="gray" font-size="16">no data</text>"#,
        LEFT + plot_w() / 2.0,
        TOP + plot_h() / 2.0
    );
}

fn legend(svg: &mut String, series: &[&str]) {
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * i as f64;
        let x = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.2}" y="{:.2}" width="12" height="12" fill="{}"/>"#,
            y - 9.0,
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, x + 18.0, escape(s));
    }
}

fn mi_chart(rows: &[MiRow]) -> String {
    let mut svg = String::new();
    let top = rows
        .iter()
        .map(|r| r.mi_bits + r.seed_std.unwrap_or(0.0))
        .fold(0.0f64, f64::max);
    let y_max = if top > 0.0 { top * 1.1 } else { 1.0 };
    frame(
        &mut svg,
        "Mutual information with the graph label",
        "dataset",
        "MI (bits)",
        y_max,
    );
    if rows.is_empty() {
        no_data(&mut svg);
        svg.push_str("</svg>\n");
        return svg;
    }
    let labels: Vec<String> = rows
        .iter()
        .map(|r| format!("{}/{}", r.target_kind, r.strategy))
        .collect();
    let groups = distinct(rows.iter().map(|r| r.dataset.as_str()));
    let series = distinct(labels.iter().map(String::as_str));
    let group_w = plot_w() / groups.len() as f64;
    let bar_w = group_w * 0.8 / series.len() as f64;
    for (gi, g) in groups.iter().enumerate() {
        let gx = LEFT + group_w * gi as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            gx + group_w / 2.0,
            TOP + plot_h() + 16.0,
            escape(g)
        );
        for (row, label) in rows.iter().zip(&labels).filter(|(r, _)| r.dataset == *g) {
            let si = series.iter().position(|s| s == label).unwrap();
            let x = gx + group_w * 0.1 + bar_w * si as f64;
            let y = y_px(row.mi_bits, y_max);
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                bar_w * 0.9,
                TOP + plot_h() - y,
                PALETTE[si % PALETTE.len()]
            );
            if let Some(std) = row.seed_std {
                let cx = x + bar_w * 0.45;
                let _ = writeln!(
                    svg,
                    r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
                    y_px((row.mi_bits - std).max(0.0), y_max),
                    y_px(row.mi_bits + std, y_max)
                );
            }
        }
    }
    legend(&mut svg, &series);
    svg.push_str("</svg>\n");
    svg
}

fn jsd_chart(rows: &[JsdRow]) -> String {
    let mut svg = String::new();
    frame(
        &mut svg,
        "JSD of rare-label conditionals",
        "tau (log scale)",
        "JSD (bits)",
        1.0,
    );
    let defined: Vec<&JsdRow> = rows.iter().filter(|r| r.tau > 0.0).collect();
    if defined.is_empty() {
        no_data(&mut svg);
        svg.push_str("</svg>\n");
        return svg;
    }
    let logs: Vec<f64> = defined.iter().map(|r| r.tau.log10()).collect();
    let (mut lo, mut hi) = logs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let x_px = |tau: f64| LEFT + plot_w() * (tau.log10() - lo) / (hi - lo);
    let mut ticks: Vec<f64> = defined.iter().map(|r| r.tau).collect();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for t in ticks {
        let x = x_px(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            TOP + plot_h(),
            TOP + plot_h() + 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            TOP + plot_h() + 16.0
        );
    }
    let labels: Vec<String> = defined
        .iter()
        .map(|r| format!("{}/{}", r.dataset, r.target_kind))
        .collect();
    let series = distinct(labels.iter().map(String::as_str));
    for (si, s) in series.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = defined
            .iter()
            .zip(&labels)
            .filter(|(_, l)| l == s)
            .filter_map(|(r, _)| r.jsd_bits.map(|j| (r.tau, j)))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let color = PALETTE[si % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(t, j)| format!("{:.2},{:.2}", x_px(t), y_px(j, 1.0)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        for &(t, j) in &pts {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                x_px(t),
                y_px(j, 1.0)
            );
        }
    }
    legend(&mut svg, &series);
    svg.push_str("</svg>\n");
    svg
}

/// Grouped bars for MI reports, one line per series against log tau for JSD reports.
pub fn render_svg(report: &Report) -> String {
    match report {
        Report::Mi(rows) => mi_chart(rows),
        Report::Jsd(rows) => jsd_chart(rows),
    }
}

pub fn write_svg(report: &Report, path: impl AsRef<Path>) -> Result<(), WorkbenchError> {
    let path = path.as_ref();
    std::fs::write(path, render_svg(report)).map_err(|e| WorkbenchError::io(path, e))
}
