use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::Projection2D;

pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;
const LEGEND_WIDTH: f64 = 140.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Standalone SVG with one circle per point. Labels are colored in sorted
/// order and listed in a legend; without labels every point uses the first
/// palette color and no legend is drawn.
pub fn render_scatter(p: &Projection2D, title: &str) -> String {
    let colors: BTreeMap<&str, &str> = match &p.labels {
        Some(labels) => {
            let mut uniq: Vec<&str> = labels.iter().map(String::as_str).collect();
            uniq.sort_unstable();
            uniq.dedup();
            uniq.into_iter()
                .enumerate()
                .map(|(i, l)| (l, PALETTE[i % PALETTE.len()]))
                .collect()
        }
        None => BTreeMap::new(),
    };

    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for r in p.points.rows() {
        x0 = x0.min(r[0]);
        x1 = x1.max(r[0]);
        y0 = y0.min(r[1]);
        y1 = y1.max(r[1]);
    }
    let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let plot_w = WIDTH - 2.0 * MARGIN - LEGEND_WIDTH;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / span(x0, x1) * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / span(y0, y1) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#cccccc"/>"##
    );
    let _ = writeln!(out, r#"<g class="markers">"#);
    for (i, r) in p.points.rows().into_iter().enumerate() {
        let color = match &p.labels {
            Some(l) => colors[l[i].as_str()],
            None => PALETTE[0],
        };
        let _ = writeln!(
            out,
            r#"<circle class="marker" cx="{:.3}" cy="{:.3}" r="3" fill="{color}" fill-opacity="0.8"><title>{}</title></circle>"#,
            sx(r[0]),
            sy(r[1]),
            escape(&p.ids[i])
        );
    }
    let _ = writeln!(out, "</g>");
    if !colors.is_empty() {
        let lx = WIDTH - LEGEND_WIDTH - MARGIN / 2.0;
        let _ = writeln!(out, r#"<g class="legend">"#);
        for (k, (label, color)) in colors.iter().enumerate() {
            let ly = MARGIN + 10.0 + 20.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<g class="legend-entry"><circle cx="{:.1}" cy="{ly:.1}" r="5" fill="{color}"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text></g>"#,
                lx + 10.0,
                lx + 22.0,
                ly + 4.0,
                escape(label)
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}
