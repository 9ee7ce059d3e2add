//! SVG heatmaps of similarity matrices.

use std::fmt::Write as _;

use tcomm_core::SimilarityMatrix;

use crate::error::{Error, Result};

/// Cold-to-hot ramp; 0 maps to the first stop and 1 to the last.
const RAMP: [[u8; 3]; 5] = [
    [0x31, 0x36, 0x95],
    [0x74, 0xad, 0xd1],
    [0xff, 0xff, 0xbf],
    [0xf4, 0x6d, 0x43],
    [0xa5, 0x00, 0x26],
];
pub const NAN_COLOR: &str = "#bfbfbf";

const MARGIN_LEFT: f64 = 90.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 90.0;
const LEGEND_GAP: f64 = 20.0;
const LEGEND_WIDTH: f64 = 18.0;
const LEGEND_RIGHT: f64 = 50.0;
const MAX_TICKS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapStyle {
    /// side of the plotted grid in pixels
    pub size: f64,
    pub title: Option<String>,
}

impl Default for HeatmapStyle {
    fn default() -> Self {
        Self {
            size: 600.0,
            title: None,
        }
    }
}

/// Color for a value; values are clamped to `[0, 1]`.
pub fn color(v: f64) -> String {
    if v.is_nan() {
        return NAN_COLOR.to_owned();
    }
    let x = v.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let i = (x.floor() as usize).min(RAMP.len() - 2);
    let f = x - i as f64;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    let mix = |k: usize| (a[k] as f64 + (b[k] as f64 - a[k] as f64) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
}

fn tick_positions(n: usize) -> Vec<usize> {
    let step = n.div_ceil(MAX_TICKS).max(1);
    (0..n).step_by(step).collect()
}

/// Renders `m` as a self-contained SVG document. Identical inputs give
/// identical bytes.
pub fn render_heatmap(m: &SimilarityMatrix, style: &HeatmapStyle) -> Result<String> {
    let n = m.len();
    if n == 0 {
        return Err(Error::Invalid("cannot render an empty matrix".into()));
    }
    let cell = style.size / n as f64;
    let grid = cell * n as f64;
    let width = MARGIN_LEFT + grid + LEGEND_GAP + LEGEND_WIDTH + LEGEND_RIGHT;
    let height = MARGIN_TOP + grid + MARGIN_BOTTOM;

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(
        w,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )
    .unwrap();
    let title = style
        .title
        .clone()
        .unwrap_or_else(|| m.measure.name().to_uppercase());
    writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + grid / 2.0,
        MARGIN_TOP - 10.0,
        escape(&title)
    )
    .unwrap();

    // one rect per run of equal colors in a row
    writeln!(w, r#"<g shape-rendering="crispEdges">"#).unwrap();
    for i in 0..n {
        let colors: Vec<String> = m.row(i).iter().map(|&v| color(v)).collect();
        let mut j = 0;
        while j < n {
            let mut k = j + 1;
            while k < n && colors[k] == colors[j] {
                k += 1;
            }
            writeln!(
                w,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                MARGIN_LEFT + j as f64 * cell,
                MARGIN_TOP + i as f64 * cell,
                (k - j) as f64 * cell,
                cell,
                colors[j]
            )
            .unwrap();
            j = k;
        }
    }
    writeln!(w, "</g>").unwrap();
    writeln!(w, r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{grid}" height="{grid}" fill="none" stroke="black"/>"#).unwrap();

    for i in tick_positions(n) {
        let c = (i as f64 + 0.5) * cell;
        let label = m.index[i];
        writeln!(
            w,
            r#"<text x="{}" y="{}" text-anchor="end" dominant-baseline="middle">{label}</text>"#,
            MARGIN_LEFT - 4.0,
            MARGIN_TOP + c
        )
        .unwrap();
        let (x, y) = (MARGIN_LEFT + c, MARGIN_TOP + grid + 6.0);
        writeln!(w, r#"<text x="{x}" y="{y}" text-anchor="end" dominant-baseline="middle" transform="rotate(-90 {x} {y})">{label}</text>"#).unwrap();
    }

    let lx = MARGIN_LEFT + grid + LEGEND_GAP;
    writeln!(
        w,
        r#"<defs><linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0">"#
    )
    .unwrap();
    for (k, _) in RAMP.iter().enumerate() {
        let off = k as f64 / (RAMP.len() - 1) as f64;
        writeln!(w, r#"<stop offset="{off}" stop-color="{}"/>"#, color(off)).unwrap();
    }
    writeln!(w, "</linearGradient></defs>").unwrap();
    writeln!(w, r#"<rect x="{lx}" y="{MARGIN_TOP}" width="{LEGEND_WIDTH}" height="{grid}" fill="url(#ramp)" stroke="black"/>"#).unwrap();
    for (v, y) in [(1, MARGIN_TOP), (0, MARGIN_TOP + grid)] {
        writeln!(
            w,
            r#"<text x="{}" y="{y}" dominant-baseline="middle">{v}</text>"#,
            lx + LEGEND_WIDTH + 4.0
        )
        .unwrap();
    }
    let ny = MARGIN_TOP + grid + 20.0;
    writeln!(w, r#"<rect x="{lx}" y="{ny}" width="{LEGEND_WIDTH}" height="10" fill="{NAN_COLOR}" stroke="black"/>"#).unwrap();
    writeln!(
        w,
        r#"<text x="{}" y="{}" dominant-baseline="middle">n/a</text>"#,
        lx + LEGEND_WIDTH + 4.0,
        ny + 5.0
    )
    .unwrap();
    w.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
