//! Static SVG rendering of overlaid multichannel traces.

use std::fmt::Write;

use megden_core::Matrix;

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

#[derive(Clone, Debug)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
    /// Time of the first column, ms.
    pub t0_ms: f64,
    /// Spacing between columns, ms.
    pub dt_ms: f64,
}

impl Default for PlotSpec {
    fn default() -> Self {
        Self {
            title: String::new(),
            x_label: "Time (ms)".into(),
            y_label: "Magnetic field (fT)".into(),
            width: 960,
            height: 540,
            t0_ms: 0.0,
            dt_ms: 1.0,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Deterministic per-trace colour spread around the hue circle.
fn colour(i: usize, count: usize) -> String {
    let hue = (i as f64 * 360.0 / count.max(1) as f64) % 360.0;
    format!("hsl({hue:.1},70%,40%)")
}

/// Renders one `<polyline>` per matrix row.
pub fn render_svg(data: &Matrix, spec: &PlotSpec) -> String {
    let (rows, cols) = data.shape();
    let w = spec.width as f64;
    let h = spec.height as f64;
    let plot_w = (w - MARGIN_LEFT - MARGIN_RIGHT).max(1.0);
    let plot_h = (h - MARGIN_TOP - MARGIN_BOTTOM).max(1.0);

    let x_min = spec.t0_ms;
    let x_max = spec.t0_ms + spec.dt_ms * cols.saturating_sub(1) as f64;
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };

    let finite = data.as_slice().iter().copied().filter(|v| v.is_finite());
    let (mut y_min, mut y_max) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !(y_min.is_finite() && y_max.is_finite()) {
        (y_min, y_max) = (-1.0, 1.0);
    }
    if y_max - y_min < 1e-12 {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let px = |t: f64| MARGIN_LEFT + (t - x_min) / x_span * plot_w;
    let py = |v: f64| MARGIN_TOP + (y_max - v) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        w / 2.0,
        escape(&spec.title)
    );

    // axes
    let (x0, y0, x1, y1) = (MARGIN_LEFT, MARGIN_TOP + plot_h, MARGIN_LEFT + plot_w, MARGIN_TOP);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.1},{y1:.1} L{x0:.1},{y0:.1} L{x1:.1},{y0:.1}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let t = x_min + f * (x_max - x_min);
        let x = px(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">{t:.0}</text>"#,
            y0 + 5.0,
            y0 + 18.0
        );
        let v = y_min + f * (y_max - y_min);
        let y = py(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{v:.1}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        h - 15.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {:.1})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(&spec.y_label)
    );

    let _ = writeln!(svg, r#"<g fill="none" stroke-width="0.6">"#);
    for (i, row) in data.iter_rows().enumerate() {
        let mut points = String::with_capacity(cols * 14);
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                continue;
            }
            if !points.is_empty() {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", px(x_min + j as f64 * spec.dt_ms), py(v));
        }
        let _ = writeln!(
            svg,
            r#"<polyline stroke="{}" points="{points}"/>"#,
            colour(i, rows)
        );
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}
