//! Minimal SVG line plots and heatmaps.

use std::fmt::Write;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const COLORS: [&str; 6] = ["#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Viridis-like ramp, low to high.
const RAMP: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }

    fn axes(&self, out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let (l, r) = (LEFT, WIDTH - RIGHT);
        let (t, b) = (TOP, HEIGHT - BOTTOM);
        let _ = writeln!(
            out,
            r##"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
            r - l,
            b - t
        );
        for k in 0..=5 {
            let x = self.x0 + (self.x1 - self.x0) * k as f64 / 5.0;
            let px = self.px(x);
            let _ = writeln!(
                out,
                r##"<line x1="{px:.2}" y1="{b}" x2="{px:.2}" y2="{}" stroke="#444"/><text x="{px:.2}" y="{}" font-size="11" text-anchor="middle">{}</text>"##,
                b + 5.0,
                b + 18.0,
                tick_label(x)
            );
            let y = self.y0 + (self.y1 - self.y0) * k as f64 / 5.0;
            let py = self.py(y);
            let _ = writeln!(
                out,
                r##"<line x1="{}" y1="{py:.2}" x2="{l}" y2="{py:.2}" stroke="#444"/><text x="{}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"##,
                l - 5.0,
                l - 8.0,
                py + 4.0,
                tick_label(y)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="22" font-size="15" text-anchor="middle">{}</text>"#,
            (l + r) / 2.0,
            escape(title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            (l + r) / 2.0,
            HEIGHT - 12.0,
            escape(xlabel)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            (t + b) / 2.0,
            (t + b) / 2.0,
            escape(ylabel)
        );
    }
}

fn header() -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">
<rect width="100%" height="100%" fill="white"/>
"#
    )
}

/// Overlaid polylines sharing the abscissa `xs`; the first series is drawn
/// in black.
pub fn line_plot(title: &str, xlabel: &str, xs: &[f64], series: &[(&str, &[f64])], notes: &[String]) -> String {
    let y_max = series
        .iter()
        .flat_map(|(_, ys)| ys.iter().copied())
        .fold(0.0f64, f64::max);
    let frame = Frame {
        x0: xs[0],
        x1: xs[xs.len() - 1],
        y0: 0.0,
        y1: if y_max > 0.0 { y_max * 1.05 } else { 1.0 },
    };
    let mut out = header();
    frame.axes(&mut out, title, xlabel, "density");
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(ys.iter())
            .map(|(&x, &y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 16.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}" font-size="12">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            escape(name)
        );
    }
    for (k, note) in notes.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11">{}</text>"#,
            WIDTH - RIGHT + 12.0,
            TOP + 40.0 + 20.0 * (series.len() + k) as f64,
            escape(note)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let k = (t.floor() as usize).min(RAMP.len() - 2);
    let f = t - k as f64;
    let (a, b) = (RAMP[k], RAMP[k + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Cell-coloured map of `values[iy * xs.len() + ix]` with circles at
/// `markers`. Colours follow the square root of the min–max scaled value.
pub fn heatmap(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[f64],
    markers: &[(f64, f64)],
) -> String {
    let (nx, ny) = (xs.len(), ys.len());
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let dx = (xs[nx - 1] - xs[0]) / (nx - 1) as f64;
    let dy = (ys[ny - 1] - ys[0]) / (ny - 1) as f64;
    let frame = Frame {
        x0: xs[0] - dx / 2.0,
        x1: xs[nx - 1] + dx / 2.0,
        y0: ys[0] - dy / 2.0,
        y1: ys[ny - 1] + dy / 2.0,
    };
    let mut out = header();
    let w = frame.px(xs[0] + dx) - frame.px(xs[0]);
    let h = frame.py(ys[0]) - frame.py(ys[0] + dy);
    for iy in 0..ny {
        for ix in 0..nx {
            let v = values[iy * nx + ix];
            let t = if hi > lo { ((v - lo) / (hi - lo)).sqrt() } else { 0.0 };
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                frame.px(xs[ix] - dx / 2.0),
                frame.py(ys[iy] + dy / 2.0),
                w + 0.3,
                h + 0.3,
                ramp(t)
            );
        }
    }
    frame.axes(&mut out, title, xlabel, ylabel);
    for &(mx, my) in markers {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="#ff2020" stroke-width="2"/>"##,
            frame.px(mx),
            frame.py(my)
        );
    }
    let lx = WIDTH - RIGHT + 30.0;
    for k in 0..=10 {
        let t = k as f64 / 10.0;
        let y = HEIGHT - BOTTOM - t * (HEIGHT - TOP - BOTTOM);
        let _ = writeln!(
            out,
            r#"<rect x="{lx}" y="{:.2}" width="20" height="{:.2}" fill="{}"/>"#,
            y - (HEIGHT - TOP - BOTTOM) / 10.0,
            (HEIGHT - TOP - BOTTOM) / 10.0 + 0.5,
            ramp(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="11">{}</text><text x="{}" y="{}" font-size="11">{}</text>"#,
        lx + 26.0,
        TOP + 10.0,
        tick_label(hi),
        lx + 26.0,
        HEIGHT - BOTTOM,
        tick_label(lo)
    );
    out.push_str("</svg>\n");
    out
}
