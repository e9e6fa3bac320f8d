//! Minimal dependency-free SVG rendering: line charts for time series and
//! heatmaps with overlaid boundary curves. CSV remains the authoritative
//! artifact; these are a convenience view.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"15\">{title}</text>\n",
        WIDTH / 2.0
    )
}

fn axes(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let mut out = String::new();
    let x0 = frame.x(frame.x_min);
    let x1 = frame.x(frame.x_max);
    let y0 = frame.y(frame.y_min);
    let y1 = frame.y(frame.y_max);
    let _ = write!(
        out,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    );
    for i in 0..=4 {
        let fx = frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 4.0;
        let fy = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"11\">{:.3}</text>",
            frame.x(fx),
            y0 + 18.0,
            fx
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" \
             font-size=\"11\">{:.3}</text>",
            x0 - 6.0,
            frame.y(fy) + 4.0,
            fy
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\">{x_label}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\" transform=\"rotate(-90 16 {})\">{y_label}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    out
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Multi-series line chart over a shared x grid.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    x: &[f64],
    series: &[(String, Vec<f64>)],
) -> String {
    let x_min = x.first().copied().unwrap_or(0.0);
    let x_max = x.last().copied().unwrap_or(1.0).max(x_min + 1e-9);
    let mut y_max = 0.0f64;
    for (_, ys) in series {
        for &v in ys {
            if v.is_finite() {
                y_max = y_max.max(v);
            }
        }
    }
    let frame = Frame {
        x_min,
        x_max,
        y_min: 0.0,
        y_max: (y_max * 1.05).max(1e-9),
    };
    let mut out = header(title);
    out.push_str(&axes(&frame, x_label, y_label));
    for (s, (name, ys)) in series.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()];
        let mut points = String::new();
        for (i, &v) in ys.iter().enumerate() {
            if v.is_finite() {
                let _ = write!(points, "{:.2},{:.2} ", frame.x(x[i]), frame.y(v));
            }
        }
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{points}\"/>"
        );
        let ly = 40.0 + 16.0 * s as f64;
        let _ = write!(
            out,
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{name}</text>\n",
            WIDTH - 180.0,
            WIDTH - 160.0,
            WIDTH - 154.0,
            ly + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

fn ramp(v: f64) -> String {
    if !v.is_finite() {
        return "#bbbbbb".into();
    }
    // light -> dark blue ramp
    let v = v.clamp(0.0, 1.0);
    let r = (240.0 - 200.0 * v) as u8;
    let g = (245.0 - 180.0 * v) as u8;
    let b = (255.0 - 120.0 * v) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Heatmap of `values` (row-major over y then x) with optional overlay
/// curves drawn on top, e.g. the cascade-condition boundary and the traced
/// saddle-node curve.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    x: &[f64],
    y: &[f64],
    values: &[f64],
    curves: &[(String, Vec<(f64, f64)>)],
) -> String {
    let frame = Frame {
        x_min: x[0],
        x_max: *x.last().unwrap(),
        y_min: y[0],
        y_max: *y.last().unwrap(),
    };
    let mut out = header(title);
    let cw = (WIDTH - 2.0 * MARGIN) / x.len() as f64;
    let ch = (HEIGHT - 2.0 * MARGIN) / y.len() as f64;
    for (j, &yv) in y.iter().enumerate() {
        for (i, &xv) in x.iter().enumerate() {
            let v = values[j * x.len() + i];
            let px = frame.x(xv) - cw / 2.0;
            let py = frame.y(yv) - ch / 2.0;
            let _ = writeln!(
                out,
                "<rect x=\"{px:.2}\" y=\"{py:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                cw + 0.5,
                ch + 0.5,
                ramp(v)
            );
        }
    }
    out.push_str(&axes(&frame, x_label, y_label));
    for (s, (name, pts)) in curves.iter().enumerate() {
        let color = if s == 0 { "#d62728" } else { "#000000" };
        let dash = if s == 0 {
            " stroke-dasharray=\"6 4\""
        } else {
            ""
        };
        let mut points = String::new();
        for &(px, py) in pts {
            let _ = write!(points, "{:.2},{:.2} ", frame.x(px), frame.y(py));
        }
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{dash} points=\"{points}\"/>"
        );
        let ly = 40.0 + 16.0 * s as f64;
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             fill=\"{color}\">{name}</text>",
            WIDTH - 180.0,
            ly + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}
