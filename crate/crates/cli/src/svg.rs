//! Minimal standalone SVG rendering: a heatmap for maps and a line plot
//! for curves and cuts. Meant for a quick look, not publication.

use std::fmt::Write as _;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axis_labels(s: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

/// Blue below 1, white at 1, red above, on a log scale symmetric about 1.
fn diverging_color(gamma: f64, span: f64) -> String {
    if !gamma.is_finite() {
        return "#000000".into();
    }
    let t = if span > 0.0 { (gamma.ln() / span).clamp(-1.0, 1.0) } else { 0.0 };
    let fade = |t: f64| (255.0 * (1.0 - t.abs())).round() as u8;
    let (r, g, b) = if t < 0.0 { (fade(t), fade(t), 255) } else { (255, fade(t), fade(t)) };
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Heatmap of `values`, laid out row-major with `n_i` rows (x axis) and
/// `n_f` columns (y axis).
pub fn heatmap(title: &str, values: &[f64], n_i: usize, n_f: usize) -> String {
    let mut s = header(title);
    let span = values
        .iter()
        .filter(|v| v.is_finite() && **v > 0.0)
        .map(|v| v.ln().abs())
        .fold(0.0, f64::max);
    let (w, h) = ((WIDTH - 2.0 * MARGIN) / n_i as f64, (HEIGHT - 2.0 * MARGIN) / n_f as f64);
    for a in 0..n_i {
        for b in 0..n_f {
            let x = MARGIN + a as f64 * w;
            let y = HEIGHT - MARGIN - (b + 1) as f64 * h;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                w + 0.05,
                h + 0.05,
                diverging_color(values[a * n_f + b], span)
            );
        }
    }
    axis_labels(&mut s, "C_i", "C_f");
    s.push_str("</svg>\n");
    s
}

/// Polyline of `(x, y)` with a dashed reference line at y = 1. Non-finite
/// points are skipped.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64]) -> String {
    let mut s = header(title);
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(_, y)| y.is_finite()).map(|(&x, &y)| (x, y)).collect();
    let bounds = |v: &mut dyn Iterator<Item = f64>| {
        v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    let (x0, x1) = bounds(&mut pts.iter().map(|p| p.0));
    let (y0, y1) = bounds(&mut pts.iter().map(|p| p.1).chain([1.0]));
    let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let ((x0, x1), (y0, y1)) = (pad(x0, x1), pad(y0, y1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
        sx(x0),
        sy(1.0),
        sx(x1),
        sy(1.0)
    );
    let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#c0392b" stroke-width="1.5"/>"##,
        path.join(" ")
    );
    for (v, x, y, anchor) in [
        (x0, sx(x0), HEIGHT - MARGIN + 15.0, "start"),
        (x1, sx(x1), HEIGHT - MARGIN + 15.0, "end"),
    ] {
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{v:.3}</text>"#);
    }
    for v in [y0, y1] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            MARGIN - 4.0,
            sy(v) + 4.0
        );
    }
    axis_labels(&mut s, x_label, y_label);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colors() {
        assert_eq!(diverging_color(1.0, 1.0), "#ffffff");
        assert_eq!(diverging_color(std::f64::consts::E, 1.0), "#ff0000");
        assert_eq!(diverging_color(1.0 / std::f64::consts::E, 1.0), "#0000ff");
        assert_eq!(diverging_color(f64::INFINITY, 1.0), "#000000");
    }

    #[test]
    fn heatmap_has_one_cell_per_value() {
        let svg = heatmap("t", &[1.0, 2.0, 0.5, 1.0], 2, 2);
        assert_eq!(svg.matches("<rect").count(), 1 + 4);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn line_plot_skips_infinite_points() {
        let svg = line_plot("t", "x", "y", &[0.0, 1.0, 2.0], &[1.0, f64::INFINITY, 2.0]);
        let poly = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(poly.matches(',').count(), 2);
    }
}
