//! A single plausibility curve as a standalone SVG: axes, ticks, the curve
//! and a dashed reference line at α.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 56.0;

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub fn render(points: &[(f64, f64)], alpha: f64, x_label: &str, title: &str) -> String {
    let (mut x0, mut x1) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    if !(x1 > x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| TOP + (1.0 - y.clamp(0.0, 1.0)) * (H - TOP - BOTTOM);
    let (bx, by) = (py(0.0), px(x0));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="20" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<line x1="{by:.1}" y1="{bx:.1}" x2="{:.1}" y2="{bx:.1}" stroke="black"/>"#,
        W - RIGHT
    );
    let _ = writeln!(s, r#"<line x1="{by:.1}" y1="{TOP:.1}" x2="{by:.1}" y2="{bx:.1}" stroke="black"/>"#);
    for i in 0..=5 {
        let x = x0 + (x1 - x0) * i as f64 / 5.0;
        let y = i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="black"/><text x="{0:.1}" y="{3:.1}" text-anchor="middle">{4}</text>"#,
            px(x),
            bx,
            bx + 5.0,
            bx + 20.0,
            tick_label(x)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{0:.1}" y1="{1:.1}" x2="{2:.1}" y2="{1:.1}" stroke="black"/><text x="{3:.1}" y="{4:.1}" text-anchor="end">{5}</text>"#,
            by - 5.0,
            py(y),
            by,
            by - 8.0,
            py(y) + 4.0,
            tick_label(y)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">plausibility</text>"#,
        (TOP + bx) / 2.0,
        (TOP + bx) / 2.0
    );
    let _ = writeln!(
        s,
        r#"<line x1="{by:.1}" y1="{0:.1}" x2="{1:.1}" y2="{0:.1}" stroke="red" stroke-dasharray="6 4"/><text x="{2:.1}" y="{3:.1}" text-anchor="end" fill="red">α = {4}</text>"#,
        py(alpha),
        W - RIGHT,
        W - RIGHT - 4.0,
        py(alpha) - 6.0,
        tick_label(alpha)
    );
    let path: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        path.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_a_polyline_and_the_alpha_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, i as f64 / 4.0)).collect();
        let s = render(&pts, 0.1, "θ₀ < 1", "curve");
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<polyline").count(), 1);
        assert_eq!(s.matches("stroke-dasharray").count(), 1);
        assert!(s.contains("θ₀ &lt; 1"));
        let single = render(&[(2.0, 0.5)], 0.1, "x", "one point");
        assert!(!single.contains("NaN"));
    }
}
