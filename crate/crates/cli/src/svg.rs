//! Static SVG renderings of landscapes and magnetization samples.

use std::f64::consts::TAU;
use std::fmt::Write;

use num_complex::Complex64;
use vortexfield_core::{ConformalDomain, LandscapeGrid, VectorFieldSample};

/// Fill for cells with infinite energy.
const SENTINEL: &str = "#d9d9d9";

// a short perceptual ramp, dark to light
const RAMP: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn ramp(x: f64) -> String {
    let x = x.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let i = (x.floor() as usize).min(RAMP.len() - 2);
    let f = x - i as f64;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    let mix = |p: f64, q: f64| (p + f * (q - p)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

pub fn heatmap(grid: &LandscapeGrid, title: &str) -> String {
    let n = grid.n();
    let cell = (512 / n).max(4);
    let side = cell * n;
    let margin = 48;
    let finite: Vec<f64> = grid.values().iter().copied().filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };

    let mut s = String::new();
    let width = side + 2 * margin;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{width}" viewBox="0 0 {width} {width}">"#
    );
    let _ = writeln!(s, r#"<title>{title}</title>"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for i in 0..n {
        for j in 0..n {
            let v = grid.get(i, j);
            let fill = if v.is_finite() {
                ramp((v - lo) / span)
            } else {
                SENTINEL.to_string()
            };
            // s1 to the right, s2 upward
            let x = margin + i * cell;
            let y = margin + (n - 1 - j) * cell;
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}"/>"#
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">s1 (0 to 2π)</text>"#,
        margin + side / 2,
        margin + side + 30
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 16 {})">s2 (0 to 2π)</text>"#,
        margin + side / 2,
        margin + side / 2
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" font-size="12" text-anchor="middle">W from {} to {}</text>"#,
        margin + side / 2,
        crate::output::fmt_number(lo),
        crate::output::fmt_number(hi)
    );
    s.push_str("</svg>\n");
    s
}

pub fn quiver(domain: &ConformalDomain, samples: &[VectorFieldSample], vortices: &[Complex64], title: &str) -> String {
    let outline: Vec<Complex64> = (0..256)
        .map(|k| domain.boundary_point(TAU * k as f64 / 256.0))
        .collect();
    let xmax = outline.iter().map(|p| p.re.abs()).fold(0.0, f64::max);
    let ymax = outline.iter().map(|p| p.im.abs()).fold(0.0, f64::max);
    let scale = 240.0 / xmax.max(ymax);
    let pad = 24.0;
    let (w, h) = (2.0 * (xmax * scale + pad), 2.0 * (ymax * scale + pad));
    let to_px = |p: Complex64| (w / 2.0 + p.re * scale, h / 2.0 - p.im * scale);
    let arrow = 0.06 * xmax.max(ymax) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.1} {h:.1}">"#
    );
    let _ = writeln!(s, r#"<title>{title}</title>"#);
    s.push_str(concat!(
        r#"<defs><marker id="head" viewBox="0 0 10 10" refX="8" refY="5" markerWidth="4" markerHeight="4" orient="auto">"#,
        r#"<path d="M0,0 L10,5 L0,10 z" fill="context-stroke"/></marker></defs>"#,
        "\n"
    ));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut path = String::new();
    for (k, p) in outline.iter().enumerate() {
        let (x, y) = to_px(*p);
        let _ = write!(path, "{}{x:.2},{y:.2} ", if k == 0 { "M" } else { "L" });
    }
    let _ = writeln!(
        s,
        r#"<path d="{path}z" fill="none" stroke="black" stroke-width="1.5"/>"#
    );
    for sample in samples {
        let (x, y) = to_px(Complex64::new(sample.x, sample.y));
        let (dx, dy) = (0.5 * arrow * sample.mx, -0.5 * arrow * sample.my);
        // shade by the direction of m
        let hue = sample.my.atan2(sample.mx).to_degrees().rem_euclid(360.0);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="hsl({hue:.0},70%,40%)" stroke-width="1.2" marker-end="url(#head)"/>"#,
            x - dx,
            y - dy,
            x + dx,
            y + dy
        );
    }
    for v in vortices {
        let (x, y) = to_px(*v);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="6" fill="black"/>"#);
    }
    s.push_str("</svg>\n");
    s
}
