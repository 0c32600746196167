//! Log-log SVG of `sup_hi` against `n` with a reference rate.

use std::f64::consts::E;
use std::fmt::Write;

use super::experiment::RateReport;
use crate::distributions::Kind;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;

/// Reference rate: `alpha e^{1/2} n^{-1/2}` for Boolean rows, `1/n` otherwise.
pub fn reference_rate(kind: Kind, alpha: f64, n: f64) -> f64 {
    match kind {
        Kind::Boolean => alpha * E.sqrt() / n.sqrt(),
        _ => 1.0 / n,
    }
}

pub fn render_svg(report: &RateReport) -> String {
    let kind = report.config.kind;
    let alpha = report.config.alpha;
    let pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.sup_hi > 0.0)
        .map(|r| ((r.n as f64).log10(), r.sup_hi.log10()))
        .collect();
    let refs: Vec<(f64, f64)> = report
        .rows
        .iter()
        .map(|r| ((r.n as f64).log10(), reference_rate(kind, alpha, r.n as f64).log10()))
        .collect();

    let all = pts.iter().chain(&refs);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0 < x1) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if !(y0 < y1) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let (x0, x1, y0, y1) = (x0.floor(), x1.ceil(), y0.floor(), y1.ceil());
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
    let polyline = |p: &[(f64, f64)]| -> String {
        p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect::<Vec<_>>().join(" ")
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{l},{t} V{b} H{r}" stroke="black" fill="none"/>"#,
        l = MARGIN,
        t = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
    for k in (x0 as i32)..=(x1 as i32) {
        let x = sx(k as f64);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="11" text-anchor="middle">1e{k}</text>"#,
            y = H - MARGIN + 16.0
        );
    }
    for k in (y0 as i32)..=(y1 as i32) {
        let y = sy(k as f64);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="11" text-anchor="end">1e{k}</text>"#,
            x = MARGIN - 6.0,
            y = y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{x:.2}" y="{y:.2}" font-size="12" text-anchor="middle">n</text>"#,
        x = W / 2.0,
        y = H - 16.0
    );
    let _ = writeln!(
        s,
        r#"<polyline class="reference" points="{}" stroke="gray" stroke-dasharray="5,4" fill="none"/>"#,
        polyline(&refs)
    );
    let _ = writeln!(
        s,
        r#"<polyline class="sup_hi" points="{}" stroke="steelblue" stroke-width="2" fill="none"/>"#,
        polyline(&pts)
    );
    let label = match kind {
        Kind::Boolean => "alpha e^(1/2) n^(-1/2)",
        _ => "1/n",
    };
    let _ = writeln!(
        s,
        r#"<text x="{x:.2}" y="{y:.2}" font-size="12">sup_hi ({kind}), reference {label}</text>"#,
        x = MARGIN,
        y = MARGIN - 20.0
    );
    s.push_str("</svg>\n");
    s
}
