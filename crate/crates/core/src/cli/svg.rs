//! Static SVG line plots drawn from report columns.

use std::fmt::Write;

use super::report::Table;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

/// Plots `y` against `x`, with a log-scaled x axis when `log_x` is set.
/// Rows where either value is missing or non-finite are skipped.
pub fn line_plot(table: &Table, x: &str, y: &str, log_x: bool) -> Option<String> {
    let xs = table.column(x)?;
    let ys = table.column(y)?;
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(&ys)
        .filter_map(|(a, b)| Some((a.as_f64()?, b.as_f64()?)))
        .filter(|(a, b)| a.is_finite() && b.is_finite() && (!log_x || *a > 0.0))
        .map(|(a, b)| (if log_x { a.log10() } else { a }, b))
        .collect();
    if pts.is_empty() {
        return None;
    }
    let (x0, x1) = span(pts.iter().map(|p| p.0));
    let (y0, y1) = span(pts.iter().map(|p| p.1).chain([0.0]));
    let sx = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#).ok()?;
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).ok()?;
    writeln!(
        s,
        r#"<path d="M{m} {t} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    )
    .ok()?;
    let path: Vec<String> = pts.iter().map(|&(a, b)| format!("{:.2},{:.2}", sx(a), sy(b))).collect();
    writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, path.join(" ")).ok()?;
    for &(a, b) in &pts {
        writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(a), sy(b)).ok()?;
    }
    let xl = if log_x { format!("log10 {x}") } else { x.to_string() };
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{xl}</text>"#, WIDTH / 2.0, HEIGHT - 16.0).ok()?;
    writeln!(s, r#"<text x="16" y="{}" font-size="13" transform="rotate(-90 16 {})" text-anchor="middle">{y}</text>"#, HEIGHT / 2.0, HEIGHT / 2.0).ok()?;
    for (v, anchor_y) in [(y0, sy(y0)), (y1, sy(y1))] {
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="11">{v:.3}</text>"#, MARGIN - 4.0, anchor_y + 4.0).ok()?;
    }
    for (v, anchor_x) in [(x0, sx(x0)), (x1, sx(x1))] {
        writeln!(s, r#"<text x="{anchor_x:.2}" y="{}" text-anchor="middle" font-size="11">{v:.3}</text>"#, HEIGHT - MARGIN + 16.0).ok()?;
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn span(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}
