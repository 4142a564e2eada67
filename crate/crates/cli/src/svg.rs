//! Minimal static SVG rendering: a heatmap and stacked line panels.

use std::fmt::Write;

const WIDTH: f64 = 480.0;
const MARGIN: f64 = 56.0;
const MAX_CELLS: usize = 128;

/// Color for `x ∈ [0, 1]`, dark blue through teal to yellow.
fn color(x: f64) -> String {
    const STOPS: [(f64, [f64; 3]); 4] =
        [(0.0, [68.0, 1.0, 84.0]), (0.33, [49.0, 104.0, 142.0]), (0.66, [53.0, 183.0, 121.0]), (1.0, [253.0, 231.0, 37.0])];
    let x = x.clamp(0.0, 1.0);
    let k = STOPS.windows(2).position(|w| x <= w[1].0).unwrap_or(STOPS.len() - 2);
    let ((a, ca), (b, cb)) = (STOPS[k], STOPS[k + 1]);
    let f = (x - a) / (b - a);
    let c: Vec<u8> = (0..3).map(|j| (ca[j] + f * (cb[j] - ca[j])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn frame(out: &mut String, height: f64) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#,
        w = WIDTH + 2.0 * MARGIN,
        h = height
    );
    out.push('\n');
}

/// Heatmap of `values[row][col]`; rows run along x, columns along y.
/// Large grids are block-averaged down to at most 128 cells per side.
pub fn heatmap(values: &[Vec<f64>], x_range: (f64, f64), y_range: (f64, f64), x_label: &str, y_label: &str) -> String {
    let rows = values.len();
    let cols = values.first().map_or(0, Vec::len);
    let (br, bc) = (rows.div_ceil(MAX_CELLS).max(1), cols.div_ceil(MAX_CELLS).max(1));
    let (nr, nc) = (rows.div_ceil(br), cols.div_ceil(bc));
    let mut cells = vec![vec![0.0; nc]; nr];
    for (r, row) in values.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            cells[r / br][c / bc] += v;
        }
    }
    let max = cells.iter().flatten().cloned().fold(0.0, f64::max);
    let (cw, ch) = (WIDTH / nr as f64, WIDTH / nc as f64);
    let mut out = String::new();
    frame(&mut out, WIDTH + 2.0 * MARGIN);
    for (i, row) in cells.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let x = MARGIN + i as f64 * cw;
            // idler axis increases upwards
            let y = MARGIN + WIDTH - (j + 1) as f64 * ch;
            let fill = color(if max > 0.0 { v / max } else { 0.0 });
            let _ = writeln!(out, r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#, cw + 0.05, ch + 0.05);
        }
    }
    axes(&mut out, MARGIN, WIDTH, x_range, y_range, x_label, y_label);
    out.push_str("</svg>\n");
    out
}

fn axes(out: &mut String, top: f64, height: f64, x_range: (f64, f64), y_range: (f64, f64), x_label: &str, y_label: &str) {
    let (left, bottom) = (MARGIN, top + height);
    let _ = writeln!(out, r#"<rect x="{left}" y="{top}" width="{WIDTH}" height="{height}" fill="none" stroke="black"/>"#);
    let _ = writeln!(out, r#"<text x="{left}" y="{:.1}">{:.3}</text>"#, bottom + 14.0, x_range.0);
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#, left + WIDTH, bottom + 14.0, x_range.1);
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x_label}</text>"#, left + WIDTH / 2.0, bottom + 30.0);
    let _ = writeln!(out, r#"<text x="{:.1}" y="{bottom:.1}" text-anchor="end">{:.3e}</text>"#, left - 4.0, y_range.0);
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3e}</text>"#, left - 4.0, top + 10.0, y_range.1);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{y_label}</text>"#,
        left - 40.0,
        top + height / 2.0,
        left - 40.0,
        top + height / 2.0
    );
}

pub struct Panel<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    /// Drawn as markers.
    pub data: &'a [f64],
    /// Drawn as a line.
    pub model: &'a [f64],
}

/// Vertically stacked panels sharing the x axis.
pub fn panels(panels: &[Panel], x_label: &str) -> String {
    let height = 180.0;
    let gap = 50.0;
    let mut out = String::new();
    frame(&mut out, MARGIN + panels.len() as f64 * (height + gap));
    for (k, p) in panels.iter().enumerate() {
        let top = MARGIN / 2.0 + k as f64 * (height + gap);
        let xs = p.x.iter().cloned();
        let (x0, x1) = (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max));
        let ys = p.data.iter().chain(p.model).cloned();
        let (y0, y1) = (ys.clone().fold(f64::INFINITY, f64::min).min(0.0), ys.fold(f64::NEG_INFINITY, f64::max));
        let sx = |x: f64| MARGIN + if x1 > x0 { (x - x0) / (x1 - x0) * WIDTH } else { WIDTH / 2.0 };
        let sy = |y: f64| top + height - if y1 > y0 { (y - y0) / (y1 - y0) * height } else { height / 2.0 };
        for (x, y) in p.x.iter().zip(p.data) {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="none" stroke="steelblue"/>"#, sx(*x), sy(*y));
        }
        let points: Vec<String> = p.x.iter().zip(p.model).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="firebrick" stroke-width="1.5"/>"#, points.join(" "));
        axes(&mut out, top, height, (x0, x1), (y0, y1), if k + 1 == panels.len() { x_label } else { "" }, p.label);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_endpoints() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
        assert_eq!(color(-3.0), color(0.0));
    }

    #[test]
    fn heatmap_downsamples_large_grids() {
        let values = vec![vec![1.0; 300]; 300];
        let svg = heatmap(&values, (-1.0, 1.0), (-1.0, 1.0), "x", "y");
        let rects = svg.matches("<rect").count();
        assert_eq!(rects, 100 * 100 + 1);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn panels_draw_every_point() {
        let x = [0.0, 1.0, 2.0];
        let svg = panels(&[Panel { label: "C", x: &x, data: &[1.0, 3.0, 2.0], model: &[1.0, 2.5, 2.0] }], "τ");
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
