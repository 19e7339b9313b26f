//! SVG heatmap of an association matrix.
//!
//! One 12×12 `rect class="cell"` per matrix entry, emitted row-major. Colours
//! interpolate linearly in RGB from [`LOW_COLOR`] at the smallest off-diagonal
//! value to [`HIGH_COLOR`] at the largest. Entries without a value are drawn
//! in [`MASK_COLOR`], as is the diagonal unless unmasked, in which case it
//! takes the top colour.

use std::fmt::Write;

use copent_core::AssociationMatrix;

use crate::csv_io::format_real;

pub const CELL: usize = 12;
pub const LOW_COLOR: [u8; 3] = [0xf7, 0xfb, 0xff];
pub const HIGH_COLOR: [u8; 3] = [0x08, 0x30, 0x6b];
pub const MASK_COLOR: [u8; 3] = [0xd9, 0xd9, 0xd9];

#[derive(Debug, Clone, Copy)]
pub struct HeatmapOptions {
    pub mask_diagonal: bool,
    /// Raise negative CE values to zero before colouring.
    pub clamp_nonneg: bool,
}

impl Default for HeatmapOptions {
    fn default() -> Self {
        HeatmapOptions {
            mask_diagonal: true,
            clamp_nonneg: false,
        }
    }
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Colour at fraction `t ∈ [0, 1]` of the way from low to high.
pub fn ramp(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let mut out = [0; 3];
    for (o, (&a, &b)) in out.iter_mut().zip(LOW_COLOR.iter().zip(&HIGH_COLOR)) {
        *o = (f64::from(a) + t * (f64::from(b) - f64::from(a))).round() as u8;
    }
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub fn render_svg(m: &AssociationMatrix, opts: &HeatmapOptions) -> String {
    let m = if opts.clamp_nonneg { m.clamp_nonneg() } else { m.clone() };
    let n = m.n();
    let longest = m.names().iter().map(|s| s.chars().count()).max().unwrap_or(0);
    let margin = 10 + 7 * longest;
    let grid = n * CELL;
    let legend_x = margin + grid + 20;
    let width = legend_x + 90;
    let height = (margin + grid + 10).max(margin + 130);
    let (lo, hi) = m.value_range().unwrap_or((0.0, 0.0));
    let span = hi - lo;
    let fraction = |v: f64| if span > 0.0 { (v - lo) / span } else { 0.5 };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<title>{} association matrix</title>"#, m.measure());
    let _ = writeln!(s, r#"<g class="cells" transform="translate({margin},{margin})">"#);
    for i in 0..n {
        for j in 0..n {
            let (fill, label) = match m.get(i, j) {
                _ if i == j && !opts.mask_diagonal => (HIGH_COLOR, "diagonal".to_string()),
                Some(v) => (ramp(fraction(v)), format_real(v)),
                None => (MASK_COLOR, "NA".to_string()),
            };
            let _ = writeln!(
                s,
                r#"<rect class="cell" x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{}" data-row="{}" data-col="{}" data-value="{label}"/>"#,
                j * CELL,
                i * CELL,
                hex(fill),
                i + 1,
                j + 1
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="row-labels" text-anchor="end">"#);
    for (i, name) in m.names().iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            margin - 4,
            margin + i * CELL + CELL - 2,
            escape(name)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="col-labels">"#);
    for (j, name) in m.names().iter().enumerate() {
        let x = margin + j * CELL + CELL - 3;
        let y = margin - 4;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" transform="rotate(-90 {x} {y})">{}</text>"#,
            escape(name)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<defs><linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0"><stop offset="0" stop-color="{}"/><stop offset="1" stop-color="{}"/></linearGradient></defs>"#,
        hex(LOW_COLOR),
        hex(HIGH_COLOR)
    );
    let _ = writeln!(
        s,
        r##"<g class="legend"><rect x="{legend_x}" y="{margin}" width="14" height="100" fill="url(#ramp)" stroke="#999999"/><text x="{}" y="{}">{}</text><text x="{}" y="{}">{}</text></g>"##,
        legend_x + 18,
        margin + 8,
        format_real(hi),
        legend_x + 18,
        margin + 100,
        format_real(lo)
    );
    s.push_str("</svg>\n");
    s
}
