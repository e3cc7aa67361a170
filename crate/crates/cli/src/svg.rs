//! Native-disk layout as a standalone SVG document.

use std::fmt::Write as _;

use hyperemb::coords::CoordinateFile;

const MARGIN: f64 = 10.0;
const NODE_RADIUS: f64 = 3.0;
const DEFAULT_FILL: &str = "#1f77b4";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Nodes at `(r cos θ, r sin θ)` scaled so the largest radius meets the
/// rim of a disk of `radius` pixels; `edges` index into `file.records`.
pub fn render(file: &CoordinateFile, edges: &[(usize, usize)], radius: f64) -> String {
    let r_max = file.records.iter().map(|r| r.r).fold(0.0, f64::max);
    let scale = if r_max > 0.0 { radius / r_max } else { 1.0 };
    let c = radius + MARGIN;
    let size = 2.0 * c;
    let pos: Vec<(f64, f64)> = file
        .records
        .iter()
        .map(|rec| {
            (
                c + scale * rec.r * rec.theta.cos(),
                c - scale * rec.r * rec.theta.sin(),
            )
        })
        .collect();

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.3}" height="{size:.3}" viewBox="0 0 {size:.3} {size:.3}">"#
    )
    .unwrap();
    writeln!(
        s,
        r##"<circle class="disk" cx="{c:.3}" cy="{c:.3}" r="{radius:.3}" fill="none" stroke="#999999"/>"##
    )
    .unwrap();
    s.push_str("<g class=\"edges\" stroke=\"#cccccc\" stroke-width=\"0.5\">\n");
    for &(u, v) in edges {
        let (x1, y1) = pos[u];
        let (x2, y2) = pos[v];
        writeln!(s, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#).unwrap();
    }
    s.push_str("</g>\n<g class=\"nodes\">\n");
    for (rec, &(x, y)) in file.records.iter().zip(&pos) {
        let fill = escape(rec.color.as_deref().unwrap_or(DEFAULT_FILL));
        writeln!(
            s,
            r#"<circle class="node" cx="{x:.3}" cy="{y:.3}" r="{NODE_RADIUS}" fill="{fill}"><title>{}</title></circle>"#,
            escape(&rec.label)
        )
        .unwrap();
    }
    s.push_str("</g>\n</svg>\n");
    s
}
