//! Minimal SVG writers for similarity heatmaps and bar charts.

use std::fmt::Write as _;

use crate::analysis::SimilarityMatrix;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Node order that groups nodes by cluster, clusters in label order.
pub fn block_order(labels: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by_key(|&i| (labels[i], i));
    order
}

/// Greyscale heatmap of `s` with rows and columns permuted by `order`
/// (darker is higher). Cluster boundaries from `labels` are outlined.
pub fn heatmap(s: &SimilarityMatrix, labels: &[usize], names: &[String], title: &str) -> String {
    let n = s.n();
    let order = block_order(labels);
    let cell = if n <= 40 { 14.0 } else if n <= 80 { 8.0 } else { 4.0 };
    let margin = 40.0 + if n <= 80 { 40.0 } else { 0.0 };
    let size = margin + cell * n as f64 + 10.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0}" height="{:.0}" viewBox="0 0 {size:.0} {:.0}">"#,
        size + 20.0,
        size + 20.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="16" font-family="sans-serif" font-size="13">{}</text>"#,
        margin,
        escape(title)
    );
    let top = margin + 20.0;
    for (r, &i) in order.iter().enumerate() {
        for (c, &j) in order.iter().enumerate() {
            let v = s.get(i, j).clamp(0.0, 1.0);
            let g = (255.0 * (1.0 - v)).round() as u8;
            let _ = writeln!(
                out,
                r#"<rect x="{:.1}" y="{:.1}" width="{cell}" height="{cell}" fill="rgb({g},{g},{g})"><title>{} / {}: {:.3}</title></rect>"#,
                margin + c as f64 * cell,
                top + r as f64 * cell,
                escape(&names[i]),
                escape(&names[j]),
                v
            );
        }
        if n <= 80 {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="{:.0}" text-anchor="end">{}</text>"#,
                margin - 3.0,
                top + (r as f64 + 0.8) * cell,
                cell * 0.8,
                escape(&names[i])
            );
        }
    }
    // Outline each block.
    let mut start = 0;
    while start < n {
        let l = labels[order[start]];
        let mut end = start;
        while end < n && labels[order[end]] == l {
            end += 1;
        }
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="red" stroke-width="1"/>"#,
            margin + start as f64 * cell,
            top + start as f64 * cell,
            (end - start) as f64 * cell,
            (end - start) as f64 * cell
        );
        start = end;
    }
    out.push_str("</svg>\n");
    out
}

/// Vertical bar chart; `bars` are `(label, value)` pairs.
pub fn bar_chart(bars: &[(String, f64)], title: &str) -> String {
    let width = 60.0 + 24.0 * bars.len().max(1) as f64;
    let height = 220.0;
    let plot_h = 150.0;
    let max = bars.iter().map(|b| b.1).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(
        out,
        r#"<text x="10" y="16" font-family="sans-serif" font-size="13">{}</text>"#,
        escape(title)
    );
    let base = 30.0 + plot_h;
    for (k, (label, v)) in bars.iter().enumerate() {
        let h = plot_h * v / max;
        let x = 40.0 + 24.0 * k as f64;
        let _ = writeln!(
            out,
            r##"<rect x="{x:.1}" y="{:.1}" width="18" height="{h:.1}" fill="#4a6fa5"><title>{}: {}</title></rect>"##,
            base - h,
            escape(label),
            v
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="9" text-anchor="middle">{}</text>"#,
            x + 9.0,
            base + 12.0,
            escape(label)
        );
    }
    let _ = writeln!(
        out,
        r#"<line x1="36" y1="{base:.1}" x2="{:.1}" y2="{base:.1}" stroke="black"/>"#,
        width - 10.0
    );
    out.push_str("</svg>\n");
    out
}
