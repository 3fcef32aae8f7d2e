//! CSV tables, PGM rasters and SVG convergence plots.

use std::fmt::Write as _;

use koenigs_core::geometry::{CellClass, RasterGrid};

/// CSV with a header row; values are written with `{}` so output is reproducible.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

/// Binary PGM: 255 inside, 128 boundary, 0 complement; top row first.
pub fn pgm(grid: &RasterGrid) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    for i in 0..grid.ny {
        for j in 0..grid.nx {
            out.push(match grid.cell(i, j) {
                CellClass::Inside => 255,
                CellClass::Boundary => 128,
                CellClass::Complement => 0,
            });
        }
    }
    out
}

/// Error against budget on log-log axes. The data also sits in the `desc` element.
pub fn convergence_svg(title: &str, points: &[(f64, f64)]) -> String {
    let (w, h, pad) = (480.0, 320.0, 48.0);
    let usable: Vec<(f64, f64)> = points.iter().copied().filter(|&(b, e)| b > 0.0 && e > 0.0).collect();
    let lx = |b: f64| b.log2();
    let ly = |e: f64| e.log10();
    let (x0, x1) = usable.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(lx(p.0)), b.max(lx(p.0))));
    let (y0, y1) = usable.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(ly(p.1)), b.max(ly(p.1))));
    let sx = |v: f64| pad + (w - 2.0 * pad) * if x1 > x0 { (v - x0) / (x1 - x0) } else { 0.5 };
    let sy = |v: f64| h - pad - (h - 2.0 * pad) * if y1 > y0 { (v - y0) / (y1 - y0) } else { 0.5 };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#, w, h, w, h);
    let _ = writeln!(s, "<title>{}</title>", title);
    let _ = write!(s, "<desc>budget,error");
    for &(b, e) in points {
        let _ = write!(s, "\n{},{}", b, e);
    }
    let _ = writeln!(s, "</desc>");
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, w, h);
    let _ = writeln!(
        s,
        r#"<path d="M{p} {q} L{p} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        p = pad,
        q = pad,
        b = h - pad,
        r = w - pad
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12">log2 budget</text>"#, w / 2.0 - 30.0, h - 12.0);
    let _ = writeln!(s, r#"<text x="8" y="{}" font-size="12">log10 error</text>"#, pad - 12.0);
    if !usable.is_empty() {
        let pts: Vec<String> = usable.iter().map(|&(b, e)| format!("{:.2},{:.2}", sx(lx(b)), sy(ly(e)))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" stroke="steelblue" fill="none" stroke-width="2"/>"#, pts.join(" "));
        for &(b, e) in &usable {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue" data-budget="{}" data-error="{}"/>"#,
                sx(lx(b)),
                sy(ly(e)),
                b,
                e
            );
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11">{:.3e}</text>"#, 4.0, sy(y1) + 4.0, 10f64.powf(y1));
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11">{:.3e}</text>"#, 4.0, sy(y0) + 4.0, 10f64.powf(y0));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_rows() {
        let t = csv_table(&["budget", "error"], &[vec!["8".into(), "0.5".into()]]);
        assert_eq!(t, "budget,error\n8,0.5\n");
    }

    #[test]
    fn svg_embeds_data() {
        let s = convergence_svg("demo", &[(8.0, 0.1), (16.0, 0.01)]);
        assert!(s.contains("16,0.01") && s.starts_with("<svg") && s.ends_with("</svg>\n"));
    }
}
