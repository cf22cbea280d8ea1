use std::fmt::Write as _;
use std::io::{self, Write};

use super::Spectrum;

/// One `re,im` row per eigenvalue, in solver order.
pub fn write_spectrum_csv(spectrum: &Spectrum, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "re,im")?;
    for z in spectrum.eigenvalues() {
        writeln!(out, "{},{}", z.re, z.im)?;
    }
    Ok(())
}

/// Scatter of the spectrum in the complex plane with a dashed circle of the given radius.
/// Points outside the circle are drawn in red.
pub fn render_spectrum_svg(spectrum: &Spectrum, radius: f64) -> String {
    const SIZE: f64 = 600.0;
    const MARGIN: f64 = 40.0;
    let extent = spectrum.max_modulus().max(radius).max(1e-9) * 1.08;
    let scale = (SIZE - 2.0 * MARGIN) / (2.0 * extent);
    let cx = SIZE / 2.0;
    let px = |re: f64| cx + re * scale;
    let py = |im: f64| cx - im * scale;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<line x1="{MARGIN}" y1="{cx}" x2="{}" y2="{cx}" stroke="gray" stroke-width="0.5"/>"#, SIZE - MARGIN);
    let _ = writeln!(s, r#"<line x1="{cx}" y1="{MARGIN}" x2="{cx}" y2="{}" stroke="gray" stroke-width="0.5"/>"#, SIZE - MARGIN);
    let _ = writeln!(
        s,
        r#"<circle cx="{cx}" cy="{cx}" r="{:.3}" fill="none" stroke="steelblue" stroke-width="1.2" stroke-dasharray="5,4"/>"#,
        radius * scale
    );
    for z in spectrum.eigenvalues() {
        let color = if z.norm() > radius { "crimson" } else { "black" };
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="1.6" fill="{color}"/>"#, px(z.re), py(z.im));
    }
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="12">Re</text>"#,
        cx - 6.0
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">Im</text>"#, cx + 6.0, MARGIN + 10.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">radius {:.4}</text>"#,
        SIZE - MARGIN - 110.0,
        SIZE - MARGIN + 20.0,
        radius
    );
    s.push_str("</svg>\n");
    s
}
