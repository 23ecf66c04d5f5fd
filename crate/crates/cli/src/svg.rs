use std::fmt::Write;

use rqeom::lattice::Tick;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

/// Static band plot: reference levels as polylines, computed levels as dots.
///
/// `computed[i][n]` is level n+1 (first excited) at sample i, or `None`.
pub fn band_plot(header: &str, distances: &[f64], reference: &[Vec<f64>], computed: &[Vec<Option<f64>>], ticks: &[Tick], title: &str) -> String {
    let x_max = distances.iter().cloned().fold(0.0, f64::max).max(1e-12);
    let values = reference.iter().flatten().copied().chain(computed.iter().flatten().flatten().copied());
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(0.5);
    let (lo, hi) = (lo - pad, hi + pad);
    let sx = |d: f64| MARGIN + d / x_max * (WIDTH - 2.0 * MARGIN);
    let sy = |e: f64| HEIGHT - MARGIN - (e - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(header);
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for t in ticks {
        let x = sx(t.distance);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{MARGIN}" x2="{x:.2}" y2="{:.2}" stroke="#bbbbbb"/>"##, HEIGHT - MARGIN);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, HEIGHT - MARGIN + 16.0, escape(&t.label));
    }
    let step = nice_step(hi - lo);
    let mut e = (lo / step).ceil() * step;
    while e <= hi {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN - 6.0, sy(e) + 4.0, round_label(e));
        e += step;
    }
    let _ = writeln!(s, r#"<text x="16" y="{:.2}" transform="rotate(-90 16 {:.2})" text-anchor="middle">Energy (eV)</text>"#, HEIGHT / 2.0, HEIGHT / 2.0);

    let bands = reference.first().map_or(0, Vec::len);
    for n in 0..bands {
        let pts: Vec<String> = distances.iter().zip(reference).map(|(d, r)| format!("{:.2},{:.2}", sx(*d), sy(r[n]))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="black" stroke-width="1.2" points="{}"/>"#, pts.join(" "));
    }
    for (d, row) in distances.iter().zip(computed) {
        for e in row.iter().flatten() {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="none" stroke="crimson"/>"#, sx(*d), sy(*e));
        }
    }
    s.push_str("</svg>\n");
    s
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

fn round_label(e: f64) -> String {
    let r = (e * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
