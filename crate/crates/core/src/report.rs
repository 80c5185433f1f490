//! φ-series CSV and an SVG plot of the windowed pass rate.

use std::fmt::Write as _;
use std::io::Write;
use std::ops::Range;

use crate::Error;

/// One repetition's rounds for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<'a> {
    pub round_index: &'a [u64],
    pub phi: &'a [f64],
    /// Position ranges (not round indices) of the baskets.
    pub baskets: &'a [Range<usize>],
}

fn in_basket(baskets: &[Range<usize>], len: usize) -> Vec<bool> {
    let mut out = vec![false; len];
    for b in baskets {
        for x in &mut out[b.start.min(len)..b.end.min(len)] {
            *x = true;
        }
    }
    out
}

/// Columns `round_index,phi,in_basket`, one row per round.
pub fn write_phi_csv<W: Write>(w: W, series: &[Series<'_>]) -> Result<(), Error> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["round_index", "phi", "in_basket"])
        .map_err(|e| Error::Config(e.to_string()))?;
    for s in series {
        let mark = in_basket(s.baskets, s.phi.len());
        for ((i, phi), b) in s.round_index.iter().zip(s.phi).zip(mark) {
            csv.write_record([i.to_string(), phi.to_string(), u8::from(b).to_string()])
                .map_err(|e| Error::Config(e.to_string()))?;
        }
    }
    csv.flush()?;
    Ok(())
}

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 50.0;
const MAX_POINTS: usize = 2000;

/// Pass rate `1 − φ` against round index, a dashed line at `1 − p̃` and the
/// baskets shaded. The output depends only on the inputs.
pub fn phi_svg(series: &Series<'_>, p_tilde: f64) -> String {
    let n = series.phi.len();
    let (x0, x1) = match (series.round_index.first(), series.round_index.last()) {
        (Some(&a), Some(&b)) => (a as f64, b.max(a + 1) as f64),
        _ => (0.0, 1.0),
    };
    let pass: Vec<f64> = series.phi.iter().map(|p| 1.0 - p).collect();
    let lo = pass.iter().copied().fold(1.0 - p_tilde, f64::min).min(0.7).max(0.0);
    let (y0, y1) = ((lo * 20.0).floor() / 20.0, 1.0);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    for b in series.baskets {
        if b.start >= n || b.is_empty() {
            continue;
        }
        let a = sx(series.round_index[b.start] as f64);
        let e = sx(series.round_index[(b.end - 1).min(n - 1)] as f64);
        let _ = writeln!(
            s,
            r##"<rect class="basket" x="{a:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" fill-opacity="0.5"/>"##,
            sy(y1),
            (e - a).max(1.0),
            sy(y0) - sy(y1)
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}" stroke="black"/><line x1="{MARGIN}" y1="{t:.2}" x2="{MARGIN}" y2="{b:.2}" stroke="black"/>"#,
        b = sy(y0),
        t = sy(y1),
        r = WIDTH - MARGIN
    );
    let mut y = y0;
    while y <= y1 + 1e-9 {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{y:.2}</text>"#,
            MARGIN - 6.0,
            sy(y) + 4.0
        );
        y += 0.05;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}">{}</text><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
        MARGIN,
        HEIGHT - MARGIN + 18.0,
        x0,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 18.0,
        x1
    );
    let _ = writeln!(
        s,
        r##"<line class="threshold" x1="{MARGIN}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="#d62728" stroke-dasharray="6 4"/>"##,
        WIDTH - MARGIN,
        ty = sy(1.0 - p_tilde)
    );

    let bucket = n.div_ceil(MAX_POINTS).max(1);
    let mut points = String::new();
    for chunk in (0..n).collect::<Vec<_>>().chunks(bucket) {
        let mean = chunk.iter().map(|&i| pass[i]).sum::<f64>() / chunk.len() as f64;
        let mid = chunk[chunk.len() / 2];
        let _ = write!(points, "{:.2},{:.2} ", sx(series.round_index[mid] as f64), sy(mean));
    }
    let _ = writeln!(
        s,
        r##"<polyline class="pass-rate" fill="none" stroke="#1f77b4" stroke-width="1.2" points="{}"/>"##,
        points.trim_end()
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="20" text-anchor="middle">windowed test pass rate</text>"#,
        WIDTH / 2.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_and_marks() {
        let idx: Vec<u64> = (10..15).collect();
        let phi = [0.0, 0.1, 0.2, 0.1, 0.0];
        let baskets = [1..3];
        let mut out = Vec::new();
        write_phi_csv(&mut out, &[Series { round_index: &idx, phi: &phi, baskets: &baskets }]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "round_index,phi,in_basket");
        assert_eq!(lines[2], "11,0.1,1");
        assert_eq!(lines[4], "13,0.1,0");
    }

    #[test]
    fn svg_is_deterministic_and_shades_baskets() {
        let idx: Vec<u64> = (0..10_000).collect();
        let phi: Vec<f64> = idx.iter().map(|&i| if (2000..5000).contains(&i) { 0.1 } else { 0.2 }).collect();
        let baskets = [2000..5000, 7000..8000];
        let series = Series { round_index: &idx, phi: &phi, baskets: &baskets };
        let a = phi_svg(&series, 0.15);
        assert_eq!(a, phi_svg(&series, 0.15));
        assert_eq!(a.matches(r#"class="basket""#).count(), 2);
        assert!(a.contains(r#"class="threshold""#));
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn flat_all_pass_series() {
        let idx: Vec<u64> = (0..100).collect();
        let phi = vec![0.0; 100];
        let svg = phi_svg(&Series { round_index: &idx, phi: &phi, baskets: &[] }, 0.15);
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        let ys: Vec<&str> = pts.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
    }
}
