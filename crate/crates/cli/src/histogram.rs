//! Equal-width angle histograms with the exact Sato-Tate mass per bin.

use std::fmt::Write as _;
use std::path::Path;

use stlab::stats::{mu_st, Interval};
use stlab::AngleSample;

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistRow {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: u64,
    pub st_mass: f64,
}

/// `bins` equal-width bins over `[0, π]`; the last bin is closed on the right.
pub fn emit_histogram(sample: &AngleSample, bins: usize) -> Vec<HistRow> {
    let bins = bins.max(1);
    let width = PI / bins as f64;
    let edge = |i: usize| if i == bins { PI } else { i as f64 * width };
    let mut counts = vec![0u64; bins];
    for &psi in sample.psis() {
        let i = ((psi / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    (0..bins)
        .map(|i| {
            let (lo, hi) = (edge(i), edge(i + 1));
            HistRow {
                bin_lo: lo,
                bin_hi: hi,
                count: counts[i],
                st_mass: mu_st(&Interval::new(lo, hi).expect("bin edges lie in [0, π]")),
            }
        })
        .collect()
}

pub fn to_csv(rows: &[HistRow]) -> String {
    let mut out = String::from("bin_lo,bin_hi,count,st_mass\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.6},{:.6},{},{:.6}",
            r.bin_lo, r.bin_hi, r.count, r.st_mass
        );
    }
    out
}

/// Bars show the empirical density; the curve is `(2/π) sin² θ`.
pub fn to_svg(rows: &[HistRow], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 40.0;
    let total: u64 = rows.iter().map(|r| r.count).sum();
    let density = |r: &HistRow| {
        if total == 0 {
            0.0
        } else {
            r.count as f64 / total as f64 / (r.bin_hi - r.bin_lo)
        }
    };
    let peak = rows.iter().map(density).fold(2.0 / PI, f64::max) * 1.1;
    let sx = |theta: f64| PAD + theta / PI * (W - 2.0 * PAD);
    let sy = |d: f64| H - PAD - d / peak * (H - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    for r in rows {
        let (x0, x1, y) = (sx(r.bin_lo), sx(r.bin_hi), sy(density(r)));
        let _ = writeln!(
            svg,
            r##"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#3182bd"/>"##,
            x1 - x0,
            H - PAD - y
        );
    }
    let mut path = String::new();
    for i in 0..=200 {
        let theta = PI * f64::from(i) / 200.0;
        let d = 2.0 / PI * theta.sin().powi(2);
        let _ = write!(
            path,
            "{}{:.2},{:.2} ",
            if i == 0 { "M" } else { "L" },
            sx(theta),
            sy(d)
        );
    }
    let _ = writeln!(
        svg,
        r##"<path d="{}" fill="none" stroke="#de2d26" stroke-width="2"/>"##,
        path.trim_end()
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{PAD}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    for (label, theta) in [("0", 0.0), ("π/2", PI / 2.0), ("π", PI)] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{label}</text>"#,
            sx(theta),
            H - PAD + 16.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn write_outputs(
    sample: &AngleSample,
    bins: usize,
    csv: Option<&Path>,
    svg: Option<&Path>,
) -> std::io::Result<()> {
    if csv.is_none() && svg.is_none() {
        return Ok(());
    }
    let rows = emit_histogram(sample, bins);
    if let Some(path) = csv {
        std::fs::write(path, to_csv(&rows))?;
    }
    if let Some(path) = svg {
        std::fs::write(path, to_svg(&rows, sample.descriptor()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(psis: Vec<f64>) -> AngleSample {
        AngleSample::new(psis, "test").unwrap()
    }

    #[test]
    fn one_bin_holds_everything() {
        let rows = emit_histogram(&sample(vec![0.0, 1.0, PI]), 1);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].count, 3);
        assert!((rows[0].st_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_bins_split_mass_in_half() {
        let rows = emit_histogram(&sample(vec![0.5, PI / 2.0, 3.0]), 2);
        assert!((rows[0].st_mass - 0.5).abs() < 1e-12);
        assert!((rows[1].st_mass - 0.5).abs() < 1e-12);
        assert_eq!(rows[0].count + rows[1].count, 3);
        assert_eq!(rows[1].count, 2);
    }

    #[test]
    fn empty_sample_has_zero_counts() {
        let rows = emit_histogram(&sample(vec![]), 7);
        assert!(rows.iter().all(|r| r.count == 0));
    }

    #[test]
    fn masses_sum_to_one() {
        for bins in [1, 2, 3, 10, 37, 500] {
            let s: f64 = emit_histogram(&sample(vec![]), bins)
                .iter()
                .map(|r| r.st_mass)
                .sum();
            assert!((s - 1.0).abs() < 1e-9, "bins = {bins}");
        }
    }

    #[test]
    fn csv_format() {
        let csv = to_csv(&emit_histogram(&sample(vec![1.0]), 2));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "bin_lo,bin_hi,count,st_mass");
        assert_eq!(lines[1], "0.000000,1.570796,1,0.500000");
        assert_eq!(lines[2], "1.570796,3.141593,0,0.500000");
    }

    #[test]
    fn svg_is_well_formed() {
        let svg = to_svg(&emit_histogram(&sample(vec![1.0, 2.0]), 4), "a<b");
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<rect").count(), 5);
        assert!(svg.contains("a&lt;b"));
    }
}
