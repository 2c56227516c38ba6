//! Artifact writers: CSV tables and static SVG plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use modelset::{IndexedPointSet, WindowShape, WindowSpec};

use crate::error::{CliError, Result};

/// Writes artifacts below one directory and remembers their relative names.
pub struct ArtifactDir {
    root: PathBuf,
}

impl ArtifactDir {
    pub fn new(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(ArtifactDir { root: root.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&self, name: &str, contents: &[u8]) -> Result<String> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        Ok(name.to_string())
    }

    pub fn write_json(&self, name: &str, value: &impl serde::Serialize) -> Result<String> {
        let mut text = serde_json::to_vec_pretty(value).expect("artifact serializes");
        text.push(b'\n');
        self.write(name, &text)
    }

    pub fn write_csv(&self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::io(self.root.join(name), std::io::Error::other(e.to_string()));
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(self.root.join(name), std::io::Error::other(e.to_string())))?;
        self.write(name, &bytes)
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

const AXES: [&str; 3] = ["x", "y", "z"];

/// Header and rows of a point table: index columns, physical columns named
/// `x, y, z`, then star columns.
pub fn point_table(p: &IndexedPointSet, rank: usize, m: usize) -> (Vec<String>, Vec<Vec<String>>) {
    let d = p.dim();
    let backed = p.is_scheme_backed();
    let mut header: Vec<String> = Vec::new();
    if backed {
        header.extend((0..rank).map(|i| format!("n{i}")));
    }
    header.extend(AXES[..d].iter().map(|s| s.to_string()));
    if backed {
        header.extend((0..m).map(|i| format!("star{i}")));
    }
    let rows = p
        .points()
        .iter()
        .map(|pt| {
            let mut row = Vec::with_capacity(header.len());
            if let (true, Some(n)) = (backed, pt.index) {
                row.extend(n[..rank].iter().map(|v| v.to_string()));
            }
            row.extend(pt.x[..d].iter().map(|v| fmt_f64(*v)));
            if backed {
                row.extend(pt.star[..m].iter().map(|v| fmt_f64(*v)));
            }
            row
        })
        .collect();
    (header, rows)
}

const W: f64 = 640.0;
const H: f64 = 360.0;
const PAD: f64 = 40.0;

struct Scale {
    lo: f64,
    hi: f64,
    out_lo: f64,
    out_hi: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, out_lo: f64, out_hi: f64) -> Self {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 1.0, lo + 1.0) };
        Scale { lo, hi, out_lo, out_hi }
    }

    fn at(&self, v: f64) -> f64 {
        self.out_lo + (v - self.lo) / (self.hi - self.lo) * (self.out_hi - self.out_lo)
    }
}

fn open_svg(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{PAD}" y="20" font-size="13">{}</text>"#, escape(title));
    s
}

fn axis_labels(s: &mut String, x: &Scale, y: &Scale, x_label: &str, y_label: &str) {
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = writeln!(s, r#"<text x="{PAD}" y="{}">{:.3}</text>"#, H - PAD + 14.0, x.lo);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#, W - PAD, H - PAD + 14.0, x.hi);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 8.0, escape(x_label));
    let _ = writeln!(s, r#"<text x="4" y="{}">{:.3}</text>"#, PAD - 4.0, y.hi);
    let _ = writeln!(s, r#"<text x="4" y="{}" transform="rotate(-90 12 {})">{}</text>"#, H / 2.0, H / 2.0, escape(y_label));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Stem plot of intensities against frequency; controls are drawn in grey.
pub fn stem_plot(stems: &[(f64, f64, bool)], title: &str, x_label: &str) -> String {
    let x_lo = stems.iter().map(|s| s.0).fold(f64::INFINITY, f64::min).min(0.0);
    let x_hi = stems.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let y_hi = stems.iter().map(|s| s.1).fold(0.0, f64::max);
    let x = Scale::new(x_lo, x_hi, PAD, W - PAD);
    let y = Scale::new(0.0, y_hi, H - PAD, PAD);
    let mut s = open_svg(title);
    axis_labels(&mut s, &x, &y, x_label, "intensity");
    for &(k, i, control) in stems {
        let colour = if control { "#999999" } else { "#1f4e9c" };
        let (px, py) = (x.at(k), y.at(i));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{py:.2}" stroke="{colour}"/><circle cx="{px:.2}" cy="{py:.2}" r="2" fill="{colour}"/>"#,
            y.at(0.0)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn window_extent(w: &WindowSpec<f64>) -> (Vec<f64>, Vec<f64>) {
    w.bounding_box()
}

/// True window (grey) against the reconstruction (red outline).
pub fn window_overlay(truth: Option<&WindowSpec<f64>>, estimate: &WindowSpec<f64>, title: &str) -> String {
    let (mut lo, mut hi) = window_extent(estimate);
    if let Some(t) = truth {
        let (tl, th) = window_extent(t);
        for i in 0..lo.len().min(tl.len()) {
            lo[i] = lo[i].min(tl[i]);
            hi[i] = hi[i].max(th[i]);
        }
    }
    let mut s = open_svg(title);
    match lo.len() {
        1 => {
            let x = Scale::new(lo[0], hi[0], PAD, W - PAD);
            let y = Scale::new(0.0, 1.0, H - PAD, PAD);
            axis_labels(&mut s, &x, &y, "internal coordinate", "");
            let mut bar = |w: &WindowSpec<f64>, top: f64, style: &str| {
                for c in w.components() {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="40" {style}/>"#,
                        x.at(c.lo),
                        y.at(top),
                        x.at(c.hi) - x.at(c.lo)
                    );
                }
            };
            if let Some(t) = truth {
                bar(t, 0.7, r##"fill="#cccccc""##);
            }
            bar(estimate, 0.4, r##"fill="none" stroke="#c0392b" stroke-width="2""##);
        }
        2 => {
            let side = (hi[0] - lo[0]).max(hi[1] - lo[1]);
            let x = Scale::new(lo[0], lo[0] + side, PAD, H - PAD);
            let y = Scale::new(lo[1], lo[1] + side, H - PAD, PAD);
            let mut poly = |w: &WindowSpec<f64>, style: &str| {
                if let WindowShape::Polygon { vertices, .. } = w.shape() {
                    let pts: Vec<String> = vertices.iter().map(|v| format!("{:.2},{:.2}", x.at(v[0]), y.at(v[1]))).collect();
                    let _ = writeln!(s, r#"<polygon points="{}" {style}/>"#, pts.join(" "));
                }
            };
            if let Some(t) = truth {
                poly(t, r##"fill="#cccccc""##);
            }
            poly(estimate, r##"fill="none" stroke="#c0392b" stroke-width="2""##);
        }
        _ => {}
    }
    s.push_str("</svg>\n");
    s
}

/// Bars of the largest gap of `P_ε` per threshold, at two radii.
pub fn gap_chart(rows: &[(f64, f64, Option<f64>)], title: &str) -> String {
    let y_hi = rows
        .iter()
        .flat_map(|r| [r.1, r.2.unwrap_or(0.0)])
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let x = Scale::new(0.0, rows.len() as f64, PAD, W - PAD);
    let y = Scale::new(0.0, y_hi, H - PAD, PAD);
    let mut s = open_svg(title);
    axis_labels(&mut s, &x, &y, "threshold (fraction of 2η(0))", "max gap");
    let bw = (x.at(1.0) - x.at(0.0)) / 3.0;
    for (i, (f, g, gc)) in rows.iter().enumerate() {
        let x0 = x.at(i as f64) + bw / 2.0;
        let mut bar = |x0: f64, v: f64, colour: &str| {
            let v = if v.is_finite() { v } else { y_hi };
            let _ = writeln!(
                s,
                r#"<rect x="{x0:.2}" y="{:.2}" width="{bw:.2}" height="{:.2}" fill="{colour}"/>"#,
                y.at(v),
                y.at(0.0) - y.at(v)
            );
        };
        bar(x0, *g, "#1f4e9c");
        if let Some(c) = gc {
            bar(x0 + bw, *c, "#7fa7e0");
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{f}</text>"#, x0 + bw, H - PAD + 26.0);
    }
    s.push_str("</svg>\n");
    s
}
