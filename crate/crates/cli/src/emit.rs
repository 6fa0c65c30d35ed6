//! Report files: one CSV per table plus `fits` and `assertions`, a JSON
//! mirror of the whole report, and one log-log SVG per fitted exponent.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use torus_density::report::{ExperimentReport, FitRecord, Table};

use crate::config::Format;
use crate::error::{CliError, Result};

fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == x.trunc() && x.abs() < 1e15 {
        format!("{x}")
    } else {
        format!("{x:?}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Header is the table's columns followed by `tolerance`.
pub fn table_csv(t: &Table) -> String {
    let mut s = t.columns.join(",");
    s.push_str(",tolerance\n");
    for row in &t.rows {
        let cells: Vec<String> = row.values.iter().map(|&v| num(v)).collect();
        let _ = writeln!(s, "{},{}", cells.join(","), opt(row.tolerance));
    }
    s
}

pub fn fits_csv(r: &ExperimentReport) -> String {
    let mut s = String::from("name,exponent,intercept,residual,n_min,n_max,target\n");
    for f in &r.fits {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            f.name,
            num(f.exponent),
            num(f.intercept),
            num(f.residual),
            num(f.window.0),
            num(f.window.1),
            opt(f.target)
        );
    }
    s
}

pub fn assertions_csv(r: &ExperimentReport) -> String {
    let mut s = String::from("name,observed,expected,tolerance,passed\n");
    for a in &r.assertions {
        let _ = writeln!(s, "{},{},\"{}\",{},{}", a.name, num(a.observed), a.expected, num(a.tolerance), a.passed);
    }
    s
}

pub fn report_json(r: &ExperimentReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serialises");
    s.push('\n');
    s
}

pub fn read_report(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Log-log scatter of the fitted points with the fitted line and its slope.
pub fn fit_svg(f: &FitRecord, title: &str) -> String {
    let (w, h, pad) = (480.0, 360.0, 56.0);
    let pts: Vec<(f64, f64)> = f
        .points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let fold = |g: fn(&(f64, f64)) -> f64| {
        pts.iter().map(g).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (mut x0, mut x1) = fold(|p| p.0);
    let (mut y0, mut y1) = fold(|p| p.1);
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(s, r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"##);
    let _ = writeln!(s, r##"<rect width="{w}" height="{h}" fill="white"/>"##);
    let _ = writeln!(
        s,
        r##"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(s, r##"<text x="{pad}" y="24" font-family="sans-serif" font-size="14">{title}: {}</text>"##, f.name);
    let _ = writeln!(
        s,
        r##"<text x="{pad}" y="42" font-family="sans-serif" font-size="12">slope = {:.4}{}</text>"##,
        f.exponent,
        f.target.map(|t| format!(" (target {t:.4})")).unwrap_or_default()
    );
    let _ = writeln!(
        s,
        r##"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">log N</text>"##,
        w / 2.0,
        h - 16.0
    );
    let (lx0, lx1) = (f.window.0.ln(), f.window.1.ln());
    let line = |x: f64| f.intercept + f.exponent * x;
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c33" stroke-width="1.5"/>"##,
        sx(lx0),
        sy(line(lx0)),
        sx(lx1),
        sy(line(lx1))
    );
    for (x, y) in &pts {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#236"/>"##, sx(*x), sy(*y));
    }
    s.push_str("</svg>\n");
    s
}

/// Writes the requested formats into `dir` and returns the written paths.
pub fn emit(r: &ExperimentReport, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let stem = &r.experiment;
    let mut out = Vec::new();
    for f in formats {
        match f {
            Format::Csv => {
                for t in &r.tables {
                    out.push(write(dir.join(format!("{stem}_{}.csv", t.name)), &table_csv(t))?);
                }
                out.push(write(dir.join(format!("{stem}_fits.csv")), &fits_csv(r))?);
                out.push(write(dir.join(format!("{stem}_assertions.csv")), &assertions_csv(r))?);
            }
            Format::Json => out.push(write(dir.join(format!("{stem}.json")), &report_json(r))?),
            Format::Svg => {
                for fit in &r.fits {
                    let name = fit.name.replace(|c: char| !c.is_ascii_alphanumeric() && c != '-', "_");
                    out.push(write(dir.join(format!("{stem}_{name}.svg")), &fit_svg(fit, stem))?);
                }
            }
        }
    }
    Ok(out)
}
