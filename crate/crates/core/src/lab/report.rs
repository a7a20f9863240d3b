//! Run artifacts: the results.csv table (the record of note, with fixed
//! 17-significant-digit float formatting so reruns are byte-identical),
//! meta.txt (config hash, versions, timing — the only place timestamps
//! live), and optional SVG line plots derived purely from the table.

use crate::error::{LabError, Result};
use std::fmt::Write as _;
use std::path::Path;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Num(f64),
    Int(i64),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            // 17 significant digits round-trip every f64 exactly
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// In-memory results table; every column is declared in the header row.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Column index by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn numbers(&self, name: &str) -> Vec<f64> {
        let Some(idx) = self.column(name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter_map(|r| match &r[idx] {
                Cell::Num(v) => Some(*v),
                Cell::Int(v) => Some(*v as f64),
                _ => None,
            })
            .collect()
    }
}

/// FNV-1a 64-bit hash, used to fingerprint the config file.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// One verdict line of a run.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Everything a run leaves behind.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub kind: String,
    pub config_hash: u64,
    pub seed: u64,
    pub table: Table,
    pub verdicts: Vec<Verdict>,
    pub wall_seconds: f64,
}

impl RunRecord {
    pub fn failures(&self) -> usize {
        self.verdicts.iter().filter(|v| !v.pass).count()
    }

    pub fn meta_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "tool = uclab {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "kind = {}", self.kind);
        let _ = writeln!(out, "config_hash = {:016x}", self.config_hash);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "rows = {}", self.table.rows.len());
        let _ = writeln!(out, "wall_seconds = {:.3}", self.wall_seconds);
        let _ = writeln!(out, "verdicts = {}", self.verdicts.len());
        let _ = writeln!(out, "failures = {}", self.failures());
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "verdict {} = {} ({})",
                v.name,
                if v.pass { "pass" } else { "FAIL" },
                v.detail
            );
        }
        out
    }

    /// Writes results.csv and meta.txt into `dir` (created if missing).
    pub fn persist(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.table.write_csv(&dir.join("results.csv"))?;
        std::fs::write(dir.join("meta.txt"), self.meta_text())?;
        Ok(())
    }
}

/// Minimal SVG polyline plot of one or more series.
pub fn line_plot(
    path: &Path,
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[(String, Vec<(f64, f64)>)],
) -> Result<()> {
    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (62.0, 18.0, 34.0, 46.0);
    let pts: Vec<(f64, f64)> = series.iter().flat_map(|(_, s)| s.iter().copied()).collect();
    if pts.is_empty() {
        return Err(LabError::Config("nothing to plot".into()));
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 < 1e-300 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-300 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" font-family="monospace" font-size="14" text-anchor="middle">{}</text>"#,
        w / 2.0,
        title
    );
    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{ml}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        h - mb,
        w - mr,
        h - mb
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{}" stroke="black"/>"#,
        h - mb
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="10" text-anchor="middle">{fx:.3e}</text>"#,
            sx(fx),
            h - mb + 16.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="10" text-anchor="end">{fy:.3e}</text>"#,
            ml - 6.0,
            sy(fy) + 3.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="12" text-anchor="middle">{xlabel}</text>"#,
        (ml + w - mr) / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" font-family="monospace" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">{ylabel}</text>"#,
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0
    );
    for (si, (name, s)) in series.iter().enumerate() {
        let color = palette[si % palette.len()];
        let path_d: Vec<String> = s
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                format!("{}{:.2},{:.2}", if i == 0 { "M" } else { "L" }, sx(x), sy(y))
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
            path_d.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="10" fill="{color}">{name}</text>"#,
            w - mr - 150.0,
            mt + 14.0 * si as f64 + 4.0
        );
    }
    let _ = writeln!(svg, "</svg>");
    std::fs::write(path, svg)?;
    Ok(())
}
