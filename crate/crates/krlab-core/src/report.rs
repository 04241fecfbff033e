//! Flat key = value reports and plot-ready CSV, locale-free.

use crate::error::Result;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push_str(&mut self, key: &str, value: impl AsRef<str>) {
        self.lines.push((key.to_string(), value.as_ref().to_string()));
    }

    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.lines.push((key.to_string(), format_f64(value)));
    }

    pub fn push_usize(&mut self, key: &str, value: usize) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn push_bool(&mut self, key: &str, value: bool) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    /// A checked quantity: value, the tolerance it was checked against, and
    /// the verdict.
    pub fn push_check(&mut self, name: &str, value: f64, tol: f64, pass: bool) {
        self.push_f64(&format!("check.{name}.value"), value);
        self.push_f64(&format!("check.{name}.tol"), tol);
        self.push_str(
            &format!("check.{name}.status"),
            if pass { "pass" } else { "fail" },
        );
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    pub fn any_failed(&self) -> bool {
        self.lines
            .iter()
            .any(|(k, v)| k.ends_with(".status") && v == "fail")
    }
}

fn format_f64(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v:.17e}")
    }
}

/// CSV with '.' decimal separator and fixed headers.
pub fn write_csv(path: &Path, headers: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&headers.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
