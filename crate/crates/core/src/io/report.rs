//! Reports: a JSON document with sorted keys and an aligned text rendering.
//! Every number carries a provenance tag.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num::complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{GaussianRational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Tag {
    Exact,
    /// Floating-point result with the tolerance it was checked or produced at;
    /// 0 for diagnostics such as condition numbers.
    Numeric(f64),
    ClosedForm,
}

impl Tag {
    pub fn label(&self) -> String {
        match self {
            Tag::Exact => "exact".into(),
            Tag::Numeric(tol) if *tol == 0.0 => "numeric".into(),
            Tag::Numeric(tol) => format!("numeric({tol:e})"),
            Tag::ClosedForm => "closed-form".into(),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Cell {
    Text(String),
    Number { value: String, tag: Tag },
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn exact(v: impl ToString) -> Self {
        Cell::Number {
            value: v.to_string(),
            tag: Tag::Exact,
        }
    }

    pub fn closed_form(v: impl ToString) -> Self {
        Cell::Number {
            value: v.to_string(),
            tag: Tag::ClosedForm,
        }
    }

    pub fn float(v: f64, tol: f64) -> Self {
        Cell::Number {
            value: format_f64(v),
            tag: Tag::Numeric(tol),
        }
    }

    pub fn complex(v: Complex64, tag: Tag) -> Self {
        Cell::Number {
            value: format_complex(v),
            tag,
        }
    }

    pub fn rational(r: &Rational) -> Self {
        Cell::exact(r)
    }

    pub fn gaussian(g: &GaussianRational) -> Self {
        Cell::exact(g)
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Number { value, tag } => json!({ "value": value, "provenance": tag.label() }),
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Number { value, tag } => format!("{value} [{}]", tag.label()),
        }
    }
}

/// Twelve significant digits in scientific notation; −0 prints as 0.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        return "0.00000000000e0".into();
    }
    format!("{v:.11e}")
}

pub fn format_complex(v: Complex64) -> String {
    if v.im == 0.0 {
        return format_f64(v.re);
    }
    let sign = if v.im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", format_f64(v.re), format_f64(v.im.abs()))
}

pub fn format_frequency(xi: &[i64]) -> String {
    format!("({})", xi.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
}

#[derive(Clone, PartialEq, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, PartialEq, Debug, Default)]
pub struct Report {
    pub command: String,
    pub subject: String,
    pub tables: Vec<Table>,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(command: impl Into<String>, subject: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            subject: subject.into(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult::new(name, passed, detail));
    }

    pub fn merge(&mut self, other: Report) {
        self.tables.extend(other.tables);
        self.checks.extend(other.checks);
    }

    pub fn to_json(&self) -> Value {
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
                    .collect();
                json!({ "name": t.name, "columns": t.columns, "rows": rows })
            })
            .collect();
        json!({
            "command": self.command,
            "subject": self.subject,
            "passed": self.passed(),
            "tables": tables,
            "checks": serde_json::to_value(&self.checks).expect("checks serialize"),
        })
    }

    /// Pretty JSON; serde_json maps are ordered, so keys come out sorted.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON values always serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.command, self.subject);
        for t in &self.tables {
            let _ = writeln!(out, "\n== {}", t.name);
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
            let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
            for r in &cells {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |items: &[String]| {
                items
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            let _ = writeln!(out, "{}", line(&t.columns));
            let _ = writeln!(
                out,
                "{}",
                widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ")
            );
            for r in &cells {
                let _ = writeln!(out, "{}", line(r));
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "\n== checks");
            for c in &self.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "{status}  {}  {}", c.name, c.detail);
            }
        }
        out
    }
}

/// Writes `<out>.json` and `<out>.txt`; returns both paths.
pub fn emit_report(report: &Report, out: &Path) -> Result<(PathBuf, PathBuf)> {
    let json_path = out.with_extension("json");
    let text_path = out.with_extension("txt");
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    for (p, body) in [(&json_path, report.to_json_string()), (&text_path, report.to_text())] {
        std::fs::write(p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    Ok((json_path, text_path))
}
