use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::error::CliError;

/// Rows for CSV and table output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Result of one command, before rendering.
pub struct Report {
    pub command: &'static str,
    pub n: Option<usize>,
    pub seeds: Vec<u64>,
    pub result: Value,
    pub table: Table,
    pub default_format: Format,
    pub passed: bool,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    mod2exp: u32,
    n: Option<usize>,
    seeds: &'a [u64],
    passed: bool,
    result: &'a Value,
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value, CliError> {
    Ok(serde_json::to_value(x)?)
}

pub fn envelope_json(report: &Report, mod2exp: u32) -> Result<String, CliError> {
    let env = Envelope {
        tool: "psi3",
        version: env!("CARGO_PKG_VERSION"),
        command: report.command,
        mod2exp,
        n: report.n,
        seeds: &report.seeds,
        passed: report.passed,
        result: &report.result,
    };
    Ok(serde_json::to_string_pretty(&env)? + "\n")
}

fn render_csv(table: &Table) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 strings"))
}

fn render_table(table: &Table, report: &Report, mod2exp: u32) -> String {
    let mut widths: Vec<usize> = table.header.iter().map(|h| h.len()).collect();
    for row in &table.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = format!(
        "psi3 {} {}  N = {}{}\n\n",
        env!("CARGO_PKG_VERSION"),
        report.command,
        mod2exp,
        report.n.map(|n| format!("  n = {n}")).unwrap_or_default()
    );
    out += &line(table.header.clone());
    out += &line(
        widths
            .iter()
            .map(|&w| "-".repeat(w))
            .collect::<Vec<_>>()
            .iter()
            .map(String::as_str)
            .collect(),
    );
    for row in &table.rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out += &format!(
        "\n{}\n",
        if report.passed {
            "all checks passed"
        } else {
            "some checks FAILED"
        }
    );
    out
}

pub fn render(report: &Report, format: Option<Format>, mod2exp: u32) -> Result<String, CliError> {
    match format.unwrap_or(report.default_format) {
        Format::Json => envelope_json(report, mod2exp),
        Format::Csv => render_csv(&report.table),
        Format::Table => Ok(render_table(&report.table, report, mod2exp)),
    }
}

pub fn write_to(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(p.display().to_string(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| CliError::Io("stdout".into(), e))
        }
    }
}
