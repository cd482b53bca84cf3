use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use psi3_core::cring::{g_element, psi3_degree_matrix};
use psi3_core::dyadic::{parse_residue_value, Z2Residue};
use psi3_core::exec::Execution;
use psi3_core::pipeline::{end_to_end_sweep, extract_a, guard_bits, normalize_d, sample_c, xn_report, PipelineParams};
use psi3_core::utmatrix::{build_c, conjugate_solve, similarity_check, UTMatrix};
use psi3_core::valuations::{factorial_reports, iota_product_reports, nine_pow_reports, two_power_reports};

use crate::args::{Command, Format};
use crate::error::CliError;
use crate::output::{to_value, write_to, Report, Table};
use crate::verify;

pub fn run(command: &Command, mod2exp: u32, mode: Execution) -> Result<Report, CliError> {
    match *command {
        Command::Valuations {
            max,
            iota_max,
            two_power_max,
        } => valuations(max, iota_max, two_power_max, mode),
        Command::Psi3Matrix { degree } => psi3_matrix(degree),
        Command::Basis { m, l } => basis(m, l),
        Command::Conjugate {
            size,
            seed,
            ref c_entries,
        } => conjugate(size, seed, c_entries.as_deref(), mod2exp),
        Command::ExtractA { n, seed } => extract(n, seed, mod2exp),
        Command::EndToEnd { n, seeds } => end_to_end(n, seeds, mod2exp, mode),
        Command::Xn { n, size, ref report } => xn(n as usize, size, report.as_deref(), mod2exp),
        Command::VerifyPaper { n, seeds, max_degree } => verify::run(n as usize, seeds, max_degree, mod2exp, mode),
    }
}

fn report(command: &'static str, result: serde_json::Value, table: Table, passed: bool) -> Report {
    Report {
        command,
        n: None,
        seeds: Vec::new(),
        result,
        table,
        default_format: Format::Json,
        passed,
    }
}

fn valuations(max: u64, iota_max: u64, two_power_max: u32, mode: Execution) -> Result<Report, CliError> {
    let groups = [
        ("nine_pow_minus_one", nine_pow_reports(max, mode)),
        ("nine_pow_two_power", two_power_reports(two_power_max, mode)),
        ("factorial", factorial_reports(max, mode)),
        ("iota_product", iota_product_reports(iota_max, mode)),
    ];
    let mut table = Table::new(vec!["identity", "input", "formula", "oracle", "agree"]);
    let mut result = serde_json::Map::new();
    let mut passed = true;
    for (name, rows) in &groups {
        for r in rows {
            passed &= r.agree;
            table.push(vec![
                name.to_string(),
                r.input.to_string(),
                r.formula_value.to_string(),
                r.oracle_value.to_string(),
                r.agree.to_string(),
            ]);
        }
        result.insert(name.to_string(), to_value(rows)?);
    }
    Ok(report("valuations", result.into(), table, passed))
}

fn matrix_rows(table: &mut Table, name: &str, m: &UTMatrix) {
    for i in 0..m.size() {
        for j in i..m.size() {
            table.push(vec![
                name.to_string(),
                i.to_string(),
                j.to_string(),
                m.get(i, j).to_string(),
            ]);
        }
    }
}

fn psi3_matrix(degree: u32) -> Result<Report, CliError> {
    let m = psi3_degree_matrix(degree)?;
    let mut table = Table::new(vec!["row", "col", "value"]);
    for (l, row) in m.rows.iter().enumerate() {
        for (i, x) in row.coeffs.iter().enumerate() {
            table.push(vec![l.to_string(), i.to_string(), x.to_string()]);
        }
    }
    let passed = m.is_lower_bidiagonal();
    let result = json!({ "degree_index": degree, "entries": m.entries(), "lower_bidiagonal": passed });
    Ok(report("psi3-matrix", result, table, passed))
}

fn basis(m: u32, l: u32) -> Result<Report, CliError> {
    let g = g_element(m, l)?;
    let mut table = Table::new(vec!["u_half_exponent", "v2_quarter_exponent", "coefficient"]);
    for (&(a, b), c) in g.terms() {
        table.push(vec![a.to_string(), b.to_string(), c.to_string()]);
    }
    let result = json!({ "m": m, "l": l, "integral": g.is_integral(), "element": g });
    Ok(report("basis", result, table, true))
}

/// One entry of C above the superdiagonal, 1-based.
#[derive(Debug, Deserialize)]
struct CEntry {
    i: usize,
    j: usize,
    value: String,
}

fn read_c(path: &Path, size: usize, mod2exp: u32) -> Result<UTMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let entries: Vec<CEntry> = serde_json::from_str(&text)?;
    let mut upper = BTreeMap::new();
    for e in entries {
        if e.i == 0 || e.j < e.i + 2 || e.j > size {
            return Err(CliError::Input(format!(
                "entry ({}, {}) is not strictly above the superdiagonal of a {size}x{size} matrix (1-based)",
                e.i, e.j
            )));
        }
        let v = Z2Residue::from_bigint(&parse_residue_value(&e.value)?, mod2exp);
        upper.insert((e.i - 1, e.j - 1), v);
    }
    Ok(build_c(size, mod2exp, &upper)?)
}

#[derive(Serialize)]
struct ConjugateResult<'a> {
    #[serde(rename = "C")]
    c: &'a UTMatrix,
    #[serde(rename = "U")]
    u: &'a UTMatrix,
    check: bool,
}

fn conjugate(size: usize, seed: u64, entries: Option<&Path>, mod2exp: u32) -> Result<Report, CliError> {
    let (c, seeds) = match entries {
        Some(p) => (read_c(p, size, mod2exp)?, Vec::new()),
        None => (sample_c(size, seed, mod2exp), vec![seed]),
    };
    let u = conjugate_solve(&c)?;
    let check = similarity_check(&u, &c)?;
    let mut table = Table::new(vec!["matrix", "row", "col", "value"]);
    matrix_rows(&mut table, "C", &c);
    matrix_rows(&mut table, "U", &u);
    let mut r = report(
        "conjugate",
        to_value(&ConjugateResult { c: &c, u: &u, check })?,
        table,
        check,
    );
    r.n = Some(size);
    r.seeds = seeds;
    Ok(r)
}

fn extract(n: usize, seed: u64, mod2exp: u32) -> Result<Report, CliError> {
    let p = PipelineParams::sample(n, seed, mod2exp);
    let a = extract_a(&p)?;
    let (d, c) = normalize_d(&a)?;
    let passed = (0..n).all(|k| a.get(k, k) == &Z2Residue::nine_pow(k as u32, mod2exp))
        && a.superdiagonal().iter().all(Z2Residue::is_unit);
    let mut table = Table::new(vec!["matrix", "row", "col", "value"]);
    for (name, m) in [("A", &a), ("D", &d), ("C", &c)] {
        matrix_rows(&mut table, name, m);
    }
    let result = json!({
        "guard_bits": guard_bits(n),
        "params": to_value(&p)?,
        "A": to_value(&a)?,
        "D": to_value(&d)?,
        "C": to_value(&c)?,
    });
    let mut r = report("extract-a", result, table, passed);
    r.n = Some(n);
    r.seeds = vec![seed];
    Ok(r)
}

fn end_to_end(n: usize, seeds: u64, mod2exp: u32, mode: Execution) -> Result<Report, CliError> {
    let seeds: Vec<u64> = (0..seeds).collect();
    let runs = end_to_end_sweep(n, &seeds, mod2exp, mode)?;
    let mut table = Table::new(vec!["seed", "check", "error"]);
    let mut items = Vec::with_capacity(runs.len());
    let mut passed = true;
    for (seed, run) in seeds.iter().zip(&runs) {
        match run {
            Ok(rep) => {
                passed &= rep.check;
                table.push(vec![seed.to_string(), rep.check.to_string(), String::new()]);
                items.push(to_value(rep)?);
            }
            Err(e) => {
                passed = false;
                table.push(vec![seed.to_string(), "false".into(), e.to_string()]);
                items.push(json!({ "seed": seed, "check": false, "error": e.to_string() }));
            }
        }
    }
    let mut r = report("end-to-end", json!({ "runs": items }), table, passed);
    r.n = Some(n);
    r.seeds = seeds;
    Ok(r)
}

fn xn(n: usize, size: usize, full: Option<&Path>, mod2exp: u32) -> Result<Report, CliError> {
    let rep = xn_report(n, size, mod2exp)?;
    if let Some(path) = full {
        write_to(Some(path), &(serde_json::to_string_pretty(&rep)? + "\n"))?;
    }
    let mut table = Table::new(vec!["row", "col", "brute", "path", "published", "published_agrees"]);
    let published: BTreeMap<(usize, usize), _> = rep.published.iter().map(|e| ((e.row, e.col), e)).collect();
    for i in 0..size {
        for j in i..size {
            let (value, agrees) = match published.get(&(i, j)) {
                Some(e) => (e.published.to_string(), e.agrees.to_string()),
                None => (String::new(), String::new()),
            };
            table.push(vec![
                i.to_string(),
                j.to_string(),
                rep.brute.get(i, j).to_string(),
                rep.formula_path.get(i, j).to_string(),
                value,
                agrees,
            ]);
        }
    }
    let passed = rep.brute_equals_path && rep.vanishing_ok && rep.band_ok;
    let result = json!({
        "size": size,
        "brute": to_value(&rep.brute)?,
        "brute_equals_path": rep.brute_equals_path,
        "vanishing_ok": rep.vanishing_ok,
        "band_ok": rep.band_ok,
        "published_entries": rep.published.len(),
        "published_agreeing": rep.published_agreeing,
    });
    let mut r = report("xn", result, table, passed);
    r.n = Some(n);
    Ok(r)
}
