//! The full suite behind `verify-paper`.

use serde::Serialize;

use psi3_core::cring::{
    f_element, psi3_apply, psi3_f_published, psi3_f_recurrence, psi3_matrices, sub_entry_checks, top_column_checks,
    SubEntryCase,
};
use psi3_core::dyadic::{DyadicRational, Z2Residue};
use psi3_core::exec::{self, Execution};
use psi3_core::pipeline::{
    end_to_end_sweep, extract_a_with, normalize_d, sample_c, xn_formula_path, xn_product, xn_report, PipelineParams,
    Psi3Tables,
};
use psi3_core::utmatrix::{conjugate_solve, diagonal_ansatz_holds, similarity_check};
use psi3_core::valuations::{factorial_reports, iota_product_reports, nine_pow_reports, two_power_reports};

use crate::args::Format;
use crate::error::CliError;
use crate::output::{to_value, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Two printed variants compared against ground truth; never fails the run.
    Deviation,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub check: &'static str,
    pub scope: String,
    pub status: Status,
    pub detail: String,
}

fn row(check: &'static str, scope: String, ok: bool, detail: String) -> Row {
    Row {
        check,
        scope,
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn count(ok: usize, total: usize) -> String {
    format!("{ok}/{total} agree")
}

fn valuation_rows(mode: Execution) -> Vec<Row> {
    let tally = |rs: &[psi3_core::valuations::ValuationReport]| (rs.iter().filter(|r| r.agree).count(), rs.len());
    let cases = [
        (
            "nu2(9^l - 1) = nu2(l) + 3",
            "1 <= l <= 4096",
            nine_pow_reports(4096, mode),
        ),
        ("nu2(9^(2^n) - 1) = n + 3", "0 <= n <= 12", two_power_reports(12, mode)),
        ("nu2(l!) = l - alpha(l)", "0 <= l <= 512", factorial_reports(512, mode)),
        (
            "nu2(prod (9^l - 9^(i-1))) = 4l - alpha(l)",
            "1 <= l <= 512",
            iota_product_reports(512, mode),
        ),
    ];
    cases
        .into_iter()
        .map(|(check, scope, rs)| {
            let (ok, total) = tally(&rs);
            row(check, scope.into(), ok == total, count(ok, total))
        })
        .collect()
}

fn ring_rows(max_degree: u32, mode: Execution) -> Result<Vec<Row>, CliError> {
    let scope = format!("1 <= k <= {max_degree}");
    let ks: Vec<u32> = (1..=max_degree).collect();
    let half = DyadicRational::pow2(-1);
    let sharp = exec::map(mode, (0..=max_degree).collect(), |k| {
        let f = f_element(k);
        f.is_integral() && !f.scale(&half).is_integral()
    });
    let sharp_ok = sharp.iter().filter(|&&b| b).count();

    let published = exec::map(mode, ks.clone(), |k| psi3_apply(&f_element(k)) == psi3_f_published(k));
    let recurrence = exec::map(mode, ks.clone(), |k| psi3_apply(&f_element(k)) == psi3_f_recurrence(k));
    let pub_ok = published.iter().filter(|&&b| b).count();
    let rec_ok = recurrence.iter().filter(|&&b| b).count();

    let matrices = psi3_matrices(0..=max_degree, mode)?;
    let tops = top_column_checks(&matrices);
    let subs = sub_entry_checks(&matrices);
    let top_ok = tops.iter().filter(|t| t.matches_published).count();
    let top_exp_ok = tops.iter().filter(|t| t.matches_published_exponent).count();
    let printed: Vec<_> = subs.iter().filter(|s| s.case != SubEntryCase::Deep).collect();
    let sub_ok = printed.iter().filter(|s| s.matches_published == Some(true)).count();
    let sub_exp_ok = printed
        .iter()
        .filter(|s| s.matches_published_exponent == Some(true))
        .count();
    let deep: Vec<_> = subs.iter().filter(|s| s.case == SubEntryCase::Deep).collect();
    let deep_l = deep.iter().filter(|s| s.matches_l_variant() == Some(true)).count();
    let deep_k = deep.iter().filter(|s| s.matches_k_variant() == Some(true)).count();

    Ok(vec![
        row(
            "f_4k integral and f_4k / 2 not integral",
            format!("0 <= k <= {max_degree}"),
            sharp_ok == sharp.len(),
            count(sharp_ok, sharp.len()),
        ),
        row(
            "psi3(f_4k) = 9^k f_4k + 9^(k-1) u^2 2^(nu2(k)+1) f_4k-4",
            scope.clone(),
            pub_ok == ks.len(),
            count(pub_ok, ks.len()),
        ),
        row(
            "psi3(f_4k) = 9^k f_4k + u^2 2^(nu2(k)+1) f_4k-4",
            scope.clone(),
            rec_ok == ks.len(),
            count(rec_ok, ks.len()),
        ),
        row(
            "psi3 on g_4k,4k: diagonal 9^k, quoted sub-entry",
            format!("0 <= k <= {max_degree}"),
            top_ok == tops.len(),
            count(top_ok, tops.len()),
        ),
        row(
            "psi3 on g_4k,4l, l < k: quoted sub-entry 9^(l-1) 2^e",
            scope.clone(),
            sub_ok == printed.len(),
            count(sub_ok, printed.len()),
        ),
        row(
            "psi3 sub-entries: 2-adic valuation as quoted",
            scope.clone(),
            top_exp_ok == tops.len() && sub_exp_ok == printed.len(),
            count(top_exp_ok + sub_exp_ok, tops.len() + printed.len()),
        ),
        Row {
            check: "psi3 deep sub-entry exponent: 3 + nu2(l) vs 3 + nu2(k)",
            scope,
            status: Status::Deviation,
            detail: format!(
                "3 + nu2(l) matches {deep_l}/{n}, 3 + nu2(k) matches {deep_k}/{n}",
                n = deep.len()
            ),
        },
    ])
}

fn pipeline_rows(n: usize, seeds: &[u64], mod2exp: u32, mode: Execution) -> Result<Vec<Row>, CliError> {
    let scope = format!("n = {n}, {} seeds", seeds.len());
    let tables = Psi3Tables::new(n, mode)?;
    let nine = |k: usize| Z2Residue::nine_pow(k as u32, mod2exp);
    let extraction = exec::map(mode, seeds.to_vec(), |seed| {
        let p = PipelineParams::sample(n, seed, mod2exp);
        let a = extract_a_with(&p, &tables).ok()?;
        let shape = (0..n).all(|k| a.get(k, k) == &nine(k)) && a.superdiagonal().iter().all(Z2Residue::is_unit);
        let closed = n < 2 || {
            let expected = &(p.lambda(1, 1) - &p.lambda(1, 0).shl(3)) * &p.mu(1, 0).inv().ok()?;
            a.get(0, 1) == &expected
        };
        let normal = normalize_d(&a).ok().is_some_and(|(_, c)| {
            c.superdiagonal().iter().all(|x| x == &Z2Residue::one(mod2exp)) && diagonal_ansatz_holds(&c)
        });
        Some((shape, closed, normal))
    });
    let tally = |f: fn(&(bool, bool, bool)) -> bool| extraction.iter().filter(|r| r.as_ref().is_some_and(f)).count();
    let (shape, closed, normal) = (tally(|r| r.0), tally(|r| r.1), tally(|r| r.2));

    let e2e = end_to_end_sweep(n, seeds, mod2exp, mode)?;
    let e2e_ok = e2e.iter().filter(|r| r.as_ref().is_ok_and(|r| r.check)).count();

    let size = 2 * n;
    let random_c = exec::map(mode, seeds.to_vec(), |seed| {
        let c = sample_c(size, seed, mod2exp);
        conjugate_solve(&c)
            .and_then(|u| similarity_check(&u, &c))
            .unwrap_or(false)
    });
    let c_ok = random_c.iter().filter(|&&b| b).count();
    let total = seeds.len();

    Ok(vec![
        row(
            "extracted A: diagonal 9^k, odd superdiagonal",
            scope.clone(),
            shape == total,
            count(shape, total),
        ),
        row(
            "extracted A: A_0,1 = mu^-1 (lambda_1,1 - 8 lambda_1,0)",
            scope.clone(),
            closed == total,
            count(closed, total),
        ),
        row(
            "D A D^-1: unit superdiagonal, solver input class",
            scope.clone(),
            normal == total,
            count(normal, total),
        ),
        row(
            "A conjugate to B end to end",
            scope,
            e2e_ok == total,
            count(e2e_ok, total),
        ),
        row(
            "random C conjugate to B",
            format!("size = {size}, {total} seeds"),
            c_ok == total,
            count(c_ok, total),
        ),
    ])
}

fn xn_rows(n: usize, mod2exp: u32, mode: Execution) -> Result<Vec<Row>, CliError> {
    let ns: Vec<usize> = (1..=n).collect();
    let size = 2 * n;
    let reports = exec::try_map(mode, ns.clone(), |k| xn_report(k, size, mod2exp))?;
    let vanish = reports.iter().filter(|r| r.vanishing_ok && r.band_ok).count();
    let path = reports.iter().filter(|r| r.brute_equals_path).count();
    let diag = exec::try_map(mode, ns.clone(), |k| {
        let x = xn_product(k, size, mod2exp)?;
        (0..size).try_fold(true, |ok, s| {
            let expected = (1..=k).fold(Z2Residue::one(mod2exp), |acc, u| {
                &acc * &(&Z2Residue::nine_pow(s as u32, mod2exp) - &Z2Residue::nine_pow(u as u32 - 1, mod2exp))
            });
            Ok::<_, psi3_core::Error>(
                ok && x.get(s, s) == &expected && xn_formula_path(s + 1, 0, k, mod2exp)? == expected,
            )
        })
    })?;
    let diag_ok = diag.iter().filter(|&&b| b).count();
    let agreeing: usize = reports.iter().map(|r| r.published_agreeing).sum();
    let entries: usize = reports.iter().map(|r| r.published.len()).sum();
    let x2 = xn_product(2, 4, mod2exp)?;
    let spot = x2.get(1, 2) == &Z2Residue::from_u64(80, mod2exp) && x2.get(0, 2) == &Z2Residue::one(mod2exp);
    let scope = format!("1 <= n <= {n}, size 2n");
    Ok(vec![
        row(
            "X_n: first n columns vanish",
            scope.clone(),
            vanish == n,
            count(vanish, n),
        ),
        row(
            "X_n: step/stay path sum equals product",
            scope.clone(),
            path == n,
            count(path, n),
        ),
        row(
            "X_n: diagonal prod (9^(s-1) - 9^(u-1))",
            scope.clone(),
            diag_ok == n,
            count(diag_ok, n),
        ),
        row(
            "X_2 entries (1,2) = 80 and (0,2) = 1",
            "0-based".into(),
            spot,
            String::new(),
        ),
        Row {
            check: "X_n: quoted closed form for entry (s, s+t)",
            scope,
            status: Status::Deviation,
            detail: format!("{agreeing}/{entries} entries agree with the product"),
        },
    ])
}

pub fn run(n: usize, seeds: u64, max_degree: u32, mod2exp: u32, mode: Execution) -> Result<Report, CliError> {
    let seed_list: Vec<u64> = (0..seeds).collect();
    let mut rows = valuation_rows(mode);
    rows.extend(ring_rows(max_degree, mode)?);
    rows.extend(pipeline_rows(n, &seed_list, mod2exp, mode)?);
    rows.extend(xn_rows(n, mod2exp, mode)?);

    let passed = rows.iter().all(|r| r.status != Status::Fail);
    let mut table = Table::new(vec!["check", "scope", "status", "detail"]);
    for r in &rows {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Deviation => "deviation",
        };
        table.push(vec![r.check.into(), r.scope.clone(), status.into(), r.detail.clone()]);
    }
    Ok(Report {
        command: "verify-paper",
        n: Some(n),
        seeds: seed_list,
        result: serde_json::json!({ "max_degree": max_degree, "rows": to_value(&rows)? }),
        table,
        default_format: Format::Table,
        passed,
    })
}
