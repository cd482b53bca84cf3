use serde::Serialize;

use crate::dyadic::Z2Residue;
use crate::error::{Error, Result};
use crate::utmatrix::{build_b, mat_mul, UTMatrix};

/// `B_u = B - 9^{u-1} I`.
pub fn build_bu(u: usize, size: usize, mod2exp: u32) -> Result<UTMatrix> {
    if u == 0 {
        return Err(Error::ZeroInput);
    }
    Ok(build_b(size, mod2exp).sub_scalar(&Z2Residue::nine_pow(u as u32 - 1, mod2exp)))
}

/// Left-to-right product of `B_u` over the given `u`.
pub fn bu_product(us: &[usize], size: usize, mod2exp: u32) -> Result<UTMatrix> {
    let mut acc = UTMatrix::identity(size, mod2exp);
    for &u in us {
        acc = mat_mul(&acc, &build_bu(u, size, mod2exp)?)?;
    }
    Ok(acc)
}

/// `X_n = B_1 B_2 ... B_n`, the matrix of `1 ^ (psi3 - 1)(psi3 - 9)...(psi3 - 9^{n-1})`.
pub fn xn_product(n: usize, size: usize, mod2exp: u32) -> Result<UTMatrix> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if size < n {
        return Err(Error::SizeTooSmall { size, n });
    }
    bu_product(&(1..=n).collect::<Vec<_>>(), size, mod2exp)
}

/// True iff the first `n` columns of `X_n` vanish.
pub fn xn_vanishing_check(n: usize, size: usize, mod2exp: u32) -> Result<bool> {
    let x = xn_product(n, size, mod2exp)?;
    Ok((0..n).all(|j| x.column_is_zero(j)))
}

fn nine_diff(a: u32, b: u32, bits: u32) -> Z2Residue {
    &Z2Residue::nine_pow(a, bits) - &Z2Residue::nine_pow(b, bits)
}

/// Increasing `t`-subsets of `1..=n`, in lexicographic order.
fn subsets(n: usize, t: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for u in start..=n {
            if n - u + 1 < t - cur.len() {
                break;
            }
            cur.push(u);
            go(u + 1, n, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if t <= n {
        go(1, n, t, &mut Vec::new(), &mut out);
    }
    out
}

/// Entry `(s, s + t)` of `X_n` (1-based row `s`) as a sum over step
/// positions: factor `u` of the product either steps right along the
/// superdiagonal (weight 1) or stays on the diagonal at the current row,
/// contributing `9^{s-1+c(u)} - 9^{u-1}` with `c(u)` the number of earlier steps.
pub fn xn_formula_path(s: usize, t: usize, n: usize, mod2exp: u32) -> Result<Z2Residue> {
    if s == 0 || n == 0 {
        return Err(Error::ZeroInput);
    }
    let mut total = Z2Residue::zero(mod2exp);
    for steps in subsets(n, t) {
        let mut term = Z2Residue::one(mod2exp);
        let mut c = 0;
        for u in 1..=n {
            if steps.get(c) == Some(&u) {
                c += 1;
            } else {
                term = &term * &nine_diff((s - 1 + c) as u32, (u - 1) as u32, mod2exp);
            }
        }
        total = &total + &term;
    }
    Ok(total)
}

/// `prod_{j=lo}^{hi} (9^e - 9^{j-1})`, empty when `hi < lo`.
fn range_product(e: usize, lo: i64, hi: i64, bits: u32) -> Z2Residue {
    (lo.max(1)..=hi).fold(Z2Residue::one(bits), |acc, j| {
        &acc * &nine_diff(e as u32, (j - 1) as u32, bits)
    })
}

/// The published closed form for entry `(s, s + t)` of `X_n`, evaluated as
/// printed. It disagrees with the product in general and is only ever
/// compared, never trusted. With a single index the last-factor form is
/// used.
pub fn xn_formula_published(s: usize, t: usize, n: usize, mod2exp: u32) -> Result<Z2Residue> {
    if s == 0 || t == 0 || n == 0 {
        return Err(Error::ZeroInput);
    }
    if t > n {
        return Err(Error::IndexRange(format!("t = {t} exceeds n = {n}")));
    }
    let n_ = n as i64;
    let mut total = Z2Residue::zero(mod2exp);
    for ks in subsets(n, t) {
        let ks: Vec<i64> = ks.into_iter().map(|k| k as i64).collect();
        let mut term = Z2Residue::one(mod2exp);
        for m in 1..=t {
            let k = ks[m - 1];
            let factor = if m == t {
                range_product(s + t + 1, 1, n_ - k - 1, mod2exp)
            } else if m == 1 {
                range_product(s - 1, n_ - k + 1, n_, mod2exp)
            } else {
                range_product(s + m - 2, n_ - k + 1, n_ - ks[m - 2] - 1, mod2exp)
            };
            term = &term * &factor;
        }
        total = &total + &term;
    }
    Ok(total)
}

/// Published formula against the product at one entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PublishedEntry {
    /// 0-based position in `X_n`.
    pub row: usize,
    pub col: usize,
    /// 1-based row index and offset used by the formula.
    pub s: usize,
    pub t: usize,
    pub published: Z2Residue,
    pub brute: Z2Residue,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct XnReport {
    pub n: usize,
    pub size: usize,
    pub mod2exp: u32,
    pub brute: UTMatrix,
    pub formula_path: UTMatrix,
    pub brute_equals_path: bool,
    /// First `n` columns vanish.
    pub vanishing_ok: bool,
    /// Entries more than `n` above the diagonal vanish.
    pub band_ok: bool,
    pub published: Vec<PublishedEntry>,
    pub published_agreeing: usize,
}

pub fn xn_report(n: usize, size: usize, mod2exp: u32) -> Result<XnReport> {
    let brute = xn_product(n, size, mod2exp)?;
    let mut path = UTMatrix::zero(size, mod2exp);
    let mut published = Vec::new();
    for row in 0..size {
        for col in row..size {
            let (s, t) = (row + 1, col - row);
            path.set(row, col, xn_formula_path(s, t, n, mod2exp)?);
            if (1..=n).contains(&t) {
                let value = xn_formula_published(s, t, n, mod2exp)?;
                let b = brute.get(row, col).clone();
                published.push(PublishedEntry {
                    row,
                    col,
                    s,
                    t,
                    agrees: value == b,
                    published: value,
                    brute: b,
                });
            }
        }
    }
    let band_ok = (0..size).all(|i| (i + n + 1..size).all(|j| brute.get(i, j).is_zero()));
    let vanishing_ok = (0..n.min(size)).all(|j| brute.column_is_zero(j));
    let published_agreeing = published.iter().filter(|e| e.agrees).count();
    Ok(XnReport {
        n,
        size,
        mod2exp,
        brute_equals_path: brute == path,
        formula_path: path,
        brute,
        vanishing_ok,
        band_ok,
        published,
        published_agreeing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u32 = 128;

    fn r(x: i64) -> Z2Residue {
        Z2Residue::from_i64(x, N)
    }

    #[test]
    fn bu_examples() {
        let b1 = build_bu(1, 2, N).unwrap();
        assert_eq!(b1.rows(), vec![vec![r(0), r(1)], vec![r(0), r(8)]]);
        let b2 = build_bu(2, 2, N).unwrap();
        assert_eq!(b2.rows(), vec![vec![r(-8), r(1)], vec![r(0), r(0)]]);
        let b3 = build_bu(3, 3, N).unwrap();
        assert_eq!(b3.diagonal_entries(), vec![r(-80), r(-72), r(0)]);
        assert_eq!(b3.superdiagonal(), vec![r(1), r(1)]);
        assert_eq!(build_bu(0, 2, N), Err(Error::ZeroInput));
    }

    #[test]
    fn xn_examples() {
        assert_eq!(xn_product(1, 2, N).unwrap(), build_bu(1, 2, N).unwrap());
        let x2 = xn_product(2, 4, N).unwrap();
        assert_eq!(x2.get(1, 2), &r(80));
        assert_eq!(x2.get(0, 2), &r(1));
        assert!(x2.column_is_zero(0) && x2.column_is_zero(1));
        assert_eq!(xn_product(3, 2, N), Err(Error::SizeTooSmall { size: 2, n: 3 }));
    }

    #[test]
    fn vanishing() {
        assert!(xn_vanishing_check(1, 4, N).unwrap());
        assert!(xn_vanishing_check(2, 6, N).unwrap());
        for n in 1..=10 {
            assert!(xn_vanishing_check(n, 2 * n, N).unwrap(), "n = {n}");
        }
        let skip_first = bu_product(&[2, 3], 4, N).unwrap();
        assert_eq!(skip_first.get(0, 0), &r((1 - 9) * (1 - 81)));
        assert!(!skip_first.column_is_zero(0));
    }

    #[test]
    fn path_examples() {
        assert_eq!(xn_formula_path(1, 0, 1, N).unwrap(), r(0));
        assert_eq!(xn_formula_path(2, 1, 2, N).unwrap(), r(80));
        assert_eq!(xn_formula_path(1, 2, 2, N).unwrap(), r(1));
        assert_eq!(xn_formula_path(1, 3, 2, N).unwrap(), r(0));
    }

    #[test]
    fn path_formula_matches_product() {
        for n in 1..=8 {
            let x = xn_product(n, 16, N).unwrap();
            for row in 0..16 {
                for col in row..16 {
                    assert_eq!(&xn_formula_path(row + 1, col - row, n, N).unwrap(), x.get(row, col));
                }
            }
        }
    }

    #[test]
    fn diagonal_product_identity() {
        for n in 1..=6 {
            let x = xn_product(n, 12, N).unwrap();
            for s in 1..=12usize {
                let expected = (1..=n).fold(r(1), |acc, u| &acc * &nine_diff(s as u32 - 1, u as u32 - 1, N));
                assert_eq!(x.get(s - 1, s - 1), &expected);
            }
        }
    }

    #[test]
    fn commuting_family() {
        let b = build_b(10, N);
        for n in 1..=5 {
            let xn = xn_product(n, 10, N).unwrap();
            assert_eq!(mat_mul(&xn, &b).unwrap(), mat_mul(&b, &xn).unwrap());
            for m in 1..=5 {
                let xm = xn_product(m, 10, N).unwrap();
                assert_eq!(mat_mul(&xn, &xm).unwrap(), mat_mul(&xm, &xn).unwrap());
            }
        }
    }

    #[test]
    fn published_formula_single_index() {
        assert_eq!(xn_formula_published(1, 1, 1, N).unwrap(), r(1));
        assert!(xn_formula_published(1, 3, 2, N).is_err());
    }

    #[test]
    fn report_is_consistent() {
        let rep = xn_report(3, 8, N).unwrap();
        assert!(rep.brute_equals_path && rep.vanishing_ok && rep.band_ok);
        assert_eq!(
            rep.published.len(),
            (0..8).map(|i: usize| (7 - i).min(3)).sum::<usize>()
        );
        assert!(rep.published.iter().all(|e| e.agrees == (e.published == e.brute)));
    }
}
