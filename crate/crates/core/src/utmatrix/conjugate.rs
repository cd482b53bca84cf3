//! Solving `U B = C U` for an invertible upper-triangular `U`.
//!
//! The diagonal of `U` is tied to its superdiagonal by
//! `U[j][j] = 1 + sum_{m=1..j} (9^m - 9^(m-1)) U[m-1][m]`, which makes the
//! diagonal and superdiagonal equations hold identically. Every other entry
//! `(s, t)` with `t >= s + 2` gives one affine equation in the strictly upper
//! entries of `U`. Equation `(s, t)` contains `U[s][t-1]` with coefficient
//! `1 + (even)`, so reading unknowns from the last column backwards the system
//! is unitriangular modulo 2 and elimination always finds an odd pivot. The
//! last column is left free and set to zero.

use super::UTMatrix;
use crate::dyadic::Z2Residue;
use crate::error::{Error, Result};

/// Index of the strictly-upper unknown `(s, t)` in row-major order.
struct Unknowns {
    n: usize,
}

impl Unknowns {
    fn count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    fn index(&self, s: usize, t: usize) -> usize {
        debug_assert!(s < t && t < self.n);
        // Rows 0..s contribute (n-1) + (n-2) + ... + (n-s) unknowns.
        s * (2 * self.n - s - 1) / 2 + (t - s - 1)
    }
}

/// `constant + sum coeffs[i] * x_i` over `Z/2^N`.
#[derive(Clone)]
struct Affine {
    coeffs: Vec<Z2Residue>,
    constant: Z2Residue,
}

impl Affine {
    fn zero(len: usize, bits: u32) -> Self {
        Affine {
            coeffs: vec![Z2Residue::zero(bits); len],
            constant: Z2Residue::zero(bits),
        }
    }

    fn add_scaled(&mut self, other: &Affine, s: &Z2Residue) {
        if s.is_zero() {
            return;
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a = &*a + &(b * s);
            }
        }
        self.constant = &self.constant + &(&other.constant * s);
    }

    fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.iter().all(Z2Residue::is_zero)
    }
}

/// Symbolic entries of `U`: strict upper entries are unknowns, diagonal
/// entries follow the ansatz, the lower part is zero.
struct SymbolicU {
    bits: u32,
    unknowns: Unknowns,
    diagonal: Vec<Affine>,
}

impl SymbolicU {
    fn new(n: usize, bits: u32) -> Self {
        let unknowns = Unknowns { n };
        let len = unknowns.count();
        let nine = Z2Residue::from_u64(9, bits);
        let mut diagonal = Vec::with_capacity(n);
        let mut current = Affine::zero(len, bits);
        current.constant = Z2Residue::one(bits);
        let mut prev_pow = Z2Residue::one(bits);
        diagonal.push(current.clone());
        for j in 1..n {
            let pow = &prev_pow * &nine;
            let idx = unknowns.index(j - 1, j);
            current.coeffs[idx] = &current.coeffs[idx] + &(&pow - &prev_pow);
            diagonal.push(current.clone());
            prev_pow = pow;
        }
        SymbolicU {
            bits,
            unknowns,
            diagonal,
        }
    }

    /// Adds `s * U[i][j]` to `acc`.
    fn accumulate(&self, acc: &mut Affine, i: usize, j: usize, s: &Z2Residue) {
        if s.is_zero() || j < i {
            return;
        }
        if i == j {
            acc.add_scaled(&self.diagonal[i], s);
        } else {
            let idx = self.unknowns.index(i, j);
            acc.coeffs[idx] = &acc.coeffs[idx] + s;
        }
    }

    /// `(U B - C U)[s][t]` as an affine form.
    fn equation(&self, c: &UTMatrix, s: usize, t: usize) -> Affine {
        let mut eq = Affine::zero(self.unknowns.count(), self.bits);
        let one = Z2Residue::one(self.bits);
        let nine_t = Z2Residue::nine_pow(t as u32, self.bits);
        // (U B)[s][t] = U[s][t] 9^t + U[s][t-1]
        self.accumulate(&mut eq, s, t, &nine_t);
        if t > s {
            self.accumulate(&mut eq, s, t - 1, &one);
        }
        // (C U)[s][t] = sum_{r=s..t} C[s][r] U[r][t]
        for r in s..=t {
            self.accumulate(&mut eq, r, t, &(-c.get(s, r)));
        }
        eq
    }
}

fn check_hypothesis(c: &UTMatrix) -> Result<()> {
    let bits = c.mod2exp();
    let mut pow = Z2Residue::one(bits);
    let nine = Z2Residue::from_u64(9, bits);
    for k in 0..c.size() {
        if c.get(k, k) != &pow {
            return Err(Error::HypothesisViolation(format!("diagonal entry {k} is not 9^{k}")));
        }
        if k + 1 < c.size() && c.get(k, k + 1) != &Z2Residue::one(bits) {
            return Err(Error::HypothesisViolation(format!(
                "superdiagonal entry ({k}, {}) is not 1",
                k + 1
            )));
        }
        pow = &pow * &nine;
    }
    Ok(())
}

/// True when the diagonal and superdiagonal equations of `U B = C U` vanish
/// identically under the diagonal ansatz.
pub fn diagonal_ansatz_holds(c: &UTMatrix) -> bool {
    let n = c.size();
    if n == 0 {
        return true;
    }
    let sym = SymbolicU::new(n, c.mod2exp());
    (0..n).all(|s| sym.equation(c, s, s).is_zero() && (s + 1 >= n || sym.equation(c, s, s + 1).is_zero()))
}

/// Returns an invertible upper-triangular `U` with `U B = C U` modulo `2^N`.
///
/// `c` must have diagonal `9^k` and superdiagonal `1`. Free parameters (the
/// last column of `U`) are set to zero, so the output is deterministic.
pub fn conjugate_solve(c: &UTMatrix) -> Result<UTMatrix> {
    check_hypothesis(c)?;
    let n = c.size();
    let bits = c.mod2exp();
    if n <= 1 {
        return Ok(UTMatrix::identity(n, bits));
    }
    if !diagonal_ansatz_holds(c) {
        return Err(Error::HypothesisViolation("diagonal ansatz does not close".into()));
    }
    let sym = SymbolicU::new(n, bits);

    // Pivot unknowns are U[s][t-1] for t >= s + 2, i.e. every strict upper
    // unknown outside the last column. Order them from the last column back.
    let mut order: Vec<(usize, usize)> = Vec::new();
    for col in (1..n - 1).rev() {
        for s in (0..col).rev() {
            order.push((s, col));
        }
    }
    let vars: Vec<usize> = order.iter().map(|&(s, t)| sym.unknowns.index(s, t)).collect();

    // Dense system restricted to pivot unknowns: rows[e] . x = rhs[e].
    let mut rows: Vec<Vec<Z2Residue>> = Vec::new();
    let mut rhs: Vec<Z2Residue> = Vec::new();
    for t in 2..n {
        for s in 0..t - 1 {
            let eq = sym.equation(c, s, t);
            rows.push(vars.iter().map(|&v| eq.coeffs[v].clone()).collect());
            rhs.push(-&eq.constant);
        }
    }
    debug_assert_eq!(rows.len(), vars.len());

    let m = vars.len();
    let mut pivot_rows = Vec::with_capacity(m);
    let mut used = vec![false; rows.len()];
    for col in 0..m {
        let p = (0..rows.len())
            .find(|&r| !used[r] && rows[r][col].is_unit())
            .ok_or_else(|| {
                let (s, t) = order[col];
                Error::NonUnitPivot {
                    unknown: format!("U[{s}][{t}]"),
                }
            })?;
        used[p] = true;
        let inv = rows[p][col].inv()?;
        for x in rows[p].iter_mut().skip(col) {
            *x = &*x * &inv;
        }
        rhs[p] = &rhs[p] * &inv;
        let pivot_row = rows[p].clone();
        let pivot_rhs = rhs[p].clone();
        for r in 0..rows.len() {
            if used[r] || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for (x, y) in rows[r].iter_mut().zip(&pivot_row).skip(col) {
                if !y.is_zero() {
                    *x = &*x - &(y * &factor);
                }
            }
            rhs[r] = &rhs[r] - &(&pivot_rhs * &factor);
        }
        pivot_rows.push(p);
    }

    // Back substitution; pivot rows are upper unitriangular in `order`.
    let mut solution = vec![Z2Residue::zero(bits); m];
    for col in (0..m).rev() {
        let p = pivot_rows[col];
        let mut acc = rhs[p].clone();
        for k in col + 1..m {
            let a = &rows[p][k];
            if !a.is_zero() {
                acc = &acc - &(a * &solution[k]);
            }
        }
        solution[col] = acc;
    }

    let mut values = vec![Z2Residue::zero(bits); sym.unknowns.count()];
    for (col, &v) in vars.iter().enumerate() {
        values[v] = solution[col].clone();
    }
    let mut u = UTMatrix::zero(n, bits);
    for j in 0..n {
        let d = &sym.diagonal[j];
        let mut value = d.constant.clone();
        for (coeff, x) in d.coeffs.iter().zip(&values) {
            if !coeff.is_zero() {
                value = &value + &(coeff * x);
            }
        }
        u.set(j, j, value);
        for i in 0..j {
            u.set(i, j, values[sym.unknowns.index(i, j)].clone());
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utmatrix::{build_b, build_c, mat_inv, mat_mul, similarity_check};
    use std::collections::BTreeMap;

    const N: u32 = 128;

    fn r(x: i64) -> Z2Residue {
        Z2Residue::from_i64(x, N)
    }

    #[test]
    fn unknown_indexing_is_a_bijection() {
        for n in 1..12 {
            let u = Unknowns { n };
            let mut seen = vec![false; u.count()];
            for s in 0..n {
                for t in s + 1..n {
                    let i = u.index(s, t);
                    assert!(!seen[i]);
                    seen[i] = true;
                }
            }
            assert!(seen.into_iter().all(|x| x));
        }
    }

    #[test]
    fn b_is_its_own_normal_form() {
        for n in 1..8 {
            let b = build_b(n, N);
            let u = conjugate_solve(&b).unwrap();
            assert!(similarity_check(&u, &b).unwrap());
            assert!(similarity_check(&UTMatrix::identity(n, N), &b).unwrap());
        }
    }

    #[test]
    fn three_by_three_example() {
        let c = build_c(3, N, &BTreeMap::from([((0, 2), r(5))])).unwrap();
        let u = conjugate_solve(&c).unwrap();
        assert!(similarity_check(&u, &c).unwrap());
        let conj = mat_mul(&mat_mul(&mat_inv(&u).unwrap(), &c).unwrap(), &u).unwrap();
        assert_eq!(conj, build_b(3, N));
    }

    #[test]
    fn diagonal_ansatz_closes_on_hypothesis_class() {
        let c = build_c(6, N, &BTreeMap::from([((0, 3), r(7)), ((1, 5), r(-3))])).unwrap();
        assert!(diagonal_ansatz_holds(&c));
    }

    #[test]
    fn rejects_inputs_outside_hypothesis_class() {
        let mut c = build_b(4, N);
        c.set(1, 2, r(3));
        assert!(matches!(conjugate_solve(&c), Err(Error::HypothesisViolation(_))));
        let mut c = build_b(4, N);
        c.set(2, 2, r(80));
        assert!(matches!(conjugate_solve(&c), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn deterministic_output() {
        let c = build_c(7, N, &BTreeMap::from([((0, 2), r(11)), ((2, 6), r(4))])).unwrap();
        assert_eq!(conjugate_solve(&c).unwrap(), conjugate_solve(&c).unwrap());
        let u = conjugate_solve(&c).unwrap();
        // The free last column is zero above the diagonal.
        assert!((0..6).all(|i| u.get(i, 6).is_zero()));
        assert!(u.diagonal_entries().iter().all(Z2Residue::is_unit));
    }
}
