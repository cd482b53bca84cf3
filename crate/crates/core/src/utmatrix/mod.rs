//! Truncated upper-triangular matrices over `Z/2^N`.
//!
//! An `n x n` [`UTMatrix`] is the leading principal block of an infinite
//! upper-triangular matrix. Products and inverses of upper-triangular
//! matrices restrict to leading blocks, so finite truncations are exact.
//! Indices are 0-based: entry `(i, j)` is row `i + 1`, column `j + 1` in the
//! usual 1-based labelling.

mod conjugate;

pub use conjugate::{conjugate_solve, diagonal_ansatz_holds};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dyadic::{parse_residue_value, Z2Residue};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct UTMatrix {
    size: usize,
    mod2exp: u32,
    // Row-major, full square storage; the strictly lower part stays zero.
    entries: Vec<Z2Residue>,
}

impl UTMatrix {
    pub fn zero(size: usize, mod2exp: u32) -> Self {
        UTMatrix {
            size,
            mod2exp,
            entries: vec![Z2Residue::zero(mod2exp); size * size],
        }
    }

    pub fn identity(size: usize, mod2exp: u32) -> Self {
        let mut m = Self::zero(size, mod2exp);
        for i in 0..size {
            m.set(i, i, Z2Residue::one(mod2exp));
        }
        m
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(diag: &[Z2Residue], mod2exp: u32) -> Self {
        let mut m = Self::zero(diag.len(), mod2exp);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.with_mod2exp(mod2exp));
        }
        m
    }

    /// Builds a matrix from dense rows; entries below the diagonal must be zero.
    pub fn from_rows(rows: Vec<Vec<Z2Residue>>, mod2exp: u32) -> Result<Self> {
        let size = rows.len();
        let mut m = Self::zero(size, mod2exp);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::SizeMismatch(format!(
                    "row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            for (j, x) in row.into_iter().enumerate() {
                if x.mod2exp() != mod2exp {
                    return Err(Error::SizeMismatch(format!(
                        "entry ({i}, {j}) is mod 2^{}, expected 2^{mod2exp}",
                        x.mod2exp()
                    )));
                }
                if j < i {
                    if !x.is_zero() {
                        return Err(Error::InvalidParameter(format!(
                            "entry ({i}, {j}) below the diagonal is nonzero"
                        )));
                    }
                } else {
                    m.set(i, j, x);
                }
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn mod2exp(&self) -> u32 {
        self.mod2exp
    }

    pub fn get(&self, i: usize, j: usize) -> &Z2Residue {
        &self.entries[i * self.size + j]
    }

    /// Writes an on-or-above-diagonal entry. Panics below the diagonal.
    pub fn set(&mut self, i: usize, j: usize, x: Z2Residue) {
        assert!(j >= i, "({i}, {j}) is below the diagonal");
        debug_assert_eq!(x.mod2exp(), self.mod2exp);
        self.entries[i * self.size + j] = x;
    }

    pub fn rows(&self) -> Vec<Vec<Z2Residue>> {
        self.entries
            .chunks(self.size.max(1))
            .take(self.size)
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn diagonal_entries(&self) -> Vec<Z2Residue> {
        (0..self.size).map(|i| self.get(i, i).clone()).collect()
    }

    /// Entries `(i, i+1)`.
    pub fn superdiagonal(&self) -> Vec<Z2Residue> {
        (1..self.size).map(|i| self.get(i - 1, i).clone()).collect()
    }

    pub fn leading_block(&self, m: usize) -> Self {
        assert!(m <= self.size);
        let mut out = Self::zero(m, self.mod2exp);
        for i in 0..m {
            for j in i..m {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn with_mod2exp(&self, mod2exp: u32) -> Self {
        UTMatrix {
            size: self.size,
            mod2exp,
            entries: self.entries.iter().map(|x| x.with_mod2exp(mod2exp)).collect(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.size != other.size || self.mod2exp != other.mod2exp {
            return Err(Error::SizeMismatch(format!(
                "{}x{} mod 2^{} against {}x{} mod 2^{}",
                self.size, self.size, self.mod2exp, other.size, other.size, other.mod2exp
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(UTMatrix {
            entries,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(UTMatrix {
            entries,
            ..self.clone()
        })
    }

    /// `self - s * I`.
    pub fn sub_scalar(&self, s: &Z2Residue) -> Self {
        let mut out = self.clone();
        for i in 0..self.size {
            out.set(i, i, self.get(i, i) - s);
        }
        out
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.get(i, j).is_zero()))
    }

    /// Every entry in column `j` is zero.
    pub fn column_is_zero(&self, j: usize) -> bool {
        (0..self.size).all(|i| self.get(i, j).is_zero())
    }
}

/// Product of two upper-triangular matrices; only `i <= k <= j` contributes.
pub fn mat_mul(x: &UTMatrix, y: &UTMatrix) -> Result<UTMatrix> {
    x.check_compatible(y)?;
    let n = x.size;
    let mut out = UTMatrix::zero(n, x.mod2exp);
    for i in 0..n {
        for j in i..n {
            let mut acc = Z2Residue::zero(x.mod2exp);
            for k in i..=j {
                let a = x.get(i, k);
                if a.is_zero() {
                    continue;
                }
                acc = &acc + &(a * y.get(k, j));
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Two-sided inverse by back substitution, column by column.
pub fn mat_inv(x: &UTMatrix) -> Result<UTMatrix> {
    let n = x.size;
    let diag_inv = (0..n)
        .map(|i| x.get(i, i).inv().map_err(|_| Error::NonUnitDiagonal { index: i }))
        .collect::<Result<Vec<_>>>()?;
    let mut out = UTMatrix::zero(n, x.mod2exp);
    for j in 0..n {
        out.set(j, j, diag_inv[j].clone());
        for i in (0..j).rev() {
            let mut acc = Z2Residue::zero(x.mod2exp);
            for k in i + 1..=j {
                acc = &acc + &(x.get(i, k) * out.get(k, j));
            }
            out.set(i, j, &(-&acc) * &diag_inv[i]);
        }
    }
    Ok(out)
}

/// Diagonal `9^k`, superdiagonal `1`, zero elsewhere.
pub fn build_b(n: usize, mod2exp: u32) -> UTMatrix {
    build_c(n, mod2exp, &BTreeMap::new()).expect("no extra entries")
}

/// [`build_b`] with additional entries `(i, j)`, `j >= i + 2`, above the
/// superdiagonal. Keys are 0-based.
pub fn build_c(n: usize, mod2exp: u32, upper: &BTreeMap<(usize, usize), Z2Residue>) -> Result<UTMatrix> {
    let mut m = UTMatrix::zero(n, mod2exp);
    let nine = Z2Residue::from_u64(9, mod2exp);
    let mut d = Z2Residue::one(mod2exp);
    for k in 0..n {
        m.set(k, k, d.clone());
        d = &d * &nine;
        if k + 1 < n {
            m.set(k, k + 1, Z2Residue::one(mod2exp));
        }
    }
    for (&(i, j), x) in upper {
        if j < i + 2 || j >= n {
            return Err(Error::InvalidParameter(format!(
                "entry ({i}, {j}) is not strictly above the superdiagonal of a {n}x{n} matrix"
            )));
        }
        m.set(i, j, x.with_mod2exp(mod2exp));
    }
    Ok(m)
}

/// `u * B == c * u` entrywise, with `B` the bidiagonal matrix of the same size.
pub fn similarity_check(u: &UTMatrix, c: &UTMatrix) -> Result<bool> {
    u.check_compatible(c)?;
    if let Some(index) = (0..u.size).find(|&i| !u.get(i, i).is_unit()) {
        return Err(Error::NonUnitDiagonal { index });
    }
    let b = build_b(u.size, u.mod2exp);
    Ok(mat_mul(u, &b)? == mat_mul(c, u)?)
}

impl std::fmt::Debug for UTMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "UTMatrix {}x{} mod 2^{}", self.size, self.size, self.mod2exp)?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|x| x.to_signed().to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Wire form: `{"size": n, "mod2exp": N, "rows": [["d", ...], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    size: usize,
    mod2exp: u32,
    rows: Vec<Vec<String>>,
}

impl Serialize for UTMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            size: self.size,
            mod2exp: self.mod2exp,
            rows: self
                .rows()
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UTMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = MatrixWire::deserialize(d)?;
        if wire.mod2exp == 0 || wire.rows.len() != wire.size {
            return Err(D::Error::custom("inconsistent matrix header"));
        }
        let rows = wire
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_residue_value(s).map(|v| Z2Residue::from_bigint(&v, wire.mod2exp)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        UTMatrix::from_rows(rows, wire.mod2exp).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const N: u32 = 128;

    fn r(x: i64) -> Z2Residue {
        Z2Residue::from_i64(x, N)
    }

    fn m(rows: &[&[i64]]) -> UTMatrix {
        UTMatrix::from_rows(rows.iter().map(|row| row.iter().map(|&x| r(x)).collect()).collect(), N).unwrap()
    }

    #[test]
    fn build_b_shapes() {
        assert_eq!(build_b(1, N), m(&[&[1]]));
        assert_eq!(build_b(2, N), m(&[&[1, 1], &[0, 9]]));
        let b4 = build_b(4, N);
        assert_eq!(b4.diagonal_entries(), vec![r(1), r(9), r(81), r(729)]);
        assert_eq!(b4.superdiagonal(), vec![r(1), r(1), r(1)]);
        assert!(b4.get(0, 2).is_zero() && b4.get(1, 3).is_zero());
    }

    #[test]
    fn build_c_shapes() {
        assert_eq!(build_c(5, N, &BTreeMap::new()).unwrap(), build_b(5, N));
        let upper = BTreeMap::from([((0, 2), r(5))]);
        assert_eq!(
            build_c(3, N, &upper).unwrap(),
            m(&[&[1, 1, 5], &[0, 9, 1], &[0, 0, 81]])
        );
        let bad = BTreeMap::from([((0, 1), r(5))]);
        assert!(build_c(3, N, &bad).is_err());
    }

    #[test]
    fn multiplication_examples() {
        let b = build_b(3, N);
        assert_eq!(mat_mul(&UTMatrix::identity(3, N), &b).unwrap(), b);
        assert_eq!(mat_mul(&b, &b).unwrap(), m(&[&[1, 10, 1], &[0, 81, 90], &[0, 0, 6561]]));
        let b_minus_1 = b.sub_scalar(&r(1));
        let b_minus_9 = b.sub_scalar(&r(9));
        let p = mat_mul(&b_minus_1, &b_minus_9).unwrap();
        assert_eq!(p.get(1, 2), &r(80));
        assert!(matches!(mat_mul(&b, &build_b(2, N)), Err(Error::SizeMismatch(_))));
        assert!(matches!(mat_mul(&b, &b.with_mod2exp(64)), Err(Error::SizeMismatch(_))));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mat_inv(&UTMatrix::identity(4, N)).unwrap(), UTMatrix::identity(4, N));
        let b = build_b(2, N);
        let inv = mat_inv(&b).unwrap();
        assert_eq!(mat_mul(&b, &inv).unwrap(), UTMatrix::identity(2, N));
        assert_eq!(mat_mul(&inv, &b).unwrap(), UTMatrix::identity(2, N));
        let singular = build_b(3, N).sub_scalar(&r(1));
        assert_eq!(mat_inv(&singular), Err(Error::NonUnitDiagonal { index: 0 }));
    }

    #[test]
    fn similarity_examples() {
        let i = UTMatrix::identity(4, N);
        assert!(similarity_check(&i, &build_b(4, N)).unwrap());
        let c = build_c(4, N, &BTreeMap::from([((0, 2), r(1))])).unwrap();
        assert!(!similarity_check(&i, &c).unwrap());
        let even = build_b(4, N).sub_scalar(&r(1));
        assert!(matches!(
            similarity_check(&even, &c),
            Err(Error::NonUnitDiagonal { index: 0 })
        ));
    }

    #[test]
    fn below_diagonal_rejected() {
        let rows = vec![vec![r(1), r(0)], vec![r(1), r(1)]];
        assert!(UTMatrix::from_rows(rows, N).is_err());
    }

    fn arb_ut(n: usize, bits: u32) -> impl Strategy<Value = UTMatrix> {
        prop::collection::vec(any::<u64>(), n * n).prop_map(move |xs| {
            let mut out = UTMatrix::zero(n, bits);
            for i in 0..n {
                for j in i..n {
                    out.set(i, j, Z2Residue::from_u64(xs[i * n + j], bits));
                }
            }
            out
        })
    }

    proptest! {
        #[test]
        fn leading_blocks_are_coherent(x in arb_ut(7, 96), y in arb_ut(7, 96)) {
            let xy = mat_mul(&x, &y).unwrap();
            prop_assert!(xy.is_upper_triangular());
            for k in 1..=7 {
                let blocks = mat_mul(&x.leading_block(k), &y.leading_block(k)).unwrap();
                prop_assert_eq!(xy.leading_block(k), blocks);
            }
        }

        #[test]
        fn inverse_is_two_sided(x in arb_ut(6, 80)) {
            let mut x = x;
            for i in 0..6 {
                let d = x.get(i, i).clone();
                x.set(i, i, &d + &Z2Residue::from_u64(if d.is_unit() { 0 } else { 1 }, 80));
            }
            let inv = mat_inv(&x).unwrap();
            prop_assert_eq!(mat_mul(&x, &inv).unwrap(), UTMatrix::identity(6, 80));
            prop_assert_eq!(mat_mul(&inv, &x).unwrap(), UTMatrix::identity(6, 80));
        }
    }
}
