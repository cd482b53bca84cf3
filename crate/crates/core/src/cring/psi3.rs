use num_bigint::BigInt;
use serde::Serialize;

use super::basis::{f_element, GBasis, GBasisVector};
use super::GradedElement;
use crate::dyadic::{DyadicRational, Valuation};
use crate::error::Result;
use crate::exec::{self, Execution};
use crate::valuations::alpha;

fn nine_pow(e: u32) -> DyadicRational {
    DyadicRational::from(BigInt::from(9u32).pow(e))
}

fn nu2_u32(n: u32) -> u32 {
    n.trailing_zeros()
}

/// The ring endomorphism fixing `u` and sending `v^2` to `9 v^2`
/// (equivalently `U -> U`, `W -> 9W`).
pub fn psi3_apply(x: &GradedElement) -> GradedElement {
    GradedElement::from_terms(x.terms().map(|(&(a, b), c)| ((a, b), c * &nine_pow(b))))
}

/// `9^k f_{4k} + 9^(k-1) u^2 2^(nu2(k)+1) f_{4k-4}`, the closed form for
/// `psi3(f_{4k})` as it is usually quoted. Requires `k >= 1`.
pub fn psi3_f_published(k: u32) -> GradedElement {
    assert!(k >= 1);
    let tail = (&GradedElement::u_pow(2) * &f_element(k - 1))
        .scale(&(&nine_pow(k - 1) * &DyadicRational::pow2(i64::from(nu2_u32(k)) + 1)));
    &f_element(k).scale(&nine_pow(k)) + &tail
}

/// `9^k f_{4k} + u^2 2^(nu2(k)+1) f_{4k-4}`.
///
/// Follows from `psi3(c_{4k}) = 9^k c_{4k} + u^2 c_{4k-4}`: the i = 1 factor
/// of the denominator is `9^k - 1`, and for i >= 2 each factor is
/// `9 (9^(k-1) - 9^(i-2))`, which cancels the `9^(k-1)`.
pub fn psi3_f_recurrence(k: u32) -> GradedElement {
    assert!(k >= 1);
    let tail = (&GradedElement::u_pow(2) * &f_element(k - 1)).scale(&DyadicRational::pow2(i64::from(nu2_u32(k)) + 1));
    &f_element(k).scale(&nine_pow(k)) + &tail
}

/// Matrix of `psi3` on the degree-`4k` basis. Row `l` holds the coordinates
/// of `psi3(g_{4k,4l})`, so the matrix is lower bidiagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Psi3Matrix {
    pub degree_index: u32,
    pub rows: Vec<GBasisVector>,
}

impl Psi3Matrix {
    pub fn diagonal(&self, l: u32) -> &DyadicRational {
        &self.rows[l as usize].coeffs[l as usize]
    }

    /// Coefficient of `g_{4k,4l-4}` in `psi3(g_{4k,4l})`, for `l >= 1`.
    pub fn sub_entry(&self, l: u32) -> &DyadicRational {
        &self.rows[l as usize].coeffs[l as usize - 1]
    }

    pub fn is_lower_bidiagonal(&self) -> bool {
        self.rows.iter().enumerate().all(|(l, row)| {
            row.coeffs
                .iter()
                .enumerate()
                .all(|(i, c)| c.is_zero() || i == l || i + 1 == l)
        })
    }

    /// Dense rows, `entry(l, i)` = coefficient of `g_{4k,4i}` in `psi3(g_{4k,4l})`.
    pub fn entries(&self) -> Vec<Vec<DyadicRational>> {
        self.rows.iter().map(|r| r.coeffs.clone()).collect()
    }
}

/// Computes every row by applying [`psi3_apply`] and expressing the result
/// in the g-basis.
pub fn psi3_degree_matrix(k: u32) -> Result<Psi3Matrix> {
    psi3_degree_matrix_in(&GBasis::new(k))
}

fn psi3_degree_matrix_in(basis: &GBasis) -> Result<Psi3Matrix> {
    let k = basis.degree_index();
    let rows = (0..=k)
        .map(|l| basis.express(&psi3_apply(basis.element(l))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Psi3Matrix { degree_index: k, rows })
}

/// [`psi3_degree_matrix`] for every `k` in `ks`, one degree per task.
pub fn psi3_matrices(ks: impl IntoIterator<Item = u32>, mode: Execution) -> Result<Vec<Psi3Matrix>> {
    exec::try_map(mode, ks.into_iter().collect(), psi3_degree_matrix)
}

/// The three ranges of `2k` relative to `t = 4l - alpha(l)` used to describe
/// the sub-entry of row `l < k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubEntryCase {
    /// `t <= 2k`
    Aligned,
    /// `t - nu2(l) - 3 <= 2k < t`
    Shifted,
    /// `2k < t - nu2(l) - 3`
    Deep,
}

/// Case of the pair `(k, l)` with `0 < l < k`.
pub fn sub_entry_case(k: u32, l: u32) -> Option<SubEntryCase> {
    if l == 0 || l >= k {
        return None;
    }
    let t = 4 * l - alpha(u64::from(l));
    let lower = t - nu2_u32(l) - 3;
    Some(if t <= 2 * k {
        SubEntryCase::Aligned
    } else if lower <= 2 * k {
        SubEntryCase::Shifted
    } else {
        SubEntryCase::Deep
    })
}

/// Computed sub-entry of row `l` at degree `4k` next to the quoted closed forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubEntryCheck {
    pub k: u32,
    pub l: u32,
    pub case: SubEntryCase,
    pub computed: DyadicRational,
    /// `nu2(computed)`.
    pub exponent: i64,
    /// `computed / 2^exponent`.
    pub unit_part: DyadicRational,
    /// Quoted value `9^(l-1) 2^e` in the aligned and shifted cases.
    pub published: Option<DyadicRational>,
    pub published_exponent: Option<u32>,
    pub matches_published: Option<bool>,
    pub matches_published_exponent: Option<bool>,
    /// Deep case: the two candidate exponents `3 + nu2(k)` and `3 + nu2(l)`.
    pub deep_exponent_k_variant: Option<u32>,
    pub deep_exponent_l_variant: Option<u32>,
}

impl SubEntryCheck {
    pub fn new(matrix: &Psi3Matrix, l: u32) -> Option<Self> {
        let k = matrix.degree_index;
        let case = sub_entry_case(k, l)?;
        let computed = matrix.sub_entry(l).clone();
        let exponent = match computed.valuation() {
            Valuation::Finite(e) => e,
            Valuation::Infinite => i64::MIN,
        };
        let unit_part = computed.odd_part();
        let published_exponent = match case {
            SubEntryCase::Aligned => Some(0),
            SubEntryCase::Shifted => Some(4 * l - alpha(u64::from(l)) - 2 * k),
            SubEntryCase::Deep => None,
        };
        let published = published_exponent.map(|e| &nine_pow(l - 1) * &DyadicRational::pow2(i64::from(e)));
        let (deep_k, deep_l) = match case {
            SubEntryCase::Deep => (Some(3 + nu2_u32(k)), Some(3 + nu2_u32(l))),
            _ => (None, None),
        };
        Some(SubEntryCheck {
            k,
            l,
            case,
            matches_published: published.as_ref().map(|p| *p == computed),
            matches_published_exponent: published_exponent.map(|e| i64::from(e) == exponent),
            computed,
            exponent,
            unit_part,
            published,
            published_exponent,
            deep_exponent_k_variant: deep_k,
            deep_exponent_l_variant: deep_l,
        })
    }

    pub fn matches_k_variant(&self) -> Option<bool> {
        self.deep_exponent_k_variant.map(|e| i64::from(e) == self.exponent)
    }

    pub fn matches_l_variant(&self) -> Option<bool> {
        self.deep_exponent_l_variant.map(|e| i64::from(e) == self.exponent)
    }
}

/// All sub-entry checks for rows `0 < l < k` of the given matrices.
pub fn sub_entry_checks(matrices: &[Psi3Matrix]) -> Vec<SubEntryCheck> {
    matrices
        .iter()
        .flat_map(|m| (1..m.degree_index).filter_map(move |l| SubEntryCheck::new(m, l)))
        .collect()
}

/// The last row, `psi3(g_{4k,4k})`, against its quoted closed form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopColumnCheck {
    pub k: u32,
    pub diagonal: DyadicRational,
    pub diagonal_ok: bool,
    pub sub_entry: Option<DyadicRational>,
    pub published_sub_entry: Option<DyadicRational>,
    pub published_exponent: Option<u32>,
    pub matches_published: bool,
    pub matches_published_exponent: bool,
}

impl TopColumnCheck {
    pub fn new(matrix: &Psi3Matrix) -> Self {
        let k = matrix.degree_index;
        let diagonal = matrix.diagonal(k).clone();
        let diagonal_ok = diagonal == nine_pow(k);
        if k == 0 {
            return TopColumnCheck {
                k,
                diagonal,
                diagonal_ok,
                sub_entry: None,
                published_sub_entry: None,
                published_exponent: None,
                matches_published: diagonal_ok,
                matches_published_exponent: true,
            };
        }
        let sub = matrix.sub_entry(k).clone();
        let (unit, e) = match k {
            1 => (DyadicRational::one(), 1),
            2 => (nine_pow(1), 3),
            _ => (nine_pow(k - 1), nu2_u32(k) + 3),
        };
        let published = &unit * &DyadicRational::pow2(i64::from(e));
        TopColumnCheck {
            k,
            matches_published: diagonal_ok && sub == published,
            matches_published_exponent: sub.valuation() == Valuation::Finite(i64::from(e)),
            diagonal,
            diagonal_ok,
            sub_entry: Some(sub),
            published_sub_entry: Some(published),
            published_exponent: Some(e),
        }
    }
}

pub fn top_column_checks(matrices: &[Psi3Matrix]) -> Vec<TopColumnCheck> {
    matrices.iter().map(TopColumnCheck::new).collect()
}
