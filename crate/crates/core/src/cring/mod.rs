//! The graded ring `Q_2[u/2, v^2/4]`.
//!
//! Elements are stored in the coordinates `U = u/2` (degree 2) and
//! `W = v^2/4` (degree 4), so membership in the integral subring
//! `Z_2[u/2, v^2/4]` is a coefficient-wise valuation test.

mod basis;
mod psi3;

pub use basis::{c_element, express_in_g, f_element, g_element, GBasis, GBasisVector};
pub use psi3::{
    psi3_apply, psi3_degree_matrix, psi3_f_published, psi3_f_recurrence, psi3_matrices, sub_entry_case,
    sub_entry_checks, top_column_checks, Psi3Matrix, SubEntryCase, SubEntryCheck, TopColumnCheck,
};

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::dyadic::DyadicRational;

/// Exponents `(a, b)` of the monomial `(u/2)^a (v^2/4)^b`.
pub type Monomial = (u32, u32);

/// Finitely supported map from monomials to rational coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GradedElement {
    terms: BTreeMap<Monomial, DyadicRational>,
}

impl GradedElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial((0, 0), DyadicRational::one())
    }

    pub fn monomial(m: Monomial, coeff: DyadicRational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(m, coeff);
        }
        GradedElement { terms }
    }

    /// `u = 2 (u/2)`.
    pub fn u() -> Self {
        Self::monomial((1, 0), DyadicRational::from(2))
    }

    /// `u^j = 2^j (u/2)^j`.
    pub fn u_pow(j: u32) -> Self {
        Self::monomial((j, 0), DyadicRational::pow2(i64::from(j)))
    }

    /// `v^2 = 4 (v^2/4)`.
    pub fn v_squared() -> Self {
        Self::monomial((0, 1), DyadicRational::from(4))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, DyadicRational)>) -> Self {
        let mut out = Self::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &DyadicRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> DyadicRational {
        self.terms.get(&m).cloned().unwrap_or_else(DyadicRational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: DyadicRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = &*existing + &c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Degree of a single monomial: `2a + 4b`.
    pub fn monomial_degree((a, b): Monomial) -> u32 {
        2 * a + 4 * b
    }

    /// The common degree of all terms, or `None` for zero and for
    /// inhomogeneous elements.
    pub fn degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|&m| Self::monomial_degree(m));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn scale(&self, s: &DyadicRational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        GradedElement {
            terms: self.terms.iter().map(|(&m, c)| (m, c * s)).collect(),
        }
    }

    /// Every coefficient has nonnegative 2-adic valuation.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.valuation().is_nonnegative())
    }
}

/// Free function form of [`GradedElement::is_integral`].
pub fn is_integral(x: &GradedElement) -> bool {
    x.is_integral()
}

impl Add<&GradedElement> for &GradedElement {
    type Output = GradedElement;
    fn add(self, rhs: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        for (&m, c) in &rhs.terms {
            out.add_term(m, c.clone());
        }
        out
    }
}

impl Sub<&GradedElement> for &GradedElement {
    type Output = GradedElement;
    fn sub(self, rhs: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        for (&m, c) in &rhs.terms {
            out.add_term(m, -c.clone());
        }
        out
    }
}

impl Mul<&GradedElement> for &GradedElement {
    type Output = GradedElement;
    fn mul(self, rhs: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

impl std::fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(a, b), c)| format!("({c}) U^{a} W^{b}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Serializes as a map from `"(u/2)^a(v^2/4)^b"` to `"num/den"`.
impl Serialize for GradedElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (&(a, b), c) in &self.terms {
            map.serialize_entry(&format!("(u/2)^{a}(v^2/4)^{b}"), c)?;
        }
        map.end()
    }
}
