use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::GradedElement;
use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::valuations::alpha;

fn nine_pow(e: u32) -> BigInt {
    BigInt::from(9u32).pow(e)
}

/// `c_{4k} = prod_{i=1..k} (v^2 - 9^(i-1) u^2) / (9^k - 9^(i-1))`, with `c_0 = 1`.
pub fn c_element(k: u32) -> GradedElement {
    // In U, W coordinates each factor is 4 (W - 9^(i-1) U^2). Multiply the
    // integer polynomials in W first; coefficient b belongs to W^b U^(2(k-b)).
    let mut poly: Vec<BigInt> = vec![BigInt::one()];
    for i in 1..=k {
        let root = nine_pow(i - 1);
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (b, coeff) in poly.iter().enumerate() {
            next[b + 1] += coeff;
            next[b] -= coeff * &root;
        }
        poly = next;
    }
    let top = nine_pow(k);
    let denominator: BigInt = (1..=k).map(|i| &top - nine_pow(i - 1)).product();
    let four_k = BigInt::one() << (2 * k);
    GradedElement::from_terms(poly.into_iter().enumerate().map(|(b, coeff)| {
        let b = b as u32;
        (
            (2 * (k - b), b),
            DyadicRational::new(coeff * &four_k, denominator.clone()),
        )
    }))
}

/// `f_{4k} = 2^(2k - alpha(k)) c_{4k}`, the smallest 2-power multiple of
/// `c_{4k}` lying in the integral subring.
pub fn f_element(k: u32) -> GradedElement {
    let e = 2 * i64::from(k) - i64::from(alpha(u64::from(k)));
    c_element(k).scale(&DyadicRational::pow2(e))
}

fn g_denominator_exponent(m: u32, l: u32) -> u32 {
    let rationalised = 2 * l - alpha(u64::from(l));
    rationalised.min(2 * (m - l))
}

fn g_from_f(m: u32, l: u32, f: &GradedElement) -> GradedElement {
    let e = g_denominator_exponent(m, l);
    (&GradedElement::u_pow(2 * (m - l)) * f).scale(&DyadicRational::pow2(-i64::from(e)))
}

/// The degree-`4m` basis element built from `f_{4l}`:
/// `u^(2(m-l)) f_{4l} / 2^min(2l - alpha(l), 2(m-l))`.
pub fn g_element(m: u32, l: u32) -> Result<GradedElement> {
    if l > m {
        return Err(Error::IndexOrder(format!("g needs l <= m, got m={m}, l={l}")));
    }
    Ok(g_from_f(m, l, &f_element(l)))
}

/// The basis `g_{4m,0}, ..., g_{4m,4m}` of the degree-`4m` part.
///
/// `g_{4m,4l}` has W-degree exactly `l` with leading monomial
/// `U^(2(m-l)) W^l`, so expressing an element is a triangular solve.
#[derive(Debug, Clone)]
pub struct GBasis {
    m: u32,
    elements: Vec<GradedElement>,
}

impl GBasis {
    pub fn new(m: u32) -> Self {
        let elements = (0..=m).map(|l| g_from_f(m, l, &f_element(l))).collect();
        GBasis { m, elements }
    }

    pub fn degree_index(&self) -> u32 {
        self.m
    }

    pub fn element(&self, l: u32) -> &GradedElement {
        &self.elements[l as usize]
    }

    fn leading(&self, l: u32) -> (u32, u32) {
        (2 * (self.m - l), l)
    }

    /// Exact coordinates of `x` in this basis.
    pub fn express(&self, x: &GradedElement) -> Result<GBasisVector> {
        let degree = 4 * self.m;
        let not_in_span = |reason: String| Error::NotInSpan { degree, reason };
        if let Some((&m, _)) = x.terms().find(|(&m, _)| GradedElement::monomial_degree(m) != degree) {
            return Err(not_in_span(format!(
                "monomial (u/2)^{}(v^2/4)^{} has the wrong degree",
                m.0, m.1
            )));
        }
        let mut rest = x.clone();
        let mut coeffs = vec![DyadicRational::zero(); self.m as usize + 1];
        for l in (0..=self.m).rev() {
            let lead = self.leading(l);
            let c = rest.coeff(lead);
            if c.is_zero() {
                continue;
            }
            let g = self.element(l);
            let c = &c / &g.coeff(lead);
            rest = &rest - &g.scale(&c);
            coeffs[l as usize] = c;
        }
        if !rest.is_zero() {
            return Err(not_in_span(format!("residual {rest:?}")));
        }
        Ok(GBasisVector {
            degree_index: self.m,
            coeffs,
        })
    }

    /// Re-sums a coordinate vector.
    pub fn combine(&self, v: &GBasisVector) -> GradedElement {
        assert_eq!(v.degree_index, self.m, "coordinate vector for another degree");
        let mut out = GradedElement::zero();
        for (g, c) in self.elements.iter().zip(&v.coeffs) {
            out = &out + &g.scale(c);
        }
        out
    }
}

/// Coordinates with respect to `g_{4k,0}, ..., g_{4k,4k}`; entry `i` is the
/// coefficient of `g_{4k,4i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GBasisVector {
    pub degree_index: u32,
    pub coeffs: Vec<DyadicRational>,
}

impl GBasisVector {
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.valuation().is_nonnegative())
    }
}

/// [`GBasis::express`] for a one-off element of degree `4m`.
pub fn express_in_g(x: &GradedElement, m: u32) -> Result<GBasisVector> {
    GBasis::new(m).express(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cring::psi3_apply;

    fn q(n: i64, d: i64) -> DyadicRational {
        DyadicRational::new(n.into(), d.into())
    }

    fn ints(xs: &[i64]) -> Vec<DyadicRational> {
        xs.iter().map(|&x| DyadicRational::from(x)).collect()
    }

    /// `g_{4m,4l}` built from the two-case definition with explicit powers of u.
    fn g_two_case(m: u32, l: u32) -> GradedElement {
        let a = alpha(u64::from(l));
        let f = f_element(l);
        if 4 * l - a <= 2 * m {
            let inner = (&GradedElement::u_pow(2 * l - a) * &f).scale(&DyadicRational::pow2(-i64::from(2 * l - a)));
            &GradedElement::u_pow(2 * m + a - 4 * l) * &inner
        } else {
            (&GradedElement::u_pow(2 * (m - l)) * &f).scale(&DyadicRational::pow2(-i64::from(2 * (m - l))))
        }
    }

    #[test]
    fn c_small_cases() {
        assert_eq!(c_element(0), GradedElement::one());
        // (v^2 - u^2)/8 = (4W - 4U^2)/8
        let c1 = GradedElement::from_terms([((0, 1), q(1, 2)), ((2, 0), q(-1, 2))]);
        assert_eq!(c_element(1), c1);
        let v2 = GradedElement::v_squared();
        let u2 = GradedElement::u_pow(2);
        let num = &(&v2 - &u2) * &(&v2 - &u2.scale(&DyadicRational::from(9)));
        assert_eq!(c_element(2), num.scale(&q(1, 80 * 72)));
    }

    #[test]
    fn f_small_cases() {
        assert_eq!(f_element(0), GradedElement::one());
        let f1 = GradedElement::from_terms([((0, 1), q(1, 1)), ((2, 0), q(-1, 1))]);
        assert_eq!(f_element(1), f1);
        let f2 = f_element(2);
        assert!(f2.is_integral());
        assert!(!f2.scale(&q(1, 2)).is_integral());
    }

    #[test]
    fn c_is_not_integral() {
        assert!(!c_element(1).is_integral());
        assert!(f_element(1).is_integral());
    }

    #[test]
    fn g_small_cases() {
        assert_eq!(g_element(1, 1).unwrap(), f_element(1));
        assert_eq!(g_element(1, 0).unwrap(), GradedElement::u_pow(2));
        let expected = (&GradedElement::u_pow(2) * &f_element(1)).scale(&q(1, 2));
        assert_eq!(g_element(2, 1).unwrap(), expected);
        assert!(matches!(g_element(1, 2), Err(Error::IndexOrder(_))));
    }

    #[test]
    fn g_closed_form_matches_two_case_definition() {
        for m in 0..=40 {
            for l in 0..=m {
                assert_eq!(g_element(m, l).unwrap(), g_two_case(m, l), "m={m} l={l}");
            }
        }
    }

    #[test]
    fn g_elements_are_integral() {
        for m in 0..=12 {
            for l in 0..=m {
                assert!(g_element(m, l).unwrap().is_integral(), "m={m} l={l}");
            }
        }
    }

    #[test]
    fn express_examples() {
        let v = express_in_g(&g_element(2, 1).unwrap(), 2).unwrap();
        assert_eq!(v.coeffs, ints(&[0, 1, 0]));
        let v = express_in_g(&psi3_apply(&g_element(2, 1).unwrap()), 2).unwrap();
        assert_eq!(v.coeffs, ints(&[1, 9, 0]));
        // The sub-entry is 2^3 with no factor of 9; see psi3 tests.
        let v = express_in_g(&psi3_apply(&g_element(2, 2).unwrap()), 2).unwrap();
        assert_eq!(v.coeffs, ints(&[0, 8, 81]));
    }

    #[test]
    fn express_rejects_elements_outside_span() {
        let err = express_in_g(&GradedElement::u(), 1).unwrap_err();
        assert!(matches!(err, Error::NotInSpan { degree: 4, .. }));
        let mixed = &g_element(1, 1).unwrap() + &GradedElement::one();
        assert!(matches!(express_in_g(&mixed, 1), Err(Error::NotInSpan { .. })));
    }

    #[test]
    fn express_round_trips() {
        for m in 0..=10 {
            let basis = GBasis::new(m);
            let x = (0..=m).fold(GradedElement::zero(), |acc, l| {
                let coeff = q(i64::from(3 * l) - 7, i64::from(2 * l + 1));
                &acc + &basis.element(l).scale(&coeff)
            });
            let v = basis.express(&x).unwrap();
            assert_eq!(basis.combine(&v), x);
            // Any homogeneous element of degree 4m is in the span.
            let monomial = GradedElement::monomial((2 * m, 0), q(5, 3));
            let v = basis.express(&monomial).unwrap();
            assert_eq!(basis.combine(&v), monomial);
        }
    }
}
