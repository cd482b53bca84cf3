//! Valuation combinatorics: `nu2`, the binary digit sum `alpha`, and the
//! closed forms for `nu2(l!)`, `nu2(9^l - 1)`, `nu2(prod_i (9^l - 9^(i-1)))`
//! and the exponent `beta(k, i)` of the generator expansion.
//!
//! Each closed form has a big-integer oracle in [`oracle`] that never looks at
//! the formula.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Largest `e` with `2^e | n`.
pub fn nu2(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    Ok(n.trailing_zeros())
}

/// Number of ones in the binary expansion of `n`.
pub fn alpha(n: u64) -> u32 {
    n.count_ones()
}

/// `nu2(l!) = l - alpha(l)`.
pub fn nu2_factorial(l: u64) -> u64 {
    l - u64::from(alpha(l))
}

/// `nu2(9^l - 1) = nu2(l) + 3`.
pub fn nu2_nine_pow_minus_one(l: u64) -> Result<u32> {
    Ok(nu2(l)? + 3)
}

/// `nu2(prod_{i=1..l} (9^l - 9^(i-1))) = 4l - alpha(l)`.
pub fn nu2_iota_product(l: u64) -> Result<u64> {
    if l == 0 {
        return Err(Error::ZeroInput);
    }
    Ok(4 * l - u64::from(alpha(l)))
}

/// Exponent of two on `g_{4k,4i}` in the expansion of the generator `z_{4k}`.
///
/// Uses the second branch on the boundary `4i - alpha(i) = 2k`.
pub fn beta(k: u64, i: u64) -> Result<u64> {
    if i > k {
        return Err(Error::IndexOrder(format!("beta needs i <= k, got k={k}, i={i}")));
    }
    let ai = u64::from(alpha(i));
    let ak = u64::from(alpha(k));
    if 4 * i - ai > 2 * k {
        Ok(4 * (k - i) + ai - ak)
    } else {
        Ok(2 * k - ak)
    }
}

/// Independent big-integer computations of the quantities above.
pub mod oracle {
    use num_bigint::BigUint;
    use num_traits::One;

    fn nine_pow(e: u64) -> BigUint {
        BigUint::from(9u32).pow(e as u32)
    }

    /// Legendre's sum `sum_{j>=1} floor(l / 2^j)`.
    pub fn nu2_factorial(l: u64) -> u64 {
        let mut total = 0;
        let mut p = 2u64;
        while p <= l {
            total += l / p;
            p = match p.checked_mul(2) {
                Some(p) => p,
                None => break,
            };
        }
        total
    }

    /// Trailing zeros of the exact integer `9^l - 1`.
    pub fn nu2_nine_pow_minus_one(l: u64) -> u64 {
        (nine_pow(l) - BigUint::one())
            .trailing_zeros()
            .expect("9^l - 1 > 0 for l >= 1")
    }

    fn product_tree(mut xs: Vec<BigUint>) -> BigUint {
        if xs.is_empty() {
            return BigUint::one();
        }
        while xs.len() > 1 {
            xs = xs
                .chunks(2)
                .map(|pair| match pair {
                    [a, b] => a * b,
                    [a] => a.clone(),
                    _ => unreachable!(),
                })
                .collect();
        }
        xs.pop().unwrap()
    }

    /// The full product `prod_{i=1..l} (9^l - 9^(i-1))` as an integer.
    pub fn iota_product(l: u64) -> BigUint {
        let top = nine_pow(l);
        let factors = (1..=l).map(|i| &top - nine_pow(i - 1)).collect();
        product_tree(factors)
    }

    /// Trailing zeros of [`iota_product`].
    pub fn nu2_iota_product(l: u64) -> u64 {
        iota_product(l).trailing_zeros().expect("nonzero product")
    }
}

/// Which identity a [`ValuationReport`] row checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    NinePowMinusOne,
    Factorial,
    IotaProduct,
}

/// One row of a closed-form versus oracle comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationReport {
    pub identity: Identity,
    pub input: u64,
    pub formula_value: u64,
    pub oracle_value: u64,
    pub agree: bool,
}

impl ValuationReport {
    fn new(identity: Identity, input: u64, formula_value: u64, oracle_value: u64) -> Self {
        ValuationReport {
            identity,
            input,
            formula_value,
            oracle_value,
            agree: formula_value == oracle_value,
        }
    }
}

/// Reports for `1 <= l <= max`.
pub fn nine_pow_reports(max: u64, mode: Execution) -> Vec<ValuationReport> {
    exec::map(mode, (1..=max).collect(), |l| {
        let formula = u64::from(nu2_nine_pow_minus_one(l).expect("l >= 1"));
        ValuationReport::new(Identity::NinePowMinusOne, l, formula, oracle::nu2_nine_pow_minus_one(l))
    })
}

/// Reports for `0 <= l <= max`.
pub fn factorial_reports(max: u64, mode: Execution) -> Vec<ValuationReport> {
    exec::map(mode, (0..=max).collect(), |l| {
        ValuationReport::new(Identity::Factorial, l, nu2_factorial(l), oracle::nu2_factorial(l))
    })
}

/// Reports for `1 <= l <= max`.
pub fn iota_product_reports(max: u64, mode: Execution) -> Vec<ValuationReport> {
    exec::map(mode, (1..=max).collect(), |l| {
        let formula = nu2_iota_product(l).expect("l >= 1");
        ValuationReport::new(Identity::IotaProduct, l, formula, oracle::nu2_iota_product(l))
    })
}

/// `nu2(9^(2^n) - 1) = n + 3` against the oracle, for `0 <= n <= max_n`.
pub fn two_power_reports(max_n: u32, mode: Execution) -> Vec<ValuationReport> {
    exec::map(mode, (0..=max_n).collect(), |n| {
        let l = 1u64 << n;
        ValuationReport::new(
            Identity::NinePowMinusOne,
            l,
            u64::from(n) + 3,
            oracle::nu2_nine_pow_minus_one(l),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn basic_values() {
        assert_eq!(nu2(8).unwrap(), 3);
        assert_eq!(nu2(12).unwrap(), 2);
        assert_eq!(nu2(9).unwrap(), 0);
        assert_eq!(nu2(0), Err(Error::ZeroInput));
        assert_eq!(alpha(5), 2);
        assert_eq!(alpha(7), 3);
        assert_eq!(alpha(0), 0);
    }

    #[test]
    fn factorial_values() {
        assert_eq!(nu2_factorial(1), 0);
        assert_eq!(nu2_factorial(4), 3);
        assert_eq!(nu2_factorial(7), 4);
        assert_eq!(oracle::nu2_factorial(4), 3);
        assert_eq!(oracle::nu2_factorial(7), 4);
    }

    #[test]
    fn nine_power_values() {
        assert_eq!(nu2_nine_pow_minus_one(1).unwrap(), 3);
        assert_eq!(nu2_nine_pow_minus_one(2).unwrap(), 4);
        assert_eq!(nu2_nine_pow_minus_one(6).unwrap(), 4);
        assert_eq!(nu2_nine_pow_minus_one(0), Err(Error::ZeroInput));
        // 9^2 - 1 = 80 = 2^4 * 5
        assert_eq!(oracle::nu2_nine_pow_minus_one(2), 4);
        assert_eq!(oracle::nu2_nine_pow_minus_one(6), 4);
    }

    #[test]
    fn iota_product_values() {
        assert_eq!(nu2_iota_product(1).unwrap(), 3);
        assert_eq!(nu2_iota_product(2).unwrap(), 7);
        assert_eq!(nu2_iota_product(4).unwrap(), 15);
        assert_eq!(oracle::iota_product(2), BigUint::from(5760u32));
        assert_eq!(oracle::nu2_iota_product(2), 7);
        assert_eq!(oracle::nu2_iota_product(4), 15);
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(1, 0).unwrap(), 1);
        assert_eq!(beta(2, 1).unwrap(), 3);
        assert_eq!(beta(2, 0).unwrap(), 3);
        assert!(matches!(beta(1, 2), Err(Error::IndexOrder(_))));
    }

    #[test]
    fn beta_on_the_diagonal_vanishes() {
        // For k >= 1, 4k - alpha(k) > 2k, so the first branch applies and gives 0.
        for k in 0..=200u64 {
            assert_eq!(beta(k, k).unwrap(), 0, "k={k}");
        }
    }

    #[test]
    fn beta_boundary_uses_second_branch() {
        // 4i - alpha(i) = 2k at (k, i) = (5, 3): 12 - 2 = 10.
        assert_eq!(4 * 3 - u64::from(alpha(3)), 2 * 5);
        assert_eq!(beta(5, 3).unwrap(), 2 * 5 - u64::from(alpha(5)));
    }

    #[test]
    fn binomial_valuation_is_nonnegative() {
        for k in 0..=1024u64 {
            for i in 0..=k {
                assert!(alpha(i) + alpha(k - i) >= alpha(k), "k={k} i={i}");
            }
        }
    }

    #[test]
    fn identities_small_sweep() {
        assert!(nine_pow_reports(256, Execution::best()).iter().all(|r| r.agree));
        assert!(factorial_reports(512, Execution::best()).iter().all(|r| r.agree));
        assert!(iota_product_reports(48, Execution::best()).iter().all(|r| r.agree));
        assert!(two_power_reports(8, Execution::best()).iter().all(|r| r.agree));
    }
}
