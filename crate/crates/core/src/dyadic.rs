//! Exact coefficient arithmetic.
//!
//! [`DyadicRational`] is an exact rational used by the symbolic ring, and
//! [`Z2Residue`] is a truncated 2-adic integer (an element of `Z/2^N`) used by
//! the matrix code. The two only meet in [`residue_from_rational`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Modulus exponent used when none is given.
pub const DEFAULT_MOD2EXP: u32 = 128;

/// 2-adic valuation of a rational. Zero has its own variant so that nobody
/// does arithmetic on infinity by accident.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_nonnegative(self) -> bool {
        match self {
            Valuation::Finite(v) => v >= 0,
            Valuation::Infinite => true,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// 2-adic valuation of a nonzero big integer.
pub fn nu2_bigint(n: &BigInt) -> Option<u64> {
    n.trailing_zeros()
}

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicRational(BigRational);

impl DyadicRational {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Self {
        DyadicRational(BigRational::new(numerator, denominator))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        DyadicRational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        DyadicRational(BigRational::zero())
    }

    pub fn one() -> Self {
        DyadicRational(BigRational::one())
    }

    /// `2^e` for any integer `e`.
    pub fn pow2(e: i64) -> Self {
        let p = BigInt::one() << e.unsigned_abs();
        if e >= 0 {
            DyadicRational::from_integer(p)
        } else {
            DyadicRational::new(BigInt::one(), p)
        }
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn valuation(&self) -> Valuation {
        nu2_rational(self)
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(DyadicRational(self.0.recip()))
        }
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Odd part of the value: `q / 2^nu2(q)`. Zero maps to zero.
    pub fn odd_part(&self) -> Self {
        match self.valuation() {
            Valuation::Infinite => Self::zero(),
            Valuation::Finite(v) => self * &Self::pow2(-v),
        }
    }
}

/// `nu2(q) = nu2(numerator) - nu2(denominator)`, infinite for zero.
pub fn nu2_rational(q: &DyadicRational) -> Valuation {
    match q.numerator().trailing_zeros() {
        None => Valuation::Infinite,
        Some(num) => {
            let den = q.denominator().trailing_zeros().unwrap_or(0);
            Valuation::Finite(num as i64 - den as i64)
        }
    }
}

impl From<i64> for DyadicRational {
    fn from(n: i64) -> Self {
        DyadicRational::from_integer(n)
    }
}

impl From<BigInt> for DyadicRational {
    fn from(n: BigInt) -> Self {
        DyadicRational::from_integer(n)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for DyadicRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num = BigInt::from_str(num).map_err(|_| bad())?;
        let den = BigInt::from_str(den).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(DyadicRational::new(num, den))
    }
}

impl Serialize for DyadicRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DyadicRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rational_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&DyadicRational> for &DyadicRational {
            type Output = DyadicRational;
            fn $method(self, rhs: &DyadicRational) -> DyadicRational {
                DyadicRational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr for DyadicRational {
            type Output = DyadicRational;
            fn $method(self, rhs: DyadicRational) -> DyadicRational {
                DyadicRational(self.0.$method(rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);

impl std::ops::Div<&DyadicRational> for &DyadicRational {
    type Output = DyadicRational;
    fn div(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational(&self.0 / &rhs.0)
    }
}

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational(-self.0)
    }
}

/// An element of `Z/2^N`, standing in for a 2-adic integer known to `N` bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Z2Residue {
    value: BigUint,
    mod2exp: u32,
}

fn mask_to(value: BigUint, mod2exp: u32) -> BigUint {
    if value.bits() <= u64::from(mod2exp) {
        return value;
    }
    let words = (mod2exp as usize).div_ceil(64);
    let mut digits: Vec<u64> = value.iter_u64_digits().take(words).collect();
    let rem = mod2exp % 64;
    if rem != 0 {
        if let Some(last) = digits.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
    let mut bytes = Vec::with_capacity(digits.len() * 8);
    for d in digits {
        bytes.extend_from_slice(&d.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}

impl Z2Residue {
    /// Reduces `value` modulo `2^mod2exp`. Panics on `mod2exp == 0`.
    pub fn new(value: BigUint, mod2exp: u32) -> Self {
        assert!(mod2exp > 0, "modulus exponent must be positive");
        Z2Residue {
            value: mask_to(value, mod2exp),
            mod2exp,
        }
    }

    pub fn from_u64(value: u64, mod2exp: u32) -> Self {
        Self::new(BigUint::from(value), mod2exp)
    }

    /// Reduces a signed integer into `[0, 2^N)`.
    pub fn from_bigint(value: &BigInt, mod2exp: u32) -> Self {
        let modulus = BigInt::one() << mod2exp;
        let r = value.mod_floor(&modulus);
        Self::new(r.to_biguint().expect("mod_floor is nonnegative"), mod2exp)
    }

    pub fn from_i64(value: i64, mod2exp: u32) -> Self {
        Self::from_bigint(&BigInt::from(value), mod2exp)
    }

    pub fn zero(mod2exp: u32) -> Self {
        Self::new(BigUint::zero(), mod2exp)
    }

    pub fn one(mod2exp: u32) -> Self {
        Self::new(BigUint::one(), mod2exp)
    }

    /// `9^e` reduced mod `2^N`.
    pub fn nine_pow(e: u32, mod2exp: u32) -> Self {
        Self::from_u64(9, mod2exp).pow(e)
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn mod2exp(&self) -> u32 {
        self.mod2exp
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.value.bit(0)
    }

    /// Number of trailing zero bits; `None` for the zero residue.
    pub fn valuation(&self) -> Option<u64> {
        self.value.trailing_zeros()
    }

    /// Re-reads the same representative at another precision. Lowering the
    /// exponent is reduction; raising it picks the canonical lift in `[0, 2^N)`.
    pub fn with_mod2exp(&self, mod2exp: u32) -> Self {
        Self::new(self.value.clone(), mod2exp)
    }

    fn modulus(&self) -> BigUint {
        BigUint::one() << self.mod2exp
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.mod2exp, other.mod2exp, "residues at different precisions");
    }

    pub fn pow(&self, e: u32) -> Self {
        Self::new(self.value.modpow(&BigUint::from(e), &self.modulus()), self.mod2exp)
    }

    pub fn shl(&self, bits: u32) -> Self {
        Self::new(&self.value << bits, self.mod2exp)
    }

    /// Exact division by `2^bits` of a residue known to be divisible by it.
    /// The result is only meaningful modulo `2^(N - bits)`.
    pub fn shr_exact(&self, bits: u32) -> Option<Self> {
        match self.valuation() {
            Some(v) if v < u64::from(bits) => None,
            _ => Some(Self::new(&self.value >> bits, self.mod2exp)),
        }
    }

    /// Signed representative in `(-2^(N-1), 2^(N-1)]`, for display.
    pub fn to_signed(&self) -> BigInt {
        let v = BigInt::from_biguint(Sign::Plus, self.value.clone());
        let half = BigInt::one() << (self.mod2exp - 1);
        if v > half {
            v - (BigInt::one() << self.mod2exp)
        } else {
            v
        }
    }

    pub fn inv(&self) -> Result<Self> {
        residue_inv(self)
    }
}

/// Inverse of an odd residue by Newton iteration `y <- y(2 - xy)`, which
/// doubles the number of correct low bits each step.
pub fn residue_inv(x: &Z2Residue) -> Result<Z2Residue> {
    if !x.is_unit() {
        return Err(Error::EvenNotInvertible(x.value.to_string()));
    }
    let n = x.mod2exp;
    let two = Z2Residue::from_u64(2, n);
    // x*x = 1 mod 8 for odd x, so y = x starts with three good bits.
    let mut y = x.clone();
    let mut good = 3u32;
    while good < n {
        y = &y * &(&two - &(x * &y));
        good = good.saturating_mul(2);
    }
    Ok(y)
}

/// Image of a 2-adically integral rational in `Z/2^N`.
pub fn residue_from_rational(q: &DyadicRational, mod2exp: u32) -> Result<Z2Residue> {
    if !q.valuation().is_nonnegative() {
        return Err(Error::NotTwoAdicallyIntegral(q.to_string()));
    }
    let num = Z2Residue::from_bigint(q.numerator(), mod2exp);
    // Lowest terms and nonnegative valuation force an odd denominator.
    let den = Z2Residue::from_bigint(q.denominator(), mod2exp);
    Ok(&num * &residue_inv(&den)?)
}

impl fmt::Display for Z2Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value, f)
    }
}

impl fmt::Debug for Z2Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod 2^{})", self.value, self.mod2exp)
    }
}

impl<'a> Add<&'a Z2Residue> for &'a Z2Residue {
    type Output = Z2Residue;
    fn add(self, rhs: &Z2Residue) -> Z2Residue {
        self.check(rhs);
        Z2Residue::new(&self.value + &rhs.value, self.mod2exp)
    }
}

impl<'a> Sub<&'a Z2Residue> for &'a Z2Residue {
    type Output = Z2Residue;
    fn sub(self, rhs: &Z2Residue) -> Z2Residue {
        self.check(rhs);
        Z2Residue::new(&self.value + (self.modulus() - &rhs.value), self.mod2exp)
    }
}

impl<'a> Mul<&'a Z2Residue> for &'a Z2Residue {
    type Output = Z2Residue;
    fn mul(self, rhs: &Z2Residue) -> Z2Residue {
        self.check(rhs);
        Z2Residue::new(&self.value * &rhs.value, self.mod2exp)
    }
}

impl Neg for &Z2Residue {
    type Output = Z2Residue;
    fn neg(self) -> Z2Residue {
        Z2Residue::new(self.modulus() - &self.value, self.mod2exp)
    }
}

impl Add for Z2Residue {
    type Output = Z2Residue;
    fn add(self, rhs: Z2Residue) -> Z2Residue {
        &self + &rhs
    }
}

impl Sub for Z2Residue {
    type Output = Z2Residue;
    fn sub(self, rhs: Z2Residue) -> Z2Residue {
        &self - &rhs
    }
}

impl Mul for Z2Residue {
    type Output = Z2Residue;
    fn mul(self, rhs: Z2Residue) -> Z2Residue {
        &self * &rhs
    }
}

/// Wire form: `{"value": "<decimal>", "mod2exp": N}`.
#[derive(Serialize, Deserialize)]
struct ResidueWire {
    value: String,
    mod2exp: u32,
}

impl Serialize for Z2Residue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ResidueWire {
            value: self.value.to_string(),
            mod2exp: self.mod2exp,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Z2Residue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = ResidueWire::deserialize(d)?;
        if wire.mod2exp == 0 {
            return Err(serde::de::Error::custom("mod2exp must be positive"));
        }
        let value = parse_residue_value(&wire.value).map_err(serde::de::Error::custom)?;
        Ok(Z2Residue::from_bigint(&value, wire.mod2exp))
    }
}

/// Accepts decimal strings, optionally signed.
pub fn parse_residue_value(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::InvalidParameter(format!("not a decimal integer: {s:?}")))
}
