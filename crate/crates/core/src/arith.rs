//! Exact dyadic and general rational arithmetic.
//!
//! Every entry of a gossip matrix product is a dyadic rational `b / 2^c`, so
//! matrices use [`Dyadic`]. Network states may start from arbitrary rationals
//! and use [`Rational`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A dyadic rational `num / 2^exp`, always kept normalized: `num` is odd, or
/// the value is zero and stored as `0 / 2^0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Dyadic {
    num: BigInt,
    exp: u64,
}

impl Dyadic {
    /// Builds the normalized representative of `num / 2^exp`.
    pub fn new(num: impl Into<BigInt>, exp: u64) -> Self {
        let num = num.into();
        if num.is_zero() {
            return Self::zero();
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(exp);
        Dyadic {
            num: num >> tz,
            exp: exp - tz,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigInt::one(),
            exp: 0,
        }
    }

    /// `1 / 2^exp`.
    pub fn pow2_inv(exp: u64) -> Self {
        Dyadic {
            num: BigInt::one(),
            exp,
        }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn exp(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    /// Exact half of the value.
    pub fn half(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            num: self.num.clone(),
            exp: self.exp + 1,
        }
    }

    /// `(self + other) / 2`.
    pub fn average(&self, other: &Dyadic) -> Self {
        (self + other).half()
    }

    /// Numerator of the value scaled to denominator `2^exp`; `exp` must be at
    /// least `self.exp()`.
    pub fn scaled_num(&self, exp: u64) -> BigInt {
        debug_assert!(exp >= self.exp);
        &self.num << (exp - self.exp)
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from(self.clone())
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64()
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::new(v, 0)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        Dyadic::new(self.scaled_num(exp) + rhs.scaled_num(exp), exp)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        Dyadic::new(self.scaled_num(exp) - rhs.scaled_num(exp), exp)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: &Dyadic) -> Dyadic {
        // odd * odd is odd, so the product is already normalized unless zero
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.scaled_num(exp).cmp(&other.scaled_num(exp))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> std::iter::Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, x| &acc + x)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let q: Rational = s.parse()?;
        q.to_dyadic().ok_or_else(|| Error::BadNumber(s.to_string()))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Smallest integer `d` with `f >= 1 / 2^d`, for `0 < f <= 1`.
pub fn chi(f: &Dyadic) -> Result<u64> {
    if !f.is_positive() || *f > Dyadic::one() {
        return Err(Error::ChiDomain(f.to_string()));
    }
    // f = b / 2^c with b odd and b <= 2^c, so floor(log2 b) <= c
    let floor_log2 = f.num.bits() - 1;
    Ok(f.exp - floor_log2)
}

/// An exact rational in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::BadNumber("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(v.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn half(&self) -> Self {
        Rational(&self.0 / BigInt::from(2))
    }

    pub fn average(&self, other: &Rational) -> Self {
        (self + other).half()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// True iff the denominator is a power of two.
    pub fn is_dyadic(&self) -> bool {
        let d = self.0.denom();
        (d & (d - BigInt::one())).is_zero()
    }

    pub fn to_dyadic(&self) -> Option<Dyadic> {
        if !self.is_dyadic() {
            return None;
        }
        let exp = self.0.denom().bits() - 1;
        Some(Dyadic::new(self.0.numer().clone(), exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<Dyadic> for Rational {
    fn from(d: Dyadic) -> Self {
        Rational(BigRational::new(d.num, BigInt::one() << d.exp))
    }
}

impl From<&Dyadic> for Rational {
    fn from(d: &Dyadic) -> Self {
        Rational::from(d.clone())
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
    }
}

impl Add for &Rational {
    type Output = Rational;

    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Add for Rational {
    type Output = Rational;

    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for &Rational {
    type Output = Rational;

    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;

    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for &Rational {
    type Output = Rational;

    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;

    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Mul<&Rational> for &Dyadic {
    type Output = Rational;

    fn mul(self, rhs: &Rational) -> Rational {
        &Rational::from(self) * rhs
    }
}

impl Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = self.0.denom();
        if den.is_one() {
            write!(f, "{}", self.0.numer())
        } else if self.is_dyadic() {
            write!(f, "{}/2^{}", self.0.numer(), den.bits() - 1)
        } else {
            write!(f, "{}/{}", self.0.numer(), den)
        }
    }
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::BadNumber(whole.to_string()))
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p`, `p/q` and `p/2^c`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let Some((num, den)) = t.split_once('/') else {
            return Ok(Rational::from_integer(parse_int(t, s)?));
        };
        let num = parse_int(num, s)?;
        let den = match den.trim().split_once('^') {
            Some((base, exp)) => {
                if base.trim() != "2" {
                    return Err(Error::BadNumber(s.to_string()));
                }
                let exp: u32 = exp
                    .trim()
                    .parse()
                    .map_err(|_| Error::BadNumber(s.to_string()))?;
                BigInt::one() << exp
            }
            None => parse_int(den, s)?,
        };
        Rational::new(num, den)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `true` iff `n` is a positive power of two (1 counts).
pub fn is_power_of_two(n: u128) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Splits `n >= 1` as `2^m + r` with `0 <= r < 2^m`.
pub fn split_pow2(n: usize) -> (u32, usize) {
    assert!(n >= 1);
    let m = usize::BITS - 1 - n.leading_zeros();
    (m, n - (1usize << m))
}

/// Splits `n >= 1` as `2^a * b` with `b` odd.
pub fn split_odd(n: usize) -> (u32, usize) {
    assert!(n >= 1);
    let a = n.trailing_zeros();
    (a, n >> a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn d(num: i64, exp: u64) -> Dyadic {
        Dyadic::new(num, exp)
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(d(4, 3), Dyadic::pow2_inv(1));
        assert_eq!(d(0, 5).exp(), 0);
        assert!(d(0, 5).num().is_zero());
        let x = d(6, 2);
        assert_eq!((x.num().clone(), x.exp()), (BigInt::from(3), 1));
        // exponent never goes negative: 8 / 2^1 = 4
        let y = d(8, 1);
        assert_eq!((y.num().clone(), y.exp()), (BigInt::from(4), 0));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&d(1, 1) + &d(1, 2), d(3, 2));
        assert_eq!(&d(1, 1) * &d(1, 1), d(1, 2));
        assert_eq!(d(3, 2).cmp(&d(1, 1)), Ordering::Greater);
        assert_eq!(&d(1, 1) - &d(1, 1), Dyadic::zero());
        assert_eq!(d(1, 1).average(&d(0, 0)), d(1, 2));
    }

    /// Linear scan over d = 0, 1, 2, ... as an independent route to chi.
    fn chi_scan(f: &Dyadic) -> u64 {
        let q = f.to_rational();
        (0u64..)
            .find(|&k| q >= Dyadic::pow2_inv(k).to_rational())
            .unwrap()
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi(&d(1, 3)).unwrap(), 3);
        assert_eq!(chi(&Dyadic::one()).unwrap(), 0);
        assert_eq!(chi(&d(3, 2)).unwrap(), 1);
        assert_eq!(chi_scan(&d(3, 2)), 1);
    }

    #[test]
    fn chi_rejects_out_of_domain() {
        assert!(chi(&Dyadic::zero()).is_err());
        assert!(chi(&d(-1, 2)).is_err());
        assert!(chi(&d(3, 1)).is_err());
    }

    #[test]
    fn is_dyadic_examples() {
        assert!("3/8".parse::<Rational>().unwrap().is_dyadic());
        assert!(!"2/3".parse::<Rational>().unwrap().is_dyadic());
        assert!(Rational::zero().is_dyadic());
    }

    #[test]
    fn literal_syntax() {
        let q: Rational = "3/2^3".parse().unwrap();
        assert_eq!(q, Rational::new(3, 8).unwrap());
        assert_eq!(q.to_string(), "3/2^3");
        assert_eq!("6/4".parse::<Rational>().unwrap().to_string(), "3/2^1");
        assert_eq!("-2/6".parse::<Rational>().unwrap().to_string(), "-1/3");
        assert_eq!("5".parse::<Rational>().unwrap().to_string(), "5");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1/3^2".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert_eq!("5/2^2".parse::<Dyadic>().unwrap(), d(5, 2));
        assert!("1/3".parse::<Dyadic>().is_err());
        assert_eq!(d(-3, 4).to_string(), "-3/2^4");
    }

    #[test]
    fn pow2_splits() {
        assert_eq!(split_pow2(1), (0, 0));
        assert_eq!(split_pow2(3), (1, 1));
        assert_eq!(split_pow2(6), (2, 2));
        assert_eq!(split_pow2(16), (4, 0));
        assert_eq!(split_odd(12), (2, 3));
        assert!(is_power_of_two(1) && is_power_of_two(64) && !is_power_of_two(6));
    }

    fn small_dyadic() -> impl Strategy<Value = Dyadic> {
        (-200i64..200, 0u64..12).prop_map(|(n, e)| Dyadic::new(n, e))
    }

    fn unit_dyadic() -> impl Strategy<Value = Dyadic> {
        (1u64..14).prop_flat_map(|e| (1i64..=(1i64 << e)).prop_map(move |n| Dyadic::new(n, e)))
    }

    proptest! {
        #[test]
        fn add_mul_commute_and_associate(a in small_dyadic(), b in small_dyadic(), c in small_dyadic()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn normalize_is_idempotent(n in -10_000i64..10_000, e in 0u64..20) {
            let x = Dyadic::new(n, e);
            prop_assert_eq!(Dyadic::new(x.num().clone(), x.exp()), x.clone());
            prop_assert!(x.is_zero() && x.exp() == 0 || x.num().is_odd() || x.exp() == 0);
        }

        #[test]
        fn chi_brackets_value(f in unit_dyadic()) {
            let c = chi(&f).unwrap();
            prop_assert_eq!(c, chi_scan(&f));
            prop_assert!(f >= Dyadic::pow2_inv(c));
            if c > 0 {
                prop_assert!(f < Dyadic::pow2_inv(c - 1));
            }
        }

        #[test]
        fn dyadic_rational_round_trip(x in small_dyadic()) {
            let q = x.to_rational();
            prop_assert!(q.is_dyadic());
            prop_assert_eq!(q.to_dyadic().unwrap(), x.clone());
            prop_assert_eq!(x.to_string().parse::<Dyadic>().unwrap(), x);
        }

        #[test]
        fn cmp_matches_rational_order(a in small_dyadic(), b in small_dyadic()) {
            prop_assert_eq!(a.cmp(&b), a.to_rational().cmp(&b.to_rational()));
        }
    }
}
