//! Exact arithmetic in `Z[1/p]` and base-`p` digit expansions of `N[1/p]`.
//!
//! The prime is a session parameter carried by [`Zp`]; individual
//! [`LocalizedRational`] values do not store it. Every value is kept in
//! canonical form `num / p^pexp` with `p ∤ num` whenever `pexp > 0`, so
//! derived equality and hashing are value equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element `num / p^pexp` of `Z[1/p]`, for the prime of the owning [`Zp`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalizedRational {
    num: BigInt,
    pexp: u32,
}

impl LocalizedRational {
    pub fn zero() -> Self {
        LocalizedRational { num: BigInt::zero(), pexp: 0 }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn pexp(&self) -> u32 {
        self.pexp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.pexp == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    /// The integer value, when `pexp == 0`.
    pub fn as_integer(&self) -> Option<&BigInt> {
        (self.pexp == 0).then_some(&self.num)
    }
}

/// Finite base-`p` expansion `Σ digits[i] p^i` of an element of `N[1/p]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitExpansion {
    p: u64,
    digits: BTreeMap<i64, u64>,
}

impl DigitExpansion {
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Digit at position `i` (zero outside the support).
    pub fn digit(&self, i: i64) -> u64 {
        self.digits.get(&i).copied().unwrap_or(0)
    }

    /// Nonzero digits, lowest position first.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.digits.iter().map(|(&i, &d)| (i, d))
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Lowest and highest positions carrying a nonzero digit.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.digits.keys().next()?;
        let hi = *self.digits.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn as_map(&self) -> &BTreeMap<i64, u64> {
        &self.digits
    }
}

/// Arithmetic context for `Z[1/p]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zp {
    p: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Zp {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Zp { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    pub fn p_pow(&self, k: u32) -> BigInt {
        num_traits::pow(self.p_big(), k as usize)
    }

    /// `p`-adic valuation of a nonzero integer.
    pub fn int_valuation(&self, n: &BigInt) -> Option<u32> {
        if n.is_zero() {
            return None;
        }
        let p = self.p_big();
        let mut v = 0;
        let mut m = n.clone();
        loop {
            let (q, r) = m.div_rem(&p);
            if !r.is_zero() {
                return Some(v);
            }
            m = q;
            v += 1;
        }
    }

    fn canonical(&self, mut num: BigInt, mut pexp: u32) -> LocalizedRational {
        if num.is_zero() {
            return LocalizedRational::zero();
        }
        let p = self.p_big();
        while pexp > 0 {
            let (q, r) = num.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            num = q;
            pexp -= 1;
        }
        LocalizedRational { num, pexp }
    }

    pub fn int(&self, n: impl Into<BigInt>) -> LocalizedRational {
        LocalizedRational { num: n.into(), pexp: 0 }
    }

    /// `num / p^pexp`, canonicalized.
    pub fn frac(&self, num: impl Into<BigInt>, pexp: u32) -> LocalizedRational {
        self.canonical(num.into(), pexp)
    }

    pub fn one(&self) -> LocalizedRational {
        self.int(1)
    }

    /// Converts an arbitrary rational, failing when its denominator is not a power of `p`.
    pub fn from_rational(&self, q: &BigRational) -> Result<LocalizedRational> {
        let den = q.denom();
        let mut d = den.clone();
        let p = self.p_big();
        let mut k = 0u32;
        while !d.is_one() {
            let (qq, r) = d.div_rem(&p);
            if !r.is_zero() {
                return Err(Error::NotInRing {
                    p: self.p,
                    detail: format!("{q} has denominator {den}"),
                });
            }
            d = qq;
            k += 1;
        }
        Ok(self.canonical(q.numer().clone(), k))
    }

    pub fn to_rational(&self, x: &LocalizedRational) -> BigRational {
        BigRational::new(x.num.clone(), self.p_pow(x.pexp))
    }

    fn align(&self, a: &LocalizedRational, b: &LocalizedRational) -> (BigInt, BigInt, u32) {
        let e = a.pexp.max(b.pexp);
        let an = &a.num * self.p_pow(e - a.pexp);
        let bn = &b.num * self.p_pow(e - b.pexp);
        (an, bn, e)
    }

    pub fn add(&self, a: &LocalizedRational, b: &LocalizedRational) -> LocalizedRational {
        let (an, bn, e) = self.align(a, b);
        self.canonical(an + bn, e)
    }

    pub fn sub(&self, a: &LocalizedRational, b: &LocalizedRational) -> LocalizedRational {
        let (an, bn, e) = self.align(a, b);
        self.canonical(an - bn, e)
    }

    pub fn neg(&self, a: &LocalizedRational) -> LocalizedRational {
        LocalizedRational { num: -&a.num, pexp: a.pexp }
    }

    pub fn mul(&self, a: &LocalizedRational, b: &LocalizedRational) -> LocalizedRational {
        self.canonical(&a.num * &b.num, a.pexp + b.pexp)
    }

    /// Multiplies by `p^k` for any integer `k`.
    pub fn mul_pow(&self, a: &LocalizedRational, k: i64) -> LocalizedRational {
        if k >= 0 {
            self.canonical(&a.num * self.p_pow(k as u32), a.pexp)
        } else {
            self.canonical(a.num.clone(), a.pexp + (-k) as u32)
        }
    }

    /// Is `x = ±p^k` for some `k ∈ Z`?
    pub fn is_unit(&self, x: &LocalizedRational) -> bool {
        if x.is_zero() {
            return false;
        }
        let a = x.num.abs();
        let v = self.int_valuation(&a).unwrap_or(0);
        a == self.p_pow(v)
    }

    /// Division, defined only when `b` is a unit `±p^k`.
    pub fn div(&self, a: &LocalizedRational, b: &LocalizedRational) -> Result<LocalizedRational> {
        if !self.is_unit(b) {
            return Err(Error::NotAUnit(self.format(b)));
        }
        let k = self.valuation(b).unwrap_or(0);
        let r = self.mul_pow(a, -k);
        Ok(if b.is_negative() { self.neg(&r) } else { r })
    }

    /// `p`-adic valuation (may be negative); `None` for zero.
    pub fn valuation(&self, x: &LocalizedRational) -> Option<i64> {
        let v = self.int_valuation(&x.num)?;
        Some(v as i64 - x.pexp as i64)
    }

    pub fn cmp(&self, a: &LocalizedRational, b: &LocalizedRational) -> Ordering {
        let (an, bn, _) = self.align(a, b);
        an.cmp(&bn)
    }

    pub fn format(&self, x: &LocalizedRational) -> String {
        if x.pexp == 0 {
            x.num.to_string()
        } else {
            format!("{}/{}", x.num, self.p_pow(x.pexp))
        }
    }

    /// Parses `"num"` or `"num/den"` where `den` must be a positive power of `p`.
    pub fn parse(&self, s: &str) -> Result<LocalizedRational> {
        let err = |reason: &str| Error::ParseScalar { input: s.to_string(), reason: reason.to_string() };
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (t, None),
        };
        let num: BigInt = n.parse().map_err(|_| err("numerator is not an integer"))?;
        let Some(d) = d else {
            return Ok(self.int(num));
        };
        if d.contains('^') {
            return Err(err("denominator must be written out, e.g. 5/9"));
        }
        let den: BigInt = d.parse().map_err(|_| err("denominator is not an integer"))?;
        if den.sign() != Sign::Plus {
            return Err(err("denominator must be positive"));
        }
        let Some(k) = self.int_valuation(&den) else {
            return Err(err("zero denominator"));
        };
        if den != self.p_pow(k) {
            return Err(err(&format!("denominator is not a power of {}", self.p)));
        }
        Ok(self.canonical(num, k))
    }

    pub fn to_digits(&self, x: &LocalizedRational) -> Result<DigitExpansion> {
        if x.is_negative() {
            return Err(Error::NegativeValue(self.format(x)));
        }
        let p = self.p_big();
        let mut digits = BTreeMap::new();
        let mut m = x.num.clone();
        let mut pos = -(x.pexp as i64);
        while !m.is_zero() {
            let (q, r) = m.div_rem(&p);
            let d = r.to_u64().expect("digit below p");
            if d != 0 {
                digits.insert(pos, d);
            }
            m = q;
            pos += 1;
        }
        Ok(DigitExpansion { p: self.p, digits })
    }

    pub fn from_digits(&self, d: &DigitExpansion) -> LocalizedRational {
        let mut acc = LocalizedRational::zero();
        for (i, digit) in d.iter() {
            acc = self.add(&acc, &self.mul_pow(&self.int(digit), i));
        }
        acc
    }

    /// `(n choose j)_0`: the last base-`p` digit of `binom(p^l n, p^l j)` for any
    /// `l` clearing denominators. Zero when `j > n` or either argument is negative.
    pub fn lucas_digit(&self, n: &LocalizedRational, j: &LocalizedRational) -> u64 {
        if n.is_negative() || j.is_negative() {
            return 0;
        }
        let (Ok(nd), Ok(jd)) = (self.to_digits(n), self.to_digits(j)) else {
            return 0;
        };
        let mut acc = 1u64;
        for (i, ji) in jd.iter() {
            let ni = nd.digit(i);
            if ji > ni {
                return 0;
            }
            acc = mul_mod(acc, binom_small_mod(ni, ji, self.p), self.p);
        }
        acc
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// `binom(a, b) mod p` for `0 <= a, b < p`, `p` prime.
pub fn binom_small_mod(a: u64, b: u64, p: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..b {
        num = mul_mod(num, (a - i) % p, p);
        den = mul_mod(den, (i + 1) % p, p);
    }
    mul_mod(num, pow_mod(den, p - 2, p), p)
}

impl fmt::Display for DigitExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(|(i, d)| format!("{i}:{d}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
