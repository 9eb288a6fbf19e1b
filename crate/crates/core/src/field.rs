//! Exact field arithmetic.
//!
//! Algorithms are generic over [`Field`], a small context object that owns
//! the arithmetic. Elements are plain values (`BigRational` or a reduced
//! `u64` residue), so a prime modulus is stored once per field rather than
//! once per scalar. Two fields are compatible iff their [`FieldSpec`]s are
//! equal.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Runtime description of a concrete field, as it appears in file headers
/// and on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rational,
    Prime(u64),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "rational"),
            FieldSpec::Prime(p) => write!(f, "gf {p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `rational`, `gf <p>`, `gf:<p>` and `gf<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("rational") || s.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rational);
        }
        let rest = s
            .strip_prefix("gf")
            .or_else(|| s.strip_prefix("GF"))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown field {s:?}")))?;
        let digits = rest
            .trim_start_matches([':', ' ', '('])
            .trim_end_matches(')');
        let p: u64 = digits
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad prime modulus in {s:?}")))?;
        PrimeField::new(p)?;
        Ok(FieldSpec::Prime(p))
    }
}

/// An exact field.
pub trait Field: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync;

    fn spec(&self) -> FieldSpec;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn integer(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `inv(0)` is an error.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;

    /// Parses the textual scalar syntax of this field.
    fn parse(&self, s: &str) -> Result<Self::Elem>;
    /// Canonical text; `parse(format(a)) == a`.
    fn format(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Replaces every element by its inverse; fails if any is zero.
    fn inv_all(&self, xs: &mut [Self::Elem]) -> Result<()> {
        for x in xs.iter_mut() {
            *x = self.inv(x)?;
        }
        Ok(())
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// Fails with [`Error::FieldMismatch`] unless `other` is the same field.
    fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.spec() == other.spec() {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.spec().to_string(),
                right: other.spec().to_string(),
            })
        }
    }
}

/// The rationals, with arbitrary-precision numerator and denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rational
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn integer(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }

    fn parse(&self, s: &str) -> Result<BigRational> {
        parse_rational(s)
    }

    fn format(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

fn scalar_error(s: &str, reason: &str) -> Error {
    Error::Scalar {
        literal: s.to_string(),
        reason: reason.to_string(),
    }
}

/// Integers, `p/q` fractions and finite decimals (`-0.25` is `-1/4`).
fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(scalar_error(s, "empty"));
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = parse_int(num).ok_or_else(|| scalar_error(s, "bad numerator"))?;
        let den: BigInt = parse_int(den).ok_or_else(|| scalar_error(s, "bad denominator"))?;
        if den.is_zero() {
            return Err(scalar_error(s, "zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['+', '-']);
        let all_digits = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(whole_digits)
            || !all_digits(frac)
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return Err(scalar_error(s, "bad decimal"));
        }
        let digits = format!("{whole_digits}{frac}");
        let mut numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| scalar_error(s, "bad decimal"))?
        };
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(numer, denom));
    }
    parse_int(t)
        .map(BigRational::from_integer)
        .ok_or_else(|| scalar_error(s, "not a number"))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.trim_start_matches('+').parse().ok()
}

/// The prime field Z/pZ for a prime `p < 2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }
}

fn is_prime(p: u64) -> bool {
    if !(2..1 << 32).contains(&p) {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn integer(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }

    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }

    fn inv(&self, a: &u64) -> Result<u64> {
        if *a == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.pow(*a, self.p - 2))
        }
    }

    /// One exponentiation for the whole slice (prefix products).
    fn inv_all(&self, xs: &mut [u64]) -> Result<()> {
        let mut prefix = Vec::with_capacity(xs.len());
        let mut acc = self.one();
        for x in xs.iter() {
            prefix.push(acc);
            acc = self.mul(&acc, x);
        }
        let mut inv = self.inv(&acc)?;
        for (x, before) in xs.iter_mut().zip(prefix).rev() {
            let next = self.mul(&inv, x);
            *x = self.mul(&inv, &before);
            inv = next;
        }
        Ok(())
    }

    /// Integer literals only, reduced mod p.
    fn parse(&self, s: &str) -> Result<u64> {
        let v = parse_int(s).ok_or_else(|| scalar_error(s, "prime-field literals are integers"))?;
        let r = v.mod_floor_u64(self.p);
        Ok(r)
    }

    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        let m = BigInt::from(p);
        let r = ((self % &m) + &m) % &m;
        let (_, digits) = r.abs().to_u64_digits();
        digits.first().copied().unwrap_or(0)
    }
}
