//! Exact scalars: the rationals or a prime field `F_p`.
//!
//! Every computation in the crate is parameterised by a [`Field`] chosen at
//! run time. Scalars of different fields never mix; doing so is a logic error
//! and panics.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default prime for the modular fast path.
pub const DEFAULT_PRIME: u64 = 32003;

/// The ground field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// Builds `F_p`, checking that `p` is prime and small enough for `u64`
    /// products not to overflow.
    pub fn prime(p: u64) -> Result<Self> {
        if p < 2 || p >= 1 << 31 || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime below 2^31")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(self) -> FieldElement {
        match self {
            Field::Rational => FieldElement::Rational(BigRational::zero()),
            Field::Prime(p) => FieldElement::Modular { value: 0, modulus: p },
        }
    }

    pub fn one(self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> FieldElement {
        match self {
            Field::Rational => FieldElement::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => FieldElement::Modular {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    /// Embeds a rational number. Fails in `F_p` when `p` divides the denominator.
    pub fn from_ratio(self, num: i64, den: i64) -> Result<FieldElement> {
        if den == 0 {
            return Err(Error::InvalidField("zero denominator".into()));
        }
        match self {
            Field::Rational => Ok(FieldElement::Rational(BigRational::new(
                BigInt::from(num),
                BigInt::from(den),
            ))),
            Field::Prime(_) => {
                let d = self.from_i64(den);
                if d.is_zero() {
                    return Err(Error::InvalidField(format!(
                        "denominator {den} vanishes in {self}"
                    )));
                }
                Ok(self.from_i64(num) * d.inverse())
            }
        }
    }

    /// Parses `"3"`, `"-2/5"` into the field.
    pub fn parse(self, s: &str) -> Result<FieldElement> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: i64 = n
            .parse()
            .map_err(|_| Error::InvalidField(format!("bad scalar {s:?}")))?;
        let d: i64 = d
            .parse()
            .map_err(|_| Error::InvalidField(format!("bad scalar {s:?}")))?;
        self.from_ratio(n, d)
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    /// Accepts `Q`, `Fp` (default prime) or `Fp:PRIME`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" | "q" => Ok(Field::Rational),
            "Fp" | "fp" => Field::prime(DEFAULT_PRIME),
            _ => match s.strip_prefix("Fp:").or_else(|| s.strip_prefix("fp:")) {
                Some(p) => Field::prime(
                    p.parse()
                        .map_err(|_| Error::InvalidField(format!("bad prime {p:?}")))?,
                ),
                None => Err(Error::InvalidField(format!("unknown field {s:?}"))),
            },
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact scalar. Rationals are kept in lowest terms with positive
/// denominator (guaranteed by `BigRational`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(BigRational),
    Modular { value: u64, modulus: u64 },
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Rational(_) => Field::Rational,
            FieldElement::Modular { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_zero(),
            FieldElement::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_one(),
            FieldElement::Modular { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inverse(&self) -> FieldElement {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            FieldElement::Rational(r) => FieldElement::Rational(r.recip()),
            FieldElement::Modular { value, modulus } => FieldElement::Modular {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        }
    }

    /// Small-integer view, if the element is an integer that fits in `i64`.
    /// Modular elements are returned in the symmetric range.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            FieldElement::Rational(r) => {
                if r.is_integer() {
                    r.to_integer().to_i64()
                } else {
                    None
                }
            }
            FieldElement::Modular { value, modulus } => {
                let v = *value as i64;
                let m = *modulus as i64;
                Some(if v > m / 2 { v - m } else { v })
            }
        }
    }

    fn check_same(&self, other: &FieldElement) {
        debug_assert_eq!(self.field(), other.field(), "mixed fields");
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            FieldElement::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.check_same(rhs);
        match (self, rhs) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a + b),
            (
                FieldElement::Modular { value: a, modulus },
                FieldElement::Modular { value: b, .. },
            ) => FieldElement::Modular {
                value: (a + b) % modulus,
                modulus: *modulus,
            },
            _ => panic!("mixed fields"),
        }
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        &self + &rhs
    }
}

impl AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        match (&mut *self, rhs) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => *a += b,
            (
                FieldElement::Modular { value: a, modulus },
                FieldElement::Modular { value: b, .. },
            ) => *a = (*a + b) % *modulus,
            _ => panic!("mixed fields"),
        }
    }
}

impl SubAssign<&FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &FieldElement) {
        match (&mut *self, rhs) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => *a -= b,
            (
                FieldElement::Modular { value: a, modulus },
                FieldElement::Modular { value: b, .. },
            ) => *a = (*a + *modulus - b) % *modulus,
            _ => panic!("mixed fields"),
        }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(mut self, rhs: FieldElement) -> FieldElement {
        self -= &rhs;
        self
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        match (self, rhs) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a * b),
            (
                FieldElement::Modular { value: a, modulus },
                FieldElement::Modular { value: b, .. },
            ) => FieldElement::Modular {
                value: a * b % modulus,
                modulus: *modulus,
            },
            _ => panic!("mixed fields"),
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        &self * &rhs
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Rational(a) => FieldElement::Rational(-a),
            FieldElement::Modular { value, modulus } => FieldElement::Modular {
                value: (modulus - value) % modulus,
                modulus,
            },
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -self.clone()
    }
}

/// Sign helper: `(-1)^k` as a field element.
pub fn sign(field: Field, k: i64) -> FieldElement {
    if k.rem_euclid(2) == 0 {
        field.one()
    } else {
        field.from_i64(-1)
    }
}

/// `true` when the rational is negative; modular elements are never negative.
pub fn is_negative(x: &FieldElement) -> bool {
    matches!(x, FieldElement::Rational(r) if r.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_lowest_terms() {
        let q = Field::Rational;
        let x = q.from_ratio(6, -4).unwrap();
        assert_eq!(x.to_string(), "-3/2");
        assert_eq!(q.parse("-3/2").unwrap(), x);
    }

    #[test]
    fn inverses_and_negation() {
        for field in [Field::Rational, Field::prime(32003).unwrap(), Field::prime(7).unwrap()] {
            for v in [1i64, 2, 3, 5, -6, 100] {
                let a = field.from_i64(v);
                assert!((&a + &(-&a)).is_zero());
                assert!((&a * &a.inverse()).is_one());
            }
        }
    }

    #[test]
    fn prime_field_parse_and_reject() {
        assert_eq!("Fp:7".parse::<Field>().unwrap(), Field::Prime(7));
        assert_eq!("Fp".parse::<Field>().unwrap(), Field::Prime(DEFAULT_PRIME));
        assert!("Fp:8".parse::<Field>().is_err());
        let f7 = Field::Prime(7);
        assert!(f7.from_ratio(1, 7).is_err());
        assert_eq!(f7.from_ratio(1, 2).unwrap(), f7.from_i64(4));
        assert_eq!(f7.from_i64(-1).to_i64(), Some(-1));
    }
}
