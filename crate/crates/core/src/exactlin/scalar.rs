//! Exact scalars: arbitrary-precision rationals and odd prime fields.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus accepted for prime fields; keeps products inside `u64`.
pub const MAX_MODULUS: u32 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("modulus {0} is not an odd prime below 2^31")]
    BadModulus(u64),
    #[error("cannot parse scalar {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("scalar kind mismatch: {0} vs {1}")]
    KindMismatch(ScalarKind, ScalarKind),
}

/// The field a scalar lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScalarKind {
    Rational,
    Prime { modulus: u32 },
}

impl ScalarKind {
    /// GF(p) for an odd prime `p`.
    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if p < 3 || p >= MAX_MODULUS as u64 || p % 2 == 0 || !is_prime(p) {
            return Err(ScalarError::BadModulus(p));
        }
        Ok(ScalarKind::Prime { modulus: p as u32 })
    }

    pub fn check(self, other: ScalarKind) -> Result<(), ScalarError> {
        if self == other {
            Ok(())
        } else {
            Err(ScalarError::KindMismatch(self, other))
        }
    }
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::Rational => write!(f, "Q"),
            ScalarKind::Prime { modulus } => write!(f, "GF({modulus})"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element. Rationals are boxed to keep the enum small.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(Box<BigRational>),
    Prime { value: u32, modulus: u32 },
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar kind mismatch: {} vs {}", a.kind(), b.kind())
}

impl Scalar {
    pub fn zero(kind: ScalarKind) -> Self {
        Self::from_i64(kind, 0)
    }

    pub fn one(kind: ScalarKind) -> Self {
        Self::from_i64(kind, 1)
    }

    pub fn from_i64(kind: ScalarKind, n: i64) -> Self {
        match kind {
            ScalarKind::Rational => Scalar::Rational(Box::new(BigRational::from_integer(n.into()))),
            ScalarKind::Prime { modulus } => Scalar::Prime {
                value: n.rem_euclid(modulus as i64) as u32,
                modulus,
            },
        }
    }

    pub fn from_rational(kind: ScalarKind, num: i64, den: i64) -> Result<Self, ScalarError> {
        if den == 0 {
            return Err(ScalarError::Parse {
                text: format!("{num}/{den}"),
                reason: "zero denominator".into(),
            });
        }
        let n = Self::from_i64(kind, num);
        let d = Self::from_i64(kind, den).inv().ok_or_else(|| ScalarError::Parse {
            text: format!("{num}/{den}"),
            reason: format!("denominator vanishes in {kind}"),
        })?;
        Ok(&n * &d)
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            Scalar::Rational(_) => ScalarKind::Rational,
            Scalar::Prime { modulus, .. } => ScalarKind::Prime { modulus: *modulus },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Prime { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Prime { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(Box::new(r.recip())),
            Scalar::Prime { value, modulus } => Scalar::Prime {
                value: pow_mod(*value as u64, *modulus as u64 - 2, *modulus as u64) as u32,
                modulus: *modulus,
            },
        })
    }

    /// Uniform element of GF(p), or a small integer in [-3, 3] over Q.
    pub fn random<R: Rng + ?Sized>(kind: ScalarKind, rng: &mut R) -> Self {
        match kind {
            ScalarKind::Rational => Self::from_i64(kind, rng.gen_range(-3..=3)),
            ScalarKind::Prime { modulus } => Scalar::Prime {
                value: rng.gen_range(0..modulus),
                modulus,
            },
        }
    }

    /// Random nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(kind: ScalarKind, rng: &mut R) -> Self {
        loop {
            let s = Self::random(kind, rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// Parses `"n"` or `"n/d"` into the given field.
    pub fn parse(kind: ScalarKind, text: &str) -> Result<Self, ScalarError> {
        let bad = |reason: &str| ScalarError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let t = text.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad("invalid numerator"))?;
        let den: BigInt = den.parse().map_err(|_| bad("invalid denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        match kind {
            ScalarKind::Rational => Ok(Scalar::Rational(Box::new(BigRational::new(num, den)))),
            ScalarKind::Prime { modulus } => {
                let m = BigInt::from(modulus);
                let reduce = |x: BigInt| -> u32 {
                    let r = ((x % &m) + &m) % &m;
                    u32::try_from(r).expect("residue below modulus")
                };
                let n = Scalar::Prime { value: reduce(num), modulus };
                let d = Scalar::Prime { value: reduce(den), modulus };
                let d = d.inv().ok_or_else(|| bad("denominator vanishes mod p"))?;
                Ok(&n * &d)
            }
        }
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

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Prime { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(Box::new(&**a + &**b)),
            (Scalar::Prime { value: a, modulus: p }, Scalar::Prime { value: b, modulus: q })
                if p == q =>
            {
                Scalar::Prime {
                    value: ((*a as u64 + *b as u64) % *p as u64) as u32,
                    modulus: *p,
                }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(Box::new(&**a * &**b)),
            (Scalar::Prime { value: a, modulus: p }, Scalar::Prime { value: b, modulus: q })
                if p == q =>
            {
                Scalar::Prime {
                    value: ((*a as u64 * *b as u64) % *p as u64) as u32,
                    modulus: *p,
                }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(Box::new(-&**a)),
            Scalar::Prime { value, modulus } => Scalar::Prime {
                value: (*modulus - *value) % *modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Prime { value: a, modulus: p }, Scalar::Prime { value: b, modulus: q })
                if p == q =>
            {
                *a = ((*a as u64 + *b as u64) % *p as u64) as u32;
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => **a += &**b,
            _ => mismatch(self, rhs),
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self += &(-rhs);
    }
}

/// True when the rational is negative; prime-field values are never negative.
pub fn is_negative(s: &Scalar) -> bool {
    matches!(s, Scalar::Rational(r) if r.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::from_i64(ScalarKind::Rational, n)
    }

    #[test]
    fn rejects_even_and_composite_moduli() {
        assert!(ScalarKind::prime(2).is_err());
        assert!(ScalarKind::prime(9).is_err());
        assert!(ScalarKind::prime(1).is_err());
        assert!(ScalarKind::prime(5).is_ok());
    }

    #[test]
    fn rationals_stay_reduced() {
        let k = ScalarKind::Rational;
        let half = Scalar::parse(k, "2/4").unwrap();
        assert_eq!(half.to_string(), "1/2");
        let neg = Scalar::parse(k, "3/-6").unwrap();
        assert_eq!(neg.to_string(), "-1/2");
        assert_eq!((&half + &neg).to_string(), "0");
    }

    #[test]
    fn prime_field_arithmetic() {
        let k = ScalarKind::prime(5).unwrap();
        let a = Scalar::from_i64(k, 3);
        let b = Scalar::from_i64(k, -1);
        assert_eq!((&a * &b).to_string(), "2");
        assert_eq!(a.inv().unwrap().to_string(), "2");
        assert_eq!(Scalar::parse(k, "1/2").unwrap().to_string(), "3");
        assert!(Scalar::zero(k).inv().is_none());
    }

    #[test]
    fn negation_and_subtraction() {
        assert_eq!((q(2) - q(5)).to_string(), "-3");
        assert!(is_negative(&-q(1)));
        let k = ScalarKind::prime(7).unwrap();
        assert_eq!((-Scalar::from_i64(k, 0)).to_string(), "0");
    }

    #[test]
    #[should_panic(expected = "kind mismatch")]
    fn mixing_kinds_panics() {
        let _ = q(1) + Scalar::from_i64(ScalarKind::prime(3).unwrap(), 1);
    }
}
