use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::LinError;

/// The base field: a prime field GF(p) or the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Prime(u64),
    Rationals,
}

impl FieldSpec {
    /// GF(p). The modulus is checked for primality by trial division.
    pub fn prime(p: u64) -> Result<Self, LinError> {
        if !is_prime(p) {
            return Err(LinError::NotPrime(p));
        }
        // keeps products of reduced residues inside u64
        if p > u32::MAX as u64 {
            return Err(LinError::ModulusTooLarge(p));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => Scalar::Mod { value: n.rem_euclid(p as i64) as u64, modulus: p },
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        match (self, x) {
            (FieldSpec::Prime(p), Scalar::Mod { value, modulus }) => p == modulus && value < p,
            (FieldSpec::Rationals, Scalar::Rat(_)) => true,
            _ => false,
        }
    }

    /// Characteristic of the field (0 for the rationals).
    pub fn characteristic(&self) -> u64 {
        match *self {
            FieldSpec::Prime(p) => p,
            FieldSpec::Rationals => 0,
        }
    }

    /// Serialized element: an integer for GF(p), an `"n/d"` string for the rationals.
    pub fn elem_to_json(&self, x: &Scalar) -> serde_json::Value {
        match x {
            Scalar::Mod { value, .. } => serde_json::Value::from(*value),
            Scalar::Rat(q) => serde_json::Value::String(format!("{}/{}", q.numer(), q.denom())),
        }
    }

    pub fn elem_from_json(&self, v: &serde_json::Value) -> Result<Scalar, LinError> {
        match *self {
            FieldSpec::Prime(p) => {
                let n = v.as_u64().ok_or_else(|| LinError::Parse(format!("expected integer residue, got {v}")))?;
                if n >= p {
                    return Err(LinError::Parse(format!("residue {n} out of range for gf{p}")));
                }
                Ok(Scalar::Mod { value: n, modulus: p })
            }
            FieldSpec::Rationals => {
                let s = v.as_str().ok_or_else(|| LinError::Parse(format!("expected \"n/d\" string, got {v}")))?;
                parse_rational(s).map(Scalar::Rat)
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "gf{p}"),
            FieldSpec::Rationals => write!(f, "q"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = LinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "q" {
            return Ok(FieldSpec::Rationals);
        }
        let p = s
            .strip_prefix("gf")
            .and_then(|rest| rest.parse::<u64>().ok())
            .ok_or_else(|| LinError::Parse(format!("unknown field '{s}' (expected gf<p> or q)")))?;
        FieldSpec::prime(p)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
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

fn parse_rational(s: &str) -> Result<BigRational, LinError> {
    let bad = || LinError::Parse(format!("malformed rational '{s}'"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// An exact field element. GF(p) residues carry their modulus so that
/// arithmetic never needs an ambient context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod { value: u64, modulus: u64 },
    Rat(BigRational),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 0,
            Scalar::Rat(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 1,
            Scalar::Rat(q) => q.is_one(),
        }
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Mod { modulus, .. } => FieldSpec::Prime(*modulus),
            Scalar::Rat(_) => FieldSpec::Rationals,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Mod { value, modulus } => {
                Some(Scalar::Mod { value: pow_mod(*value, modulus - 2, *modulus), modulus: *modulus })
            }
            Scalar::Rat(q) => Some(Scalar::Rat(q.recip())),
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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
            Scalar::Mod { value, .. } => write!(f, "{value}"),
            Scalar::Rat(q) if q.denom().is_one() => write!(f, "{}", q.numer()),
            Scalar::Rat(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("field mismatch in scalar arithmetic: {a:?} vs {b:?}")
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Mod { value: a, modulus: p }, Scalar::Mod { value: b, modulus: q }) if p == q => {
                Scalar::Mod { value: (a + b) % p, modulus: *p }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Mod { value: a, modulus: p }, Scalar::Mod { value: b, modulus: q }) if p == q => {
                Scalar::Mod { value: (a + p - b) % p, modulus: *p }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a - b),
            _ => mismatch(self, rhs),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Mod { value: a, modulus: p }, Scalar::Mod { value: b, modulus: q }) if p == q => {
                Scalar::Mod { value: a * b % p, modulus: *p }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Mod { value, modulus } => Scalar::Mod { value: (modulus - value) % modulus, modulus: *modulus },
            Scalar::Rat(q) => Scalar::Rat(-q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_by_trial_division() {
        assert!(FieldSpec::prime(5).is_ok());
        assert!(FieldSpec::prime(7).is_ok());
        assert!(matches!(FieldSpec::prime(6), Err(LinError::NotPrime(6))));
        assert!(FieldSpec::prime(1).is_err());
    }

    #[test]
    fn gf_inverse_and_negation() {
        let f = FieldSpec::prime(7).unwrap();
        for n in 1..7 {
            let a = f.from_i64(n);
            assert!((&a * &a.inv().unwrap()).is_one());
            assert!((&a + &(-&a)).is_zero());
        }
        assert!(f.zero().inv().is_none());
    }

    #[test]
    fn rational_serialization_lowest_terms() {
        let q = FieldSpec::Rationals;
        let x = q.elem_from_json(&serde_json::json!("6/-4")).unwrap();
        assert_eq!(q.elem_to_json(&x), serde_json::json!("-3/2"));
        assert!(q.elem_from_json(&serde_json::json!("1/0")).is_err());
    }

    #[test]
    fn field_names_round_trip() {
        for s in ["gf5", "gf7", "q"] {
            assert_eq!(s.parse::<FieldSpec>().unwrap().to_string(), s);
        }
        assert!("gf9".parse::<FieldSpec>().is_err());
        assert!("r".parse::<FieldSpec>().is_err());
    }
}
