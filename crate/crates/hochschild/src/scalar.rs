//! Exact field arithmetic over ℚ and prime fields F_p.
//!
//! Every coefficient in the engine is a [`Scalar`]: either an arbitrary-precision
//! rational in lowest terms, or a canonical residue mod a prime. A scalar carries
//! its [`Field`] descriptor and binary operations refuse to mix fields, so a
//! computation started over F_p can never silently pick up rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// The coefficient field: ℚ or F_p for a prime p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    Prime(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("operands live in different fields: {0} vs {1}")]
    MixedFields(Field, Field),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
}

impl Field {
    /// F_p, validating that `p` is prime.
    pub fn prime(p: u64) -> Result<Field, ScalarError> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(ScalarError::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).is_some_and(|sq| sq <= n) {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Rat(BigRational),
    /// Residue in [0, p).
    Res(u64),
}

/// An exact field element in canonical form.
///
/// Rationals are kept in lowest terms with positive denominator (delegated to
/// `BigRational`); residues are reduced to `[0, p)` at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    field: Field,
    repr: Repr,
}

impl Scalar {
    pub fn zero(field: Field) -> Scalar {
        Scalar::from_integer(field, 0)
    }

    pub fn one(field: Field) -> Scalar {
        Scalar::from_integer(field, 1)
    }

    pub fn from_integer(field: Field, n: i64) -> Scalar {
        match field {
            Field::Rationals => Scalar {
                field,
                repr: Repr::Rat(BigRational::from_integer(BigInt::from(n))),
            },
            Field::Prime(p) => {
                let r = n.rem_euclid(p as i64) as u64;
                Scalar { field, repr: Repr::Res(r) }
            }
        }
    }

    /// num/den over ℚ. Panics if `den == 0`.
    pub fn rational(num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        Scalar {
            field: Field::Rationals,
            repr: Repr::Rat(BigRational::new(BigInt::from(num), BigInt::from(den))),
        }
    }

    pub fn residue(p: u64, r: u64) -> Scalar {
        Scalar { field: Field::Prime(p), repr: Repr::Res(r % p) }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Rat(q) => q.is_zero(),
            Repr::Res(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Rat(q) => q.is_one(),
            Repr::Res(r) => *r == 1,
        }
    }

    fn binop(
        &self,
        other: &Scalar,
        rat: impl Fn(&BigRational, &BigRational) -> BigRational,
        res: impl Fn(u64, u64, u64) -> u64,
    ) -> Result<Scalar, ScalarError> {
        if self.field != other.field {
            return Err(ScalarError::MixedFields(self.field, other.field));
        }
        let repr = match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(rat(a, b)),
            (Repr::Res(a), Repr::Res(b)) => {
                let Field::Prime(p) = self.field else { unreachable!() };
                Repr::Res(res(*a, *b, p))
            }
            _ => unreachable!("repr always matches field"),
        };
        Ok(Scalar { field: self.field, repr })
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.binop(other, |a, b| a + b, add_mod)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.binop(other, |a, b| a - b, |a, b, p| add_mod(a, p - b % p, p))
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.binop(other, |a, b| a * b, mul_mod)
    }

    pub fn neg(&self) -> Scalar {
        let repr = match &self.repr {
            Repr::Rat(q) => Repr::Rat(-q),
            Repr::Res(r) => {
                let Field::Prime(p) = self.field else { unreachable!() };
                Repr::Res(if *r == 0 { 0 } else { p - r })
            }
        };
        Scalar { field: self.field, repr }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let repr = match &self.repr {
            Repr::Rat(q) => Repr::Rat(q.recip()),
            Repr::Res(r) => {
                let Field::Prime(p) = self.field else { unreachable!() };
                Repr::Res(inv_mod(*r, p).expect("nonzero residue mod prime is invertible"))
            }
        };
        Ok(Scalar { field: self.field, repr })
    }

    /// `self * other^{-1}`.
    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.checked_mul(&other.inv()?)
    }

    /// Multiply by a plain integer (sign handling included).
    pub fn scale_int(&self, n: i64) -> Scalar {
        &Scalar::from_integer(self.field, n) * self
    }
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> Option<u64> {
    // extended Euclid on signed 128-bit
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(p as i128) as u64)
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar fields must agree")
            }
        }
    };
}
panicking_op!(Add, add, checked_add);
panicking_op!(Sub, sub, checked_sub);
panicking_op!(Mul, mul, checked_mul);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl Scalar {
    /// Compact rendering for use inside larger expressions: the modulus is
    /// implied by context, so residues print as bare integers.
    pub fn render_short(&self) -> String {
        match &self.repr {
            Repr::Rat(q) => {
                if q.denom().is_one() {
                    q.numer().to_string()
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                }
            }
            Repr::Res(r) => r.to_string(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rat(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Repr::Res(r) => {
                let Field::Prime(p) = self.field else { unreachable!() };
                write!(f, "{r} mod {p}")
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(2))?;
        match &self.repr {
            Repr::Rat(q) => {
                map.serialize_entry("num", &q.numer().to_string())?;
                map.serialize_entry("den", &q.denom().to_string())?;
            }
            Repr::Res(r) => {
                let Field::Prime(p) = self.field else { unreachable!() };
                map.serialize_entry("res", r)?;
                map.serialize_entry("p", &p)?;
            }
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Scalar, D::Error> {
        let value = serde_json::Value::deserialize(de)?;
        let obj = value.as_object().ok_or_else(|| D::Error::custom("scalar must be an object"))?;
        if let (Some(num), Some(den)) = (obj.get("num"), obj.get("den")) {
            let parse = |v: &serde_json::Value| -> Result<BigInt, D::Error> {
                match v {
                    serde_json::Value::String(s) => {
                        s.parse().map_err(|_| D::Error::custom("bad integer"))
                    }
                    serde_json::Value::Number(n) => {
                        Ok(BigInt::from(n.as_i64().ok_or_else(|| D::Error::custom("bad integer"))?))
                    }
                    _ => Err(D::Error::custom("bad integer")),
                }
            };
            let den = parse(den)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            return Ok(Scalar {
                field: Field::Rationals,
                repr: Repr::Rat(BigRational::new(parse(num)?, den)),
            });
        }
        if let (Some(res), Some(p)) = (obj.get("res"), obj.get("p")) {
            let p = p.as_u64().ok_or_else(|| D::Error::custom("bad modulus"))?;
            let field = Field::prime(p).map_err(D::Error::custom)?;
            let res = res.as_u64().ok_or_else(|| D::Error::custom("bad residue"))?;
            let Field::Prime(p) = field else { unreachable!() };
            return Ok(Scalar { field, repr: Repr::Res(res % p) });
        }
        Err(D::Error::custom("expected {num,den} or {res,p}"))
    }
}

/// Sign of a BigRational-backed scalar, used only for pretty-printing.
pub(crate) fn is_negative_for_display(s: &Scalar) -> bool {
    match &s.repr {
        Repr::Rat(q) => q.is_negative(),
        Repr::Res(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_examples() {
        // add(1/2, 1/3) = 5/6
        let sum = &Scalar::rational(1, 2) + &Scalar::rational(1, 3);
        assert_eq!(sum, Scalar::rational(5, 6));
        assert_eq!(sum.to_string(), "5/6");
    }

    #[test]
    fn prime_field_examples() {
        let f5 = Field::prime(5).unwrap();
        // mul(3, 4) = 2 in F_5
        let prod = &Scalar::from_integer(f5, 3) * &Scalar::from_integer(f5, 4);
        assert_eq!(prod, Scalar::from_integer(f5, 2));
        // inv(2) = 3 in F_5
        let inv = Scalar::from_integer(f5, 2).inv().unwrap();
        assert_eq!(inv, Scalar::from_integer(f5, 3));
        assert_eq!(inv.to_string(), "3 mod 5");
        // canonical form at construction, idempotently
        assert_eq!(Scalar::residue(5, 9), Scalar::residue(5, 4));
        assert_eq!(Scalar::rational(2, -4), Scalar::rational(-1, 2));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Scalar::one(Field::Rationals);
        let b = Scalar::one(Field::Prime(3));
        assert!(matches!(a.checked_add(&b), Err(ScalarError::MixedFields(_, _))));
    }

    #[test]
    fn division_by_zero_rejected() {
        assert_eq!(Scalar::zero(Field::Rationals).inv(), Err(ScalarError::DivisionByZero));
        assert_eq!(Scalar::zero(Field::Prime(7)).inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn primality_check() {
        assert!(Field::prime(2).is_ok());
        assert!(Field::prime(97).is_ok());
        assert_eq!(Field::prime(1), Err(ScalarError::NotPrime(1)));
        assert_eq!(Field::prime(91), Err(ScalarError::NotPrime(91)));
    }

    #[test]
    fn field_axioms_randomized() {
        // Deterministic small LCG so the test needs no rand dependency here.
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for field in [Field::Rationals, Field::Prime(7), Field::Prime(2)] {
            for _ in 0..200 {
                let r = |v: u64| match field {
                    Field::Rationals => {
                        Scalar::rational((v % 19) as i64 - 9, ((v >> 8) % 7 + 1) as i64)
                    }
                    Field::Prime(p) => Scalar::from_integer(field, (v % p) as i64),
                };
                let (a, b, c) = (r(next()), r(next()), r(next()));
                assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                assert_eq!(&a + &a.neg(), Scalar::zero(field));
                if !a.is_zero() {
                    assert_eq!(&a * &a.inv().unwrap(), Scalar::one(field));
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for s in [Scalar::rational(-7, 3), Scalar::residue(5, 4), Scalar::zero(Field::Rationals)] {
            let txt = serde_json::to_string(&s).unwrap();
            let back: Scalar = serde_json::from_str(&txt).unwrap();
            assert_eq!(s, back);
        }
        assert_eq!(serde_json::to_string(&Scalar::residue(5, 4)).unwrap(), r#"{"res":4,"p":5}"#);
    }
}
