//! Coefficient fields: the rationals and prime fields `F_p` with `p` odd.

use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// Which field a computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    /// Builds a validated spec from a characteristic (0 means the rationals).
    pub fn from_characteristic(characteristic: u64) -> Result<Self, Error> {
        match characteristic {
            0 => Ok(FieldSpec::Rationals),
            2 => Err(Error::CharacteristicTwo),
            p if is_prime(p) && p < (1 << 31) => Ok(FieldSpec::Prime(p)),
            p => Err(Error::NotPrime(p)),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F_{}", p),
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

/// A field whose elements are plain values; the field object carries any
/// runtime parameter (the modulus for `F_p`).
pub trait Field: Clone + fmt::Debug + PartialEq {
    type Elem: Clone + fmt::Debug + PartialEq;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// `acc -= a * b`, the inner step of elimination.
    fn sub_mul_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        let p = self.mul(a, b);
        *acc = self.sub(acc, &p);
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
}

/// The field of rational numbers with arbitrary precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn sub_mul_assign(&self, acc: &mut BigRational, a: &BigRational, b: &BigRational) {
        if a.is_integer() && b.is_integer() && acc.is_integer() {
            let v = acc.numer() - a.numer() * b.numer();
            *acc = BigRational::from_integer(v);
        } else {
            *acc -= a * b;
        }
    }
    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }
}

/// Renders a rational compactly (`3`, `-1/2`).
pub fn format_rational(a: &BigRational) -> alloc::string::String {
    use alloc::format;
    if a.is_integer() {
        format!("{}", a.numer())
    } else {
        format!("{}{}/{}", if a.is_negative() { "-" } else { "" }, a.numer().abs(), a.denom())
    }
}

/// The prime field `F_p`, `p` an odd prime below `2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, Error> {
        match FieldSpec::from_characteristic(p)? {
            FieldSpec::Prime(p) => Ok(PrimeField { p }),
            FieldSpec::Rationals => Err(Error::NotPrime(0)),
        }
    }

    /// Unchecked constructor; the characteristic-two field is only useful for
    /// exercising the GKM rejection path.
    pub fn new_unchecked(p: u64) -> Self {
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
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
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        let mut base = *a;
        let mut e = self.p - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characteristic_two_rejected() {
        assert_eq!(FieldSpec::from_characteristic(2), Err(Error::CharacteristicTwo));
        assert!(PrimeField::new(2).is_err());
        assert_eq!(FieldSpec::from_characteristic(9), Err(Error::NotPrime(9)));
        assert_eq!(FieldSpec::from_characteristic(0), Ok(FieldSpec::Rationals));
    }

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7u64 {
            let b = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &b), 1);
        }
        assert_eq!(f.from_i64(-1), 6);
    }
}
