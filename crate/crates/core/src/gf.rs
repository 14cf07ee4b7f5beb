//! Prime-field arithmetic GF(q).
//!
//! Every code in this crate works over a [`PrimeField`]. The field is a
//! small `Copy` context object; vectors of symbols are stored as plain `u32`
//! residues in `[0, q)` and all arithmetic goes through the field so the
//! reduction invariant is kept in one place. [`FieldElement`] is the typed,
//! self-describing scalar used at API boundaries where mixing fields must be
//! caught.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported modulus: the largest prime below 2^16, so that the
/// product of two residues always fits in 32 bits.
pub const MAX_MODULUS: u32 = 65521;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0} outside supported range (2, {MAX_MODULUS}]")]
    ModulusOutOfRange(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields: GF({left}) and GF({right})")]
    FieldMismatch { left: u32, right: u32 },
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    if q % 2 == 0 {
        return q == 2;
    }
    let mut d = 3u32;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime strictly greater than `lower` that is also a valid modulus.
pub fn next_prime_above(lower: u32) -> Option<u32> {
    (lower.saturating_add(1)..=MAX_MODULUS).find(|&c| c > 2 && is_prime(c))
}

/// The field GF(q) for an odd prime `q <= 65521`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    q: u32,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

impl TryFrom<u32> for PrimeField {
    type Error = GfError;

    fn try_from(q: u32) -> Result<Self, Self::Error> {
        PrimeField::new(q)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.q
    }
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self, GfError> {
        if q <= 2 || q > MAX_MODULUS {
            return Err(GfError::ModulusOutOfRange(q));
        }
        if !is_prime(q) {
            return Err(GfError::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.q
    }

    /// Wraps an integer as a reduced element of this field.
    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement {
            value: self.reduce(value),
            field: *self,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u32 {
        (v % self.q as u64) as u32
    }

    /// Reduces a possibly negative integer.
    #[inline]
    pub fn reduce_signed(&self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        // a, b < 2^16, so the product fits in u32
        (a * b) % self.q
    }

    /// `acc + a * b`.
    #[inline]
    pub fn mul_add(&self, acc: u32, a: u32, b: u32) -> u32 {
        (acc + (a * b) % self.q) % self.q
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.q;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn try_inv(&self, a: u32) -> Result<u32, GfError> {
        if a % self.q == 0 {
            return Err(GfError::ZeroInverse);
        }
        // extended Euclid on (a, q)
        let (mut r0, mut r1) = (self.q as i64, (a % self.q) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        Ok(self.reduce_signed(t0))
    }

    /// Multiplicative inverse; panics on zero. Use [`PrimeField::try_inv`]
    /// when the argument is not known to be nonzero.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.try_inv(a).expect("inverse of zero")
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    /// `dst += c * src` elementwise.
    pub fn axpy(&self, dst: &mut [u32], c: u32, src: &[u32]) {
        if c == 0 {
            return;
        }
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = self.add(*d, self.mul(c, s));
        }
    }

    pub fn dot(&self, a: &[u32], b: &[u32]) -> u32 {
        // residues < 2^16 so each product < 2^32; accumulate in u64 and
        // reduce once
        let s: u64 = a.iter().zip(b).map(|(&x, &y)| (x as u64) * (y as u64)).sum();
        self.reduce(s)
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.q)
    }

    pub fn random_nonzero<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(1..self.q)
    }
}

/// A residue tagged with its field.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    field: PrimeField,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.field.q)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &FieldElement) -> Result<PrimeField, GfError> {
        if self.field == other.field {
            Ok(self.field)
        } else {
            Err(GfError::FieldMismatch {
                left: self.field.q,
                right: other.field.q,
            })
        }
    }

    fn with(&self, value: u32) -> FieldElement {
        FieldElement {
            value,
            field: self.field,
        }
    }

    pub fn try_add(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        let f = self.same_field(&rhs)?;
        Ok(self.with(f.add(self.value, rhs.value)))
    }

    pub fn try_sub(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        let f = self.same_field(&rhs)?;
        Ok(self.with(f.sub(self.value, rhs.value)))
    }

    pub fn try_mul(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        let f = self.same_field(&rhs)?;
        Ok(self.with(f.mul(self.value, rhs.value)))
    }

    pub fn try_div(self, rhs: FieldElement) -> Result<FieldElement, GfError> {
        let f = self.same_field(&rhs)?;
        Ok(self.with(f.mul(self.value, f.try_inv(rhs.value)?)))
    }

    pub fn inv(self) -> Result<FieldElement, GfError> {
        Ok(self.with(self.field.try_inv(self.value)?))
    }

    pub fn pow(self, e: u64) -> FieldElement {
        self.with(self.field.pow(self.value, e))
    }
}

// Operator forms panic on mixed fields; the `try_*` methods report it.
impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.try_add(rhs).unwrap()
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.try_sub(rhs).unwrap()
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.try_mul(rhs).unwrap()
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.with(self.field.neg(self.value))
    }
}
