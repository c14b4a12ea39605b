use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficient field of a polynomial ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    /// Prime field of characteristic `p < 2^16`; used by the oracle.
    Prime(u32),
}

impl Field {
    pub fn prime(p: u32) -> Option<Field> {
        if (2..(1 << 16)).contains(&p) && is_prime(p) {
            Some(Field::Prime(p))
        } else {
            None
        }
    }

    pub fn zero(self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::zero()),
            Field::Prime(p) => Scalar::Modular { value: 0, modulus: p },
        }
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Modular { value: n.rem_euclid(p as i64) as u32, modulus: p },
        }
    }

    /// Image of a rational number; `None` when `p` divides the denominator.
    pub fn from_rational(self, q: &BigRational) -> Option<Scalar> {
        match self {
            Field::Rationals => Some(Scalar::Rational(q.clone())),
            Field::Prime(p) => {
                let pb = BigInt::from(p);
                let num = q.numer().mod_floor(&pb).to_u64()?;
                let den = q.denom().mod_floor(&pb).to_u64()?;
                if den == 0 {
                    return None;
                }
                let inv = mod_inverse(den as u32, p);
                Some(Scalar::Modular { value: ((num * inv as u64) % p as u64) as u32, modulus: p })
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "QQ"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

/// Exact field element: a rational in lowest terms, or a residue in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Modular { value: u32, modulus: u32 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Modular { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    /// True for rationals with negative sign; residues are never negative.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_negative(),
            Scalar::Modular { .. } => false,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Modular { .. } => None,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, modulus: q }) if p == q => {
                Scalar::Modular { value: ((*a as u64 + *b as u64) % *p as u64) as u32, modulus: *p }
            }
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, modulus: q }) if p == q => {
                Scalar::Modular { value: ((*a as u64 * *b as u64) % *p as u64) as u32, modulus: *p }
            }
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Modular { value, modulus } => {
                Scalar::Modular { value: (*modulus - *value) % *modulus, modulus: *modulus }
            }
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Rational(a) => Scalar::Rational(a.recip()),
            Scalar::Modular { value, modulus } => {
                Scalar::Modular { value: mod_inverse(*value, *modulus), modulus: *modulus }
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self.mul(&other.inv())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

pub(crate) fn mod_inverse(a: u32, p: u32) -> u32 {
    mod_pow(a, p - 2, p)
}

pub(crate) fn mod_pow(a: u32, mut e: u32, p: u32) -> u32 {
    let m = p as u64;
    let mut base = a as u64 % m;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u32
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let q = Field::Rationals;
        let a = Scalar::Rational(BigRational::new(BigInt::from(2), BigInt::from(-4)));
        assert_eq!(a.to_string(), "-1/2");
        assert!(a.add(&q.from_i64(1)).to_string() == "1/2");
    }

    #[test]
    fn modular_inverse_and_reduction() {
        let f = Field::prime(101).unwrap();
        let a = f.from_i64(-3);
        assert_eq!(a, Scalar::Modular { value: 98, modulus: 101 });
        assert!(a.mul(&a.inv()).is_one());
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(f.from_rational(&half), Some(Scalar::Modular { value: 51, modulus: 101 }));
        let bad = BigRational::new(BigInt::from(1), BigInt::from(101));
        assert_eq!(f.from_rational(&bad), None);
    }

    #[test]
    fn prime_field_constructor_rejects_composites() {
        assert!(Field::prime(91).is_none());
        assert!(Field::prime(1 << 16).is_none());
        assert!(Field::prime(257).is_some());
    }
}
