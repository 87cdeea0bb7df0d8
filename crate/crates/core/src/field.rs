//! Exact coefficient fields: the rationals and prime fields `F_p` with `p < 2^31`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact field. Characteristic 0 means the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u32),
}

impl Field {
    /// Builds `F_p`, checking primality by trial division.
    pub fn prime(p: u64) -> Result<Field> {
        if p >= (1 << 31) || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime below 2^31")));
        }
        Ok(Field::Prime(p as u32))
    }

    pub fn characteristic(self) -> u32 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn zero(self) -> Coeff {
        self.from_i64(0)
    }

    pub fn one(self) -> Coeff {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Coeff {
        match self {
            Field::Rationals => Coeff::Q(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Coeff::Fp {
                v: v.rem_euclid(p as i64) as u32,
                p,
            },
        }
    }

    /// Coefficient `num/den`; `None` when `den` vanishes in the field.
    pub fn from_ratio(self, num: &BigInt, den: &BigInt) -> Option<Coeff> {
        match self {
            Field::Rationals => {
                if den.is_zero() {
                    None
                } else {
                    Some(Coeff::Q(BigRational::new(num.clone(), den.clone())))
                }
            }
            Field::Prime(p) => {
                let m = BigInt::from(p);
                let n = ((num % &m) + &m) % &m;
                let d = ((den % &m) + &m) % &m;
                if d.is_zero() {
                    return None;
                }
                let n = Coeff::Fp {
                    v: n.to_u32().unwrap(),
                    p,
                };
                let d = Coeff::Fp {
                    v: d.to_u32().unwrap(),
                    p,
                };
                Some(&n * &d.inv())
            }
        }
    }

    /// True when `c` is an element of this field.
    pub fn owns(self, c: &Coeff) -> bool {
        match (self, c) {
            (Field::Rationals, Coeff::Q(_)) => true,
            (Field::Prime(p), Coeff::Fp { p: q, .. }) => p == *q,
            _ => false,
        }
    }

    /// Every element of a prime field, in increasing residue order.
    pub fn elements(self) -> Option<Vec<Coeff>> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some((0..p).map(|v| Coeff::Fp { v, p }).collect()),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        let s = s.trim();
        if s == "Q" || s == "QQ" {
            return Ok(Field::Rationals);
        }
        if let Some(rest) = s.strip_prefix("Fp:").or_else(|| s.strip_prefix("GF:")) {
            let p: u64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::InvalidField(s.to_string()))?;
            return Field::prime(p);
        }
        Err(Error::InvalidField(s.to_string()))
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

/// A field element. Residues carry their modulus so arithmetic is self-contained;
/// mixing elements of different fields is a logic error and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coeff {
    Q(BigRational),
    Fp { v: u32, p: u32 },
}

impl Coeff {
    pub fn field(&self) -> Field {
        match self {
            Coeff::Q(_) => Field::Rationals,
            Coeff::Fp { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Q(q) => q.is_zero(),
            Coeff::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Q(q) => q.is_one(),
            Coeff::Fp { v, .. } => *v == 1,
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Coeff {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Coeff::Q(q) => Coeff::Q(q.recip()),
            Coeff::Fp { v, p } => Coeff::Fp {
                v: pow_mod(*v as u64, (*p - 2) as u64, *p as u64) as u32,
                p: *p,
            },
        }
    }

    pub fn pow(&self, mut e: u32) -> Coeff {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Sign used by the text encoder: true for negative rationals and never for residues.
    pub fn is_negative(&self) -> bool {
        match self {
            Coeff::Q(q) => q.is_negative(),
            Coeff::Fp { .. } => false,
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Q(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Coeff::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

impl<'a> Add<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Q(a), Coeff::Q(b)) => Coeff::Q(a + b),
            (Coeff::Fp { v: a, p }, Coeff::Fp { v: b, p: q }) if p == q => Coeff::Fp {
                v: ((*a as u64 + *b as u64) % *p as u64) as u32,
                p: *p,
            },
            _ => panic!("coefficient field mismatch"),
        }
    }
}

impl<'a> Sub<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Q(a), Coeff::Q(b)) => Coeff::Q(a - b),
            (Coeff::Fp { v: a, p }, Coeff::Fp { v: b, p: q }) if p == q => Coeff::Fp {
                v: ((*a as u64 + *p as u64 - *b as u64) % *p as u64) as u32,
                p: *p,
            },
            _ => panic!("coefficient field mismatch"),
        }
    }
}

impl<'a> Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Q(a), Coeff::Q(b)) => Coeff::Q(a * b),
            (Coeff::Fp { v: a, p }, Coeff::Fp { v: b, p: q }) if p == q => Coeff::Fp {
                v: ((*a as u64 * *b as u64) % *p as u64) as u32,
                p: *p,
            },
            _ => panic!("coefficient field mismatch"),
        }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match self {
            Coeff::Q(a) => Coeff::Q(-a),
            Coeff::Fp { v, p } => Coeff::Fp {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            },
        }
    }
}
