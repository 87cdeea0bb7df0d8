//! Sparse multivariate polynomials over an exact [`Field`].
//!
//! A [`Poly`] stores its terms in a `BTreeMap` keyed by [`Monomial`], whose `Ord`
//! is graded reverse lexicographic, so the last entry is the leading term under the
//! default ring order. The Gröbner engine keeps its own sorted rows and is free to
//! use other orders.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::{Coeff, Field};

/// Exponent vector. Ordered by degree reverse lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(i: usize, nvars: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

pub(crate) fn grevlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| {
        for i in (0..a.len()).rev() {
            if a[i] != b[i] {
                return b[i].cmp(&a[i]);
            }
        }
        Ordering::Equal
    })
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        grevlex_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in a fixed number of variables. No zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Coeff, nvars: usize) -> Poly {
        Poly::term(c, Monomial::one(nvars))
    }

    pub fn term(c: Coeff, m: Monomial) -> Poly {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { nvars, terms }
    }

    pub fn var(field: Field, i: usize, nvars: usize) -> Poly {
        Poly::term(field.one(), Monomial::var(i, nvars))
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Poly {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Field of the coefficients, `None` for the zero polynomial.
    pub fn field(&self) -> Option<Field> {
        self.terms.values().next().map(Coeff::field)
    }

    /// Terms from the leading one downwards (grevlex).
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&Coeff> {
        self.terms.get(m)
    }

    /// The constant value when the polynomial is a (possibly zero) constant.
    pub fn as_constant(&self) -> Option<Option<&Coeff>> {
        match self.terms.len() {
            0 => Some(None),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then_some(Some(c))
            }
            _ => None,
        }
    }

    pub fn is_nonzero_constant(&self) -> bool {
        matches!(self.as_constant(), Some(Some(_)))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.as_constant(), Some(Some(c)) if c.is_one())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(n, d)| (n.mul(m), d * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }

    pub fn pow(&self, e: u32, field: Field) -> Poly {
        let mut acc = Poly::constant(field.one(), self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Ring homomorphism sending variable `i` to `images[i]`; all images share one ring.
    pub fn substitute(&self, images: &[Poly], target_nvars: usize, field: Field) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let mut powers: Vec<Vec<Poly>> = images
            .iter()
            .map(|_| vec![Poly::constant(field.one(), target_nvars)])
            .collect();
        let mut out = Poly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone(), target_nvars);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e as usize]);
            }
            out = out.add(&t);
        }
        out
    }

    /// Same polynomial seen in a ring with more variables (appended at the end).
    pub fn extend_vars(&self, nvars: usize) -> Poly {
        assert!(nvars >= self.nvars);
        Poly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(nvars, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    pub fn make_monic(&self) -> Poly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv()),
        }
    }

    /// Formats with explicit coefficients on every term, e.g. `2*z1^2 - 1*u1 + 3`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms().enumerate() {
            let (neg, mag) = if c.is_negative() {
                (true, -c)
            } else {
                (false, c.clone())
            };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{mag}")?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}", self.names[i])?,
                    _ => write!(f, "*{}^{}", self.names[i], e)?,
                }
            }
        }
        Ok(())
    }
}

/// A polynomial ring: a field plus named variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    pub field: Field,
    pub names: Vec<String>,
}

impl PolyRing {
    pub fn new(field: Field, names: Vec<String>) -> PolyRing {
        PolyRing { field, names }
    }

    /// `x0, ..., x{n-1}`.
    pub fn with_standard_names(field: Field, nvars: usize) -> PolyRing {
        PolyRing::new(field, (0..nvars).map(|i| format!("x{i}")).collect())
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(self.nvars())
    }

    pub fn one(&self) -> Poly {
        Poly::constant(self.field.one(), self.nvars())
    }

    pub fn constant(&self, v: i64) -> Poly {
        Poly::constant(self.field.from_i64(v), self.nvars())
    }

    pub fn var(&self, i: usize) -> Poly {
        Poly::var(self.field, i, self.nvars())
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// True when `p` lives in this ring (variable count and coefficient field).
    pub fn owns(&self, p: &Poly) -> bool {
        p.nvars() == self.nvars() && p.field().is_none_or(|f| f == self.field)
    }

    pub fn check(&self, p: &Poly) -> Result<()> {
        if self.owns(p) {
            Ok(())
        } else {
            Err(Error::RingMismatch(format!(
                "polynomial with {} variables over {:?} used in ring {:?} over {}",
                p.nvars(),
                p.field(),
                self.names,
                self.field
            )))
        }
    }

    pub fn format(&self, p: &Poly) -> String {
        p.display(&self.names).to_string()
    }

    /// Parses sums of products like `3/2*x0^2*x1 - x2 + 1`.
    pub fn parse(&self, s: &str) -> Result<Poly> {
        parse_poly(s, self)
    }
}

fn parse_poly(src: &str, ring: &PolyRing) -> Result<Poly> {
    let err = |msg: &str| Error::Parse(format!("{msg} in polynomial `{src}`"));
    let s: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty expression"));
    }
    let n = ring.nvars();
    let mut out = Poly::zero(n);
    let mut i = 0;
    while i < s.len() {
        let mut sign = 1i64;
        while i < s.len() && (s[i] == '+' || s[i] == '-') {
            if s[i] == '-' {
                sign = -sign;
            }
            i += 1;
        }
        if i >= s.len() {
            return Err(err("dangling sign"));
        }
        let mut coeff = ring.field.from_i64(sign);
        let mut mono = vec![0u32; n];
        loop {
            if i >= s.len() {
                return Err(err("expected factor"));
            }
            if s[i].is_ascii_digit() {
                let start = i;
                while i < s.len() && s[i].is_ascii_digit() {
                    i += 1;
                }
                let num: BigInt = s[start..i].iter().collect::<String>().parse().unwrap();
                let mut den = BigInt::from(1);
                if i < s.len() && s[i] == '/' {
                    i += 1;
                    let start = i;
                    while i < s.len() && s[i].is_ascii_digit() {
                        i += 1;
                    }
                    if start == i {
                        return Err(err("missing denominator"));
                    }
                    den = s[start..i].iter().collect::<String>().parse().unwrap();
                }
                let c = ring
                    .field
                    .from_ratio(&num, &den)
                    .ok_or_else(|| err("denominator vanishes in the field"))?;
                coeff = &coeff * &c;
            } else if s[i].is_alphabetic() || s[i] == '_' {
                let start = i;
                while i < s.len() && (s[i].is_alphanumeric() || s[i] == '_') {
                    i += 1;
                }
                let name: String = s[start..i].iter().collect();
                let idx = ring
                    .var_index(&name)
                    .ok_or_else(|| err(&format!("unknown variable `{name}`")))?;
                let mut e = 1u32;
                if i < s.len() && s[i] == '^' {
                    i += 1;
                    let start = i;
                    while i < s.len() && s[i].is_ascii_digit() {
                        i += 1;
                    }
                    if start == i {
                        return Err(err("missing exponent"));
                    }
                    e = s[start..i]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| err("bad exponent"))?;
                }
                mono[idx] += e;
            } else {
                return Err(err(&format!("unexpected character `{}`", s[i])));
            }
            if i < s.len() && s[i] == '*' {
                i += 1;
                continue;
            }
            break;
        }
        out.add_term(Monomial(mono), coeff);
        if i < s.len() && s[i] != '+' && s[i] != '-' {
            return Err(err(&format!("unexpected character `{}`", s[i])));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> PolyRing {
        PolyRing::with_standard_names(Field::Rationals, 3)
    }

    #[test]
    fn grevlex_order() {
        let r = ring();
        // x0*x2 < x1^2 in grevlex (x2 exponent decides)
        let a = r.parse("x0*x2").unwrap();
        let b = r.parse("x1^2").unwrap();
        assert!(a.leading_term().unwrap().0 < b.leading_term().unwrap().0);
        let p = r.parse("x0 + x1^2 + 1").unwrap();
        assert_eq!(r.format(&p), "1*x1^2 + 1*x0 + 1");
    }

    #[test]
    fn parse_and_print_roundtrip() {
        let r = ring();
        for s in ["3/2*x0^2*x1 - x2 + 1", "-x0", "0", "x0*x0 - 2*x0*x1^3"] {
            let p = r.parse(s).unwrap();
            let q = r.parse(&r.format(&p)).unwrap();
            assert_eq!(p, q, "{s}");
        }
        assert!(r.parse("x7").is_err());
        assert!(r.parse("x0^").is_err());
        assert!(r.parse("").is_err());
    }

    #[test]
    fn arithmetic() {
        let r = ring();
        let a = r.parse("x0 + x1").unwrap();
        let b = r.parse("x0 - x1").unwrap();
        assert_eq!(a.mul(&b), r.parse("x0^2 - x1^2").unwrap());
        assert!(a.sub(&a).is_zero());
        assert!(a.mul(&b).is_homogeneous());
        let sub = a.substitute(&[r.parse("x1").unwrap(), r.one(), r.zero()], 3, r.field);
        assert_eq!(sub, r.parse("x1 + 1").unwrap());
    }

    #[test]
    fn prime_field_parse() {
        let r = PolyRing::with_standard_names(Field::prime(2).unwrap(), 1);
        let p = r.parse("x0^2 + 2*x0 + 3").unwrap();
        assert_eq!(p, r.parse("x0^2 + 1").unwrap());
    }
}
