//! Laurent polynomials in one variable `s` and small matrices over them.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Coeff, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    field: Field,
    terms: BTreeMap<i64, Coeff>,
}

impl LaurentPoly {
    pub fn zero(field: Field) -> LaurentPoly {
        LaurentPoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: Field) -> LaurentPoly {
        LaurentPoly::monomial(field.one(), 0)
    }

    /// `c * s^e`.
    pub fn monomial(c: Coeff, e: i64) -> LaurentPoly {
        let field = c.field();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        LaurentPoly { field, terms }
    }

    pub fn s_pow(field: Field, e: i64) -> LaurentPoly {
        LaurentPoly::monomial(field.one(), e)
    }

    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = (i64, Coeff)>) -> LaurentPoly {
        let mut p = LaurentPoly::zero(field);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponent/coefficient pairs in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Coeff)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: i64) -> Coeff {
        self.terms.get(&e).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// `Some((c, e))` when the polynomial is a single term `c * s^e`.
    pub fn as_monomial(&self) -> Option<(Coeff, i64)> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), *e))
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.min_exp().is_none_or(|e| e >= 0)
    }

    /// Only nonpositive exponents: an element of `k[1/s]`.
    pub fn is_inverse_polynomial(&self) -> bool {
        self.max_exp().is_none_or(|e| e <= 0)
    }

    pub fn add_term(&mut self, e: i64, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&e) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(e, sum);
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            field: self.field,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.field);
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_term(a + b, x * y);
            }
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> LaurentPoly {
        LaurentPoly::from_terms(self.field, self.terms().map(|(e, x)| (e, x * c)))
    }

    pub fn shift(&self, k: i64) -> LaurentPoly {
        LaurentPoly {
            field: self.field,
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Parses `2*s^3 - s^-1 + 1/2`; `s` may also be written `z`.
    pub fn parse(field: Field, text: &str) -> Result<LaurentPoly> {
        let ring = crate::poly::PolyRing::new(field, vec!["s".into(), "t".into()]);
        // negative exponents are rewritten through t = 1/s
        let mut rewritten = String::new();
        let chars: Vec<char> = text.trim().chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if chars[i] == 's' && chars.get(i + 1) == Some(&'^') && chars.get(i + 2) == Some(&'-') {
                rewritten.push_str("t^");
                i += 3;
            } else if chars[i] == 's' && chars.get(i + 1) == Some(&'^') && chars.get(i + 2) == Some(&'(') {
                // s^(-k)
                let close = chars[i..].iter().position(|c| *c == ')').map(|p| p + i);
                let Some(close) = close else {
                    return Err(Error::Parse(format!("unbalanced exponent in {text:?}")));
                };
                let inner: String = chars[i + 3..close].iter().collect();
                let inner = inner.trim();
                if let Some(neg) = inner.strip_prefix('-') {
                    rewritten.push_str(&format!("t^{}", neg.trim()));
                } else {
                    rewritten.push_str(&format!("s^{inner}"));
                }
                i = close + 1;
            } else {
                rewritten.push(chars[i]);
                i += 1;
            }
        }
        let p = ring
            .parse(&rewritten)
            .map_err(|e| Error::Parse(format!("{text:?}: {e}")))?;
        let mut out = LaurentPoly::zero(field);
        for (m, c) in p.terms() {
            out.add_term(m.0[0] as i64 - m.0[1] as i64, c.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match *e {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*s")?,
                e if e < 0 => write!(f, "{mag}*s^({e})")?,
                e => write!(f, "{mag}*s^{e}")?,
            }
        }
        Ok(())
    }
}

/// Square or rectangular matrix of Laurent polynomials, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LMatrix {
    pub field: Field,
    pub rows: Vec<Vec<LaurentPoly>>,
}

impl LMatrix {
    pub fn new(field: Field, rows: Vec<Vec<LaurentPoly>>) -> Result<LMatrix> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("ragged Laurent matrix".into()));
        }
        Ok(LMatrix { field, rows })
    }

    pub fn identity(field: Field, n: usize) -> LMatrix {
        LMatrix::diagonal(field, &vec![0; n])
    }

    /// `diag(s^{e_1}, .., s^{e_n})`.
    pub fn diagonal(field: Field, exps: &[i64]) -> LMatrix {
        let n = exps.len();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            LaurentPoly::s_pow(field, exps[i])
                        } else {
                            LaurentPoly::zero(field)
                        }
                    })
                    .collect()
            })
            .collect();
        LMatrix { field, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn mul(&self, other: &LMatrix) -> LMatrix {
        assert_eq!(self.ncols(), other.nrows(), "matrix shapes");
        let rows = (0..self.nrows())
            .map(|i| {
                (0..other.ncols())
                    .map(|j| {
                        let mut acc = LaurentPoly::zero(self.field);
                        for k in 0..self.ncols() {
                            acc = acc.add(&self.rows[i][k].mul(&other.rows[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        LMatrix {
            field: self.field,
            rows,
        }
    }

    pub fn transpose(&self) -> LMatrix {
        let rows = (0..self.ncols())
            .map(|j| (0..self.nrows()).map(|i| self.rows[i][j].clone()).collect())
            .collect();
        LMatrix {
            field: self.field,
            rows,
        }
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> LMatrix {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip_row)
            .map(|(_, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != skip_col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        LMatrix {
            field: self.field,
            rows,
        }
    }

    pub fn det(&self) -> LaurentPoly {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.nrows();
        match n {
            0 => LaurentPoly::one(self.field),
            1 => self.rows[0][0].clone(),
            _ => {
                let mut acc = LaurentPoly::zero(self.field);
                for j in 0..n {
                    if self.rows[0][j].is_zero() {
                        continue;
                    }
                    let t = self.rows[0][j].mul(&self.minor(0, j).det());
                    acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
                }
                acc
            }
        }
    }

    /// Inverse over `k[s, 1/s]`; requires `det` to be a monomial.
    pub fn inverse(&self) -> Result<LMatrix> {
        if !self.is_square() {
            return Err(Error::NotInvertible("non-square matrix".into()));
        }
        let d = self.det();
        let (c, e) = d
            .as_monomial()
            .ok_or_else(|| Error::NotInvertible(format!("determinant {d} is not a unit")))?;
        let dinv = LaurentPoly::monomial(c.inv(), -e);
        let n = self.nrows();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        // adjugate entry (i, j) = (-1)^{i+j} det(minor(j, i))
                        let m = self.minor(j, i).det().mul(&dinv);
                        if (i + j) % 2 == 0 {
                            m
                        } else {
                            m.neg()
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(LMatrix {
            field: self.field,
            rows,
        })
    }

    pub fn is_polynomial(&self) -> bool {
        self.rows.iter().flatten().all(LaurentPoly::is_polynomial)
    }

    pub fn is_inverse_polynomial(&self) -> bool {
        self.rows.iter().flatten().all(LaurentPoly::is_inverse_polynomial)
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for r in self.rows.iter_mut() {
            r.swap(a, b);
        }
    }
}

impl fmt::Display for LMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = r.iter().map(|p| p.to_string()).collect();
            write!(f, "{}", cells.join(" ; "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rationals;

    fn lp(s: &str) -> LaurentPoly {
        LaurentPoly::parse(Q, s).unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["s^2", "1*s^2 + 1*s", "-1*s^(-1) + 3", "0", "1/2*s^(-3) - 2*s"] {
            let p = lp(s);
            assert_eq!(lp(&p.to_string()), p, "{s}");
        }
        assert_eq!(lp("s^-2"), LaurentPoly::s_pow(Q, -2));
        assert_eq!(lp("s * s^(-1)"), LaurentPoly::one(Q));
    }

    #[test]
    fn inverse_of_triangular() {
        let m = LMatrix::new(Q, vec![vec![lp("s^2"), lp("s")], vec![lp("0"), lp("1")]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), LMatrix::identity(Q, 2));
        assert_eq!(m.det(), lp("s^2"));
        let sing = LMatrix::new(Q, vec![vec![lp("1 + s")]]).unwrap();
        assert!(sing.inverse().is_err());
    }
}
