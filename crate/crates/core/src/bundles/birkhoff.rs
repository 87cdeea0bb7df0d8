//! Factorization `L * T * R = diag(s^{a_1}, .., s^{a_r})` of a matrix invertible over
//! `k[s, 1/s]`, with `L` invertible over `k[1/s]` and `R` invertible over `k[s]`.
//!
//! `s^N * T` is column-reduced over `k[s]`: while the matrix of leading column
//! coefficients is singular, a combination of columns lowers the degree of the
//! highest-degree column involved. The sum of column degrees drops each step and is
//! bounded below by the degree of the determinant.

use crate::error::{Error, Result};
use crate::field::{Coeff, Field};

use super::laurent::{LMatrix, LaurentPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    /// Nonincreasing.
    pub exponents: Vec<i64>,
    pub left: LMatrix,
    pub right: LMatrix,
}

impl Splitting {
    /// Re-checks `left * t * right = diag(s^a)`, the ring conditions on `left` and
    /// `right`, and that both have constant determinant.
    pub fn verify(&self, t: &LMatrix) -> bool {
        let d = LMatrix::diagonal(t.field, &self.exponents);
        let const_det = |m: &LMatrix| m.det().as_monomial().is_some_and(|(_, e)| e == 0);
        self.left.mul(t).mul(&self.right) == d
            && self.left.is_inverse_polynomial()
            && self.right.is_polynomial()
            && const_det(&self.left)
            && const_det(&self.right)
            && self.exponents.windows(2).all(|w| w[0] >= w[1])
    }
}

/// A nonzero `x` with `m * x = 0`, if any; `m` is square over the field.
fn null_vector(field: Field, m: &[Vec<Coeff>]) -> Option<Vec<Coeff>> {
    let n = m.len();
    let mut a: Vec<Vec<Coeff>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = &*x - &(y * &f);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut x = vec![field.zero(); n];
    x[free] = field.one();
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = -&a[row][free];
    }
    Some(x)
}

fn column_degree(m: &LMatrix, j: usize) -> i64 {
    m.rows
        .iter()
        .filter_map(|r| r[j].max_exp())
        .max()
        .expect("invertible matrix has no zero column")
}

pub fn birkhoff_split(t: &LMatrix) -> Result<Splitting> {
    let field = t.field;
    if !t.is_square() {
        return Err(Error::NotInvertible("transition matrix is not square".into()));
    }
    let r = t.nrows();
    let det = t.det();
    if det.as_monomial().is_none() {
        return Err(Error::NotInvertible(format!(
            "determinant {det} is not a unit of k[s, 1/s]"
        )));
    }
    let shift = t
        .rows
        .iter()
        .flatten()
        .filter_map(LaurentPoly::min_exp)
        .min()
        .map_or(0, |e| (-e).max(0));
    let mut p = LMatrix {
        field,
        rows: t.rows.iter().map(|row| row.iter().map(|x| x.shift(shift)).collect()).collect(),
    };
    let mut right = LMatrix::identity(field, r);
    loop {
        let degs: Vec<i64> = (0..r).map(|j| column_degree(&p, j)).collect();
        let lead: Vec<Vec<Coeff>> = (0..r)
            .map(|i| (0..r).map(|j| p.rows[i][j].coeff(degs[j])).collect())
            .collect();
        let Some(alpha) = null_vector(field, &lead) else {
            break;
        };
        let k = (0..r)
            .filter(|&j| !alpha[j].is_zero())
            .max_by_key(|&j| (degs[j], std::cmp::Reverse(j)))
            .expect("null vector is nonzero");
        let inv = alpha[k].inv();
        for m in [&mut p, &mut right] {
            for row in m.rows.iter_mut() {
                let mut acc = row[k].clone();
                for j in 0..r {
                    if j != k && !alpha[j].is_zero() {
                        let f = LaurentPoly::monomial(&alpha[j] * &inv, degs[k] - degs[j]);
                        acc = acc.add(&row[j].mul(&f));
                    }
                }
                row[k] = acc;
            }
        }
    }
    let degs: Vec<i64> = (0..r).map(|j| column_degree(&p, j)).collect();
    let h = LMatrix {
        field,
        rows: p
            .rows
            .iter()
            .map(|row| row.iter().zip(&degs).map(|(x, d)| x.shift(-d)).collect())
            .collect(),
    };
    let left = h.inverse()?;
    let mut exps: Vec<(i64, usize)> = degs.iter().enumerate().map(|(j, d)| (d - shift, j)).collect();
    exps.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let order: Vec<usize> = exps.iter().map(|e| e.1).collect();
    let left = LMatrix {
        field,
        rows: order.iter().map(|&i| left.rows[i].clone()).collect(),
    };
    let right = LMatrix {
        field,
        rows: right
            .rows
            .iter()
            .map(|row| order.iter().map(|&j| row[j].clone()).collect())
            .collect(),
    };
    let split = Splitting {
        exponents: exps.iter().map(|e| e.0).collect(),
        left,
        right,
    };
    if !split.verify(t) {
        return Err(Error::Internal("splitting failed its own check".into()));
    }
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::global_sections_dim;

    const Q: Field = Field::Rationals;

    fn m(rows: &[&[&str]]) -> LMatrix {
        LMatrix::new(
            Q,
            rows.iter()
                .map(|r| r.iter().map(|s| LaurentPoly::parse(Q, s).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn diagonal_input() {
        let t = m(&[&["s^2", "0"], &["0", "s^-1"]]);
        let sp = birkhoff_split(&t).unwrap();
        assert_eq!(sp.exponents, vec![2, -1]);
        assert_eq!(sp.left, LMatrix::identity(Q, 2));
        assert_eq!(sp.right, LMatrix::identity(Q, 2));
    }

    #[test]
    fn triangular_example() {
        let t = m(&[&["s^2", "s"], &["0", "1"]]);
        let sp = birkhoff_split(&t).unwrap();
        assert_eq!(sp.exponents, vec![1, 1]);
        assert_eq!(sp.exponents.iter().sum::<i64>(), 2);
        let h0: i64 = sp.exponents.iter().map(|a| (a + 1).max(0)).sum();
        assert_eq!(global_sections_dim(&t, 8), h0 as usize);
        assert_eq!(h0, 4);
    }

    #[test]
    fn identity_input() {
        let sp = birkhoff_split(&LMatrix::identity(Q, 3)).unwrap();
        assert_eq!(sp.exponents, vec![0, 0, 0]);
    }

    #[test]
    fn rejects_non_units() {
        assert!(birkhoff_split(&m(&[&["1 + s"]])).is_err());
        assert!(birkhoff_split(&m(&[&["s", "1"], &["s", "1"]])).is_err());
    }

    #[test]
    fn reordering_and_mixed_signs() {
        let t = m(&[&["s^-2", "s^3"], &["0", "s^(-1)"]]);
        let sp = birkhoff_split(&t).unwrap();
        assert_eq!(sp.exponents.iter().sum::<i64>(), -3);
        let h0: i64 = sp.exponents.iter().map(|a| (a + 1).max(0)).sum();
        assert_eq!(global_sections_dim(&t, 10), h0 as usize);
    }
}
