//! Row-convention matrix helpers on [`PresMatrix`]: an element is a row vector and a
//! map sends row `i` (the image of generator `i`) to a row of the target.

use crate::field::Field;
use crate::groebner::{FreeModElem, PresMatrix};
use crate::poly::Poly;

pub fn zero_vec(len: usize, nvars: usize) -> FreeModElem {
    vec![Poly::zero(nvars); len]
}

pub fn unit_vec(i: usize, len: usize, nvars: usize, field: Field) -> FreeModElem {
    let mut v = zero_vec(len, nvars);
    v[i] = Poly::constant(field.one(), nvars);
    v
}

pub fn is_zero_vec(v: &[Poly]) -> bool {
    v.iter().all(Poly::is_zero)
}

pub fn add_vec(a: &[Poly], b: &[Poly]) -> FreeModElem {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn sub_vec(a: &[Poly], b: &[Poly]) -> FreeModElem {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn scale_vec(c: &Poly, v: &[Poly]) -> FreeModElem {
    v.iter().map(|x| c.mul(x)).collect()
}

pub fn identity(n: usize, nvars: usize, field: Field) -> PresMatrix {
    PresMatrix::new(n, (0..n).map(|i| unit_vec(i, n, nvars, field)).collect())
}

pub fn zero_matrix(nrows: usize, ncols: usize, nvars: usize) -> PresMatrix {
    PresMatrix::new(ncols, vec![zero_vec(ncols, nvars); nrows])
}

/// Row vector times matrix.
pub fn vec_mul(v: &[Poly], m: &PresMatrix, nvars: usize) -> FreeModElem {
    assert_eq!(v.len(), m.nrows(), "vector length differs from matrix rows");
    let mut out = zero_vec(m.ncols, nvars);
    for (c, row) in v.iter().zip(&m.rows) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o = o.add(&c.mul(x));
        }
    }
    out
}

/// `a * b` with `a.ncols == b.nrows`.
pub fn mat_mul(a: &PresMatrix, b: &PresMatrix, nvars: usize) -> PresMatrix {
    PresMatrix::new(b.ncols, a.rows.iter().map(|r| vec_mul(r, b, nvars)).collect())
}

pub fn map_entries(m: &PresMatrix, f: impl Fn(&Poly) -> Poly) -> PresMatrix {
    PresMatrix::new(
        m.ncols,
        m.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
    )
}

pub fn block_diag(a: &PresMatrix, b: &PresMatrix, nvars: usize) -> PresMatrix {
    let ncols = a.ncols + b.ncols;
    let mut rows = Vec::with_capacity(a.nrows() + b.nrows());
    for r in &a.rows {
        let mut v = r.clone();
        v.extend(zero_vec(b.ncols, nvars));
        rows.push(v);
    }
    for r in &b.rows {
        let mut v = zero_vec(a.ncols, nvars);
        v.extend(r.iter().cloned());
        rows.push(v);
    }
    PresMatrix::new(ncols, rows)
}

/// Pads every row with zeros: the first `before` columns and trailing `after` columns.
pub fn pad_columns(m: &PresMatrix, before: usize, after: usize, nvars: usize) -> PresMatrix {
    PresMatrix::new(
        before + m.ncols + after,
        m.rows
            .iter()
            .map(|r| {
                let mut v = zero_vec(before, nvars);
                v.extend(r.iter().cloned());
                v.extend(zero_vec(after, nvars));
                v
            })
            .collect(),
    )
}
