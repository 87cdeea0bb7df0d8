//! Brute-force reference computations used to cross-check the Gröbner engine:
//! dense linear algebra over a field, a naive Buchberger loop without criteria, and
//! syzygies found by exhaustive linear algebra on bounded-degree coefficient spaces.
//!
//! Nothing here touches [`crate::groebner`]; the two routes share only `Poly`.

use crate::field::{Coeff, Field};
use crate::poly::{Monomial, Poly, PolyRing};

/// Dense matrix over a field, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dense {
    pub field: Field,
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<Vec<Coeff>>,
}

impl Dense {
    pub fn zeros(field: Field, nrows: usize, ncols: usize) -> Dense {
        Dense {
            field,
            nrows,
            ncols,
            data: vec![vec![field.zero(); ncols]; nrows],
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == self.nrows {
                break;
            }
            let Some(p) = (r..self.nrows).find(|&i| !self.data[i][c].is_zero()) else {
                continue;
            };
            self.data.swap(r, p);
            let inv = self.data[r][c].inv();
            for x in self.data[r].iter_mut() {
                *x = &*x * &inv;
            }
            for i in 0..self.nrows {
                if i != r && !self.data[i][c].is_zero() {
                    let f = self.data[i][c].clone();
                    for j in 0..self.ncols {
                        let v = &self.data[r][j] * &f;
                        self.data[i][j] = &self.data[i][j] - &v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Coeff>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![self.field.zero(); self.ncols];
                x[f] = self.field.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    x[pc] = -&m.data[r][f];
                }
                x
            })
            .collect()
    }
}

/// All monomials in `nvars` variables of total degree at most `d`, in a fixed order.
pub fn monomials_up_to(nvars: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

/// Basis of all syzygies `(c_1..c_m)` of `gens` (elements of `P^rank`) whose entries
/// have degree at most `d`, by solving the coefficient linear system.
pub fn bounded_syzygies(ring: &PolyRing, rank: usize, gens: &[Vec<Poly>], d: u32) -> Vec<Vec<Poly>> {
    let n = ring.nvars();
    let monos = monomials_up_to(n, d);
    let m = gens.len();
    let unknowns = m * monos.len();
    // rows indexed by (position, monomial) of the product
    let mut keys: Vec<(usize, Monomial)> = Vec::new();
    let mut entries: Vec<(usize, usize, Coeff)> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        for (k, mono) in monos.iter().enumerate() {
            let col = i * monos.len() + k;
            for (pos, p) in g.iter().enumerate().take(rank) {
                for (gm, c) in p.terms() {
                    let key = (pos, gm.mul(mono));
                    let row = match keys.iter().position(|x| *x == key) {
                        Some(r) => r,
                        None => {
                            keys.push(key);
                            keys.len() - 1
                        }
                    };
                    entries.push((row, col, c.clone()));
                }
            }
        }
    }
    let mut a = Dense::zeros(ring.field, keys.len(), unknowns);
    for (r, c, v) in entries {
        a.data[r][c] = &a.data[r][c] + &v;
    }
    a.nullspace()
        .into_iter()
        .map(|x| {
            (0..m)
                .map(|i| {
                    Poly::from_terms(
                        n,
                        monos
                            .iter()
                            .enumerate()
                            .map(|(k, mono)| (mono.clone(), x[i * monos.len() + k].clone())),
                    )
                })
                .collect()
        })
        .collect()
}

fn lead(p: &[Poly]) -> Option<(usize, Monomial, Coeff)> {
    // position-over-term with grevlex, lower position larger
    p.iter().enumerate().find(|(_, q)| !q.is_zero()).map(|(i, q)| {
        let (m, c) = q.leading_term().unwrap();
        (i, m.clone(), c.clone())
    })
}

fn axpy(a: &[Poly], c: &Coeff, m: &Monomial, b: &[Poly]) -> Vec<Poly> {
    a.iter().zip(b).map(|(x, y)| x.add(&y.mul_term(m, c))).collect()
}

/// Remainder of `f` on division by `g` (position-over-term, grevlex); full reduction.
pub fn naive_reduce(f: &[Poly], g: &[Vec<Poly>]) -> Vec<Poly> {
    let nvars = f.first().map(Poly::nvars).unwrap_or(0);
    let mut f = f.to_vec();
    let mut rem: Vec<Poly> = f.iter().map(|_| Poly::zero(nvars)).collect();
    while let Some((pos, m, c)) = lead(&f) {
        let div = g.iter().find_map(|h| {
            let (hp, hm, hc) = lead(h)?;
            (hp == pos && hm.divides(&m)).then(|| (h, hm.quotient_of(&m), &c * &hc.inv()))
        });
        match div {
            Some((h, q, k)) => f = axpy(&f, &-&k, &q, h),
            None => {
                rem[pos].add_term(m.clone(), c.clone());
                f[pos].add_term(m, -&c);
            }
        }
    }
    rem
}

/// Buchberger's algorithm with every S-pair processed, no criteria and no reduction
/// of the final basis.
pub fn naive_groebner(gens: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let mut g: Vec<Vec<Poly>> = gens
        .iter()
        .filter(|e| e.iter().any(|p| !p.is_zero()))
        .cloned()
        .collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..g.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop() {
        let (pi, mi, ci) = lead(&g[i]).unwrap();
        let (pj, mj, cj) = lead(&g[j]).unwrap();
        if pi != pj {
            continue;
        }
        let l = mi.lcm(&mj);
        let zero: Vec<Poly> = g[i].iter().map(|p| Poly::zero(p.nvars())).collect();
        let s = axpy(&zero, &ci.inv(), &mi.quotient_of(&l), &g[i]);
        let s = axpy(&s, &-&cj.inv(), &mj.quotient_of(&l), &g[j]);
        let r = naive_reduce(&s, &g);
        if r.iter().any(|p| !p.is_zero()) {
            let k = g.len();
            g.push(r);
            for i in 0..k {
                pairs.push((i, k));
            }
        }
    }
    g
}

/// `dim { w in k[1/s]^r : w * t has entries in k[s] }` with entries of `w` of degree at
/// most `bound` in `1/s`, by solving for the coefficients directly. For a bundle on
/// `P^1` with transition `t` this is the dimension of its global sections once `bound`
/// is large enough.
pub fn global_sections_dim(t: &crate::bundles::LMatrix, bound: usize) -> usize {
    let field = t.field;
    let r = t.nrows();
    let unknowns = r * (bound + 1);
    let mut keys: Vec<(usize, i64)> = Vec::new();
    let mut entries: Vec<(usize, usize, Coeff)> = Vec::new();
    for i in 0..r {
        for j in 0..=bound {
            let col = i * (bound + 1) + j;
            for k in 0..t.ncols() {
                for (e, c) in t.rows[i][k].terms() {
                    let exp = e - j as i64;
                    if exp >= 0 {
                        continue;
                    }
                    let key = (k, exp);
                    let row = match keys.iter().position(|x| *x == key) {
                        Some(p) => p,
                        None => {
                            keys.push(key);
                            keys.len() - 1
                        }
                    };
                    entries.push((row, col, c.clone()));
                }
            }
        }
    }
    let mut a = Dense::zeros(field, keys.len(), unknowns);
    for (r, c, v) in entries {
        a.data[r][c] = &a.data[r][c] + &v;
    }
    unknowns - a.rank()
}
