//! Vector bundles on `P^1` through their transition matrix between the charts `{0}`
//! and `{1}`, with `s = x1/x0`. Row `i` of the transition expresses basis vector `i`
//! over `{1}` in the basis over `{0}`; `O(a)` has transition `s^a`.

use std::sync::Arc;

use crate::charts::{ChartRing, Vertex};
use crate::closure::{verify_subrep, SubRep};
use crate::error::{Error, Result};
use crate::groebner::{FreeModElem, PresMatrix};
use crate::matrix::{identity, zero_vec};
use crate::module::PresentedModule;
use crate::poly::Poly;
use crate::sheaf::{ProjQuiver, SheafRep};

use super::birkhoff::{birkhoff_split, Splitting};
use super::laurent::{LMatrix, LaurentPoly};
use super::is_vector_bundle;

/// `sum c_k s^k` as an element of a chart ring of `P^1`, if regular there.
pub fn laurent_to_chart(ring: &ChartRing, p: &LaurentPoly) -> Result<Poly> {
    let mut out = ring.zero();
    for (e, c) in p.terms() {
        let m = ring.ratio_power(1, 0, e).ok_or_else(|| {
            Error::Precondition(format!("s^{e} is not regular on chart {}", ring.vertex()))
        })?;
        out = out.add(&m.scale(c));
    }
    Ok(ring.reduce(&out))
}

/// Inverse of [`laurent_to_chart`].
pub fn chart_to_laurent(ring: &ChartRing, p: &Poly) -> LaurentPoly {
    let mut out = LaurentPoly::zero(ring.field());
    for (m, c) in ring.reduce(p).terms() {
        let e = ring.laurent_exponents(m);
        out.add_term(e[1], c.clone());
    }
    out
}

fn univariate_div_rem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let nv = a.nvars();
    let (bm, bc) = b.leading_term().expect("division by zero");
    let (bm, binv) = (bm.clone(), bc.inv());
    let mut q = Poly::zero(nv);
    let mut r = a.clone();
    while let Some((rm, rc)) = r.leading_term() {
        if !bm.divides(rm) {
            break;
        }
        let m = bm.quotient_of(rm);
        let c = rc * &binv;
        q.add_term(m.clone(), c.clone());
        r = r.sub(&b.mul_term(&m, &c));
    }
    (q, r)
}

fn degree(p: &Poly) -> u32 {
    p.total_degree().unwrap_or(u32::MAX)
}

/// A basis of a projective module over a univariate polynomial chart ring, as
/// elements of the module in generator coordinates.
pub fn free_basis(m: &PresentedModule) -> Result<Vec<FreeModElem>> {
    let ring = m.ring();
    if ring.nvars() != 1 || !ring.relations().is_empty() {
        return Err(Error::Precondition(format!(
            "chart {} is not a univariate polynomial ring",
            ring.vertex()
        )));
    }
    let g = m.ngens();
    let field = ring.field();
    let mut a: Vec<FreeModElem> = m.relations().to_vec();
    // rows of `cinv` are the new generators in old coordinates
    let mut cinv = identity(g, 1, field).rows;
    let mut k = 0;
    while k < g && k < a.len() {
        loop {
            let pivot = (k..a.len())
                .flat_map(|i| (k..g).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by_key(|&(i, j)| (degree(&a[i][j]), i, j));
            let Some((i, j)) = pivot else {
                break;
            };
            a.swap(i, k);
            if j != k {
                for row in a.iter_mut() {
                    row.swap(j, k);
                }
                cinv.swap(j, k);
            }
            let mut clean = true;
            for i in (k + 1)..a.len() {
                if a[i][k].is_zero() {
                    continue;
                }
                let (q, _) = univariate_div_rem(&a[i][k], &a[k][k]);
                let pk = a[k].clone();
                for (x, y) in a[i].iter_mut().zip(&pk) {
                    *x = x.sub(&q.mul(y));
                }
                clean &= a[i][k].is_zero();
            }
            for j in (k + 1)..g {
                if a[k][j].is_zero() {
                    continue;
                }
                // column j -= q * column k; new generator k picks up q * generator j
                let (q, _) = univariate_div_rem(&a[k][j], &a[k][k]);
                for row in a.iter_mut() {
                    let t = q.mul(&row[k]);
                    row[j] = row[j].sub(&t);
                }
                let rj = cinv[j].clone();
                for (x, y) in cinv[k].iter_mut().zip(&rj) {
                    *x = x.add(&q.mul(y));
                }
                clean &= a[k][j].is_zero();
            }
            if clean {
                break;
            }
        }
        if a.get(k).is_none_or(|r| r[k].is_zero()) {
            break;
        }
        if degree(&a[k][k]) != 0 {
            return Err(Error::Precondition(format!(
                "module at {} has torsion; not locally free",
                ring.vertex()
            )));
        }
        k += 1;
    }
    Ok(cinv[k..].to_vec())
}

#[derive(Clone, Debug)]
pub struct Transition {
    pub matrix: LMatrix,
    pub basis0: Vec<FreeModElem>,
    pub basis1: Vec<FreeModElem>,
}

struct P1Charts {
    v0: usize,
    v1: usize,
    v01: usize,
    e0: usize,
    e1: usize,
}

fn p1_charts(q: &ProjQuiver) -> Result<P1Charts> {
    if q.n() != 1 || !q.ideal().is_empty() {
        return Err(Error::Precondition("expected the projective line".into()));
    }
    let (a, b, ab) = (Vertex::singleton(0), Vertex::singleton(1), Vertex::from_indices(&[0, 1]));
    Ok(P1Charts {
        v0: q.vertex_index(a).unwrap(),
        v1: q.vertex_index(b).unwrap(),
        v01: q.vertex_index(ab).unwrap(),
        e0: q.edge_index(a, ab).unwrap(),
        e1: q.edge_index(b, ab).unwrap(),
    })
}

/// The transition matrix of a locally free representation on `P^1`.
pub fn transition_matrix(v: &SheafRep) -> Result<Transition> {
    let q = v.quiver();
    let c = p1_charts(q)?;
    let basis0 = free_basis(v.module(c.v0))?;
    let basis1 = free_basis(v.module(c.v1))?;
    if basis0.len() != basis1.len() {
        return Err(Error::Precondition("ranks differ between the charts".into()));
    }
    let p0: Vec<FreeModElem> = basis0.iter().map(|b| v.push(c.e0, b)).collect();
    let ring = q.ring(c.v01);
    let mut rows = Vec::new();
    for b in &basis1 {
        let img = v.push(c.e1, b);
        let coeffs = v
            .module(c.v01)
            .lift(&img, &p0)
            .ok_or_else(|| Error::MalformedRep("edge from {1} is not onto".into()))?;
        rows.push(coeffs.iter().map(|p| chart_to_laurent(ring, p)).collect());
    }
    Ok(Transition {
        matrix: LMatrix::new(q.field(), rows)?,
        basis0,
        basis1,
    })
}

/// The free representation on `P^1` glued by `t`.
pub fn bundle_from_transition(q: &Arc<ProjQuiver>, t: &LMatrix) -> Result<SheafRep> {
    let c = p1_charts(q)?;
    if !t.is_square() {
        return Err(Error::DimensionMismatch("transition matrix is not square".into()));
    }
    let r = t.nrows();
    let modules = (0..q.vertices().len())
        .map(|v| PresentedModule::free(q.ring(v).clone(), r))
        .collect();
    let ring = q.ring(c.v01);
    let mut maps = vec![PresMatrix::empty(r); q.edges().len()];
    maps[c.e0] = identity(r, ring.nvars(), q.field());
    maps[c.e1] = PresMatrix::new(
        r,
        t.rows
            .iter()
            .map(|row| row.iter().map(|p| laurent_to_chart(ring, p)).collect())
            .collect::<Result<Vec<_>>>()?,
    );
    SheafRep::new(q.clone(), modules, maps)
}

#[derive(Clone, Debug)]
pub struct Filtration {
    pub splitting: Splitting,
    /// `V_1 ⊂ .. ⊂ V_r = V`.
    pub steps: Vec<SubRep>,
    /// Transition of `V_i / V_{i-1}`, computed from the steps.
    pub quotient_transitions: Vec<LaurentPoly>,
}

impl Filtration {
    pub fn quotient_degrees(&self) -> Vec<Option<i64>> {
        self.quotient_transitions
            .iter()
            .map(|p| p.as_monomial().map(|(_, e)| e))
            .collect()
    }
}

fn combine(ring: &ChartRing, coeffs: &[LaurentPoly], basis: &[FreeModElem]) -> Result<FreeModElem> {
    let len = basis.first().map_or(0, Vec::len);
    let mut out = zero_vec(len, ring.nvars());
    for (c, b) in coeffs.iter().zip(basis) {
        let c = laurent_to_chart(ring, c)?;
        for (x, y) in out.iter_mut().zip(b) {
            *x = x.add(&c.mul(y));
        }
    }
    Ok(ring.reduce_vec(&out))
}

pub fn line_bundle_filtration(v: Arc<SheafRep>) -> Result<Filtration> {
    let q = v.quiver().clone();
    let c = p1_charts(&q)?;
    if !is_vector_bundle(&v)?.is_bundle {
        return Err(Error::Precondition("not a vector bundle".into()));
    }
    let t = transition_matrix(&v)?;
    let split = birkhoff_split(&t.matrix)?;
    let rinv = split.right.inverse()?;
    let r = t.basis0.len();
    let g0 = (0..r)
        .map(|i| combine(q.ring(c.v0), &rinv.rows[i], &t.basis0))
        .collect::<Result<Vec<_>>>()?;
    let g1 = (0..r)
        .map(|i| combine(q.ring(c.v1), &split.left.rows[i], &t.basis1))
        .collect::<Result<Vec<_>>>()?;
    let p0: Vec<FreeModElem> = g0.iter().map(|g| v.push(c.e0, g)).collect();
    let nv = q.vertices().len();
    let mut steps = Vec::new();
    let mut quotient_transitions = Vec::new();
    let m01 = v.module(c.v01);
    for i in 1..=r {
        let mut gens = vec![Vec::new(); nv];
        gens[c.v0] = g0[..i].to_vec();
        gens[c.v1] = g1[..i].to_vec();
        gens[c.v01] = p0[..i].to_vec();
        let sub = SubRep {
            ambient: v.clone(),
            gens,
            seed: vec![Vec::new(); nv],
        };
        let report = verify_subrep(&sub);
        if !report.passes() {
            return Err(Error::Internal(format!("filtration step {i}: {:?}", report.failures)));
        }
        let img = v.push(c.e1, &g1[i - 1]);
        let coeffs = m01
            .lift(&img, &p0[..i])
            .ok_or_else(|| Error::Internal("filtration step leaves its span".into()))?;
        quotient_transitions.push(chart_to_laurent(q.ring(c.v01), &coeffs[i - 1]));
        steps.push(sub);
    }
    Ok(Filtration {
        splitting: split,
        steps,
        quotient_transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::sheaf::{build_proj_quiver, direct_sum, twist};

    const Q: Field = Field::Rationals;

    fn p1() -> Arc<ProjQuiver> {
        Arc::new(build_proj_quiver(Q, 1, &[]).unwrap())
    }

    fn lm(rows: &[&[&str]]) -> LMatrix {
        LMatrix::new(
            Q,
            rows.iter()
                .map(|r| r.iter().map(|s| LaurentPoly::parse(Q, s).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn twist_transitions() {
        let q = p1();
        for k in -3..=3 {
            let t = transition_matrix(&twist(&q, k)).unwrap();
            assert_eq!(t.matrix.rows[0][0], LaurentPoly::s_pow(Q, k));
        }
    }

    #[test]
    fn basis_of_presented_free_module() {
        let q = p1();
        let ring = q.ring(0).clone();
        let z = ring.z(1).unwrap();
        // R^3 / ((1, z, 0), (0, 1, z^2)) is free of rank 1
        let m = PresentedModule::new(
            ring.clone(),
            3,
            vec![
                vec![ring.one(), z.clone(), ring.zero()],
                vec![ring.zero(), ring.one(), z.mul(&z)],
            ],
        )
        .unwrap();
        let b = free_basis(&m).unwrap();
        assert_eq!(b.len(), 1);
        for j in 0..3 {
            assert!(m.span_contains(&b, &m.generator(j)));
        }
        let torsion = PresentedModule::new(ring.clone(), 1, vec![vec![z]]).unwrap();
        assert!(free_basis(&torsion).is_err());
    }

    #[test]
    fn filtration_of_split_bundle() {
        let q = p1();
        let v = Arc::new(direct_sum(&twist(&q, 2), &twist(&q, -1)).unwrap());
        let f = line_bundle_filtration(v).unwrap();
        assert_eq!(f.splitting.exponents, vec![2, -1]);
        assert_eq!(f.quotient_degrees(), vec![Some(2), Some(-1)]);
        assert_eq!(f.steps.len(), 2);
    }

    #[test]
    fn filtration_of_glued_bundle() {
        let q = p1();
        let t = lm(&[&["s^2", "s"], &["0", "1"]]);
        let v = Arc::new(bundle_from_transition(&q, &t).unwrap());
        assert_eq!(transition_matrix(&v).unwrap().matrix, t);
        let f = line_bundle_filtration(v).unwrap();
        assert_eq!(f.quotient_degrees(), vec![Some(1), Some(1)]);
    }

    #[test]
    fn single_step_for_structure_sheaf() {
        let q = p1();
        let f = line_bundle_filtration(Arc::new(twist(&q, 0))).unwrap();
        assert_eq!(f.steps.len(), 1);
        assert_eq!(f.quotient_degrees(), vec![Some(0)]);
    }

    #[test]
    fn rejects_other_quivers() {
        let q = Arc::new(build_proj_quiver(Q, 2, &[]).unwrap());
        assert!(transition_matrix(&twist(&q, 0)).is_err());
    }
}
