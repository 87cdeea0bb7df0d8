//! Fitting ideals of presented modules and the projectivity test built on them.

use std::sync::Arc;

use crate::charts::{ChartRing, Vertex};
use crate::groebner::{ideal_contains_one, FreeModElem, PresIdeal};
use crate::module::PresentedModule;
use crate::poly::Poly;

/// `F_index(M)`: generated by the `(g - index)`-minors of the relation matrix, taken
/// inside the chart ring.
#[derive(Clone, Debug, PartialEq)]
pub struct FittingIdeal {
    pub index: usize,
    pub ring: Arc<ChartRing>,
    /// Minors reduced modulo the ring, zero ones dropped.
    pub minors: Vec<Poly>,
}

impl FittingIdeal {
    /// The ideal in the polynomial ring underlying the chart: minors plus ring relations.
    pub fn ideal(&self) -> PresIdeal {
        let mut gens = self.minors.clone();
        gens.extend(self.ring.relations().iter().cloned());
        PresIdeal::new(self.ring.poly_ring().clone(), gens).expect("minors live in the chart ring")
    }

    pub fn is_zero(&self) -> bool {
        self.minors.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        ideal_contains_one(&self.ideal())
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.ideal().contains(p)
    }
}

/// Whether `p` is a unit of the chart ring that is visibly one: a nonzero multiple of a
/// monomial in coordinates inverted on the chart.
fn unit_inverse(ring: &ChartRing, p: &Poly) -> Option<Poly> {
    if p.len() != 1 {
        return None;
    }
    let (m, c) = p.leading_term()?;
    let e = ring.laurent_exponents(m);
    if e.iter().enumerate().any(|(i, x)| *x != 0 && !ring.vertex().contains(i)) {
        return None;
    }
    let inv: Vec<i64> = e.iter().map(|x| -x).collect();
    Some(ring.laurent_monomial(&inv)?.scale(&c.inv()))
}

/// An equivalent presentation with unit pivots eliminated: each elimination drops one
/// generator and one relation. Returns `(generator count, relation rows)`.
#[allow(clippy::mut_range_bound)] // the loops restart after every change
pub fn prune_presentation(m: &PresentedModule) -> (usize, Vec<FreeModElem>) {
    let ring = m.ring();
    let mut g = m.ngens();
    let mut rows: Vec<FreeModElem> = m.relations().to_vec();
    'outer: loop {
        for r in 0..rows.len() {
            for c in 0..g {
                let Some(inv) = unit_inverse(ring, &rows[r][c]) else {
                    continue;
                };
                let pivot = rows.remove(r);
                for row in rows.iter_mut() {
                    let f = ring.reduce(&row[c].mul(&inv));
                    if f.is_zero() {
                        continue;
                    }
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        *x = ring.reduce(&x.sub(&f.mul(y)));
                    }
                }
                for row in rows.iter_mut() {
                    row.remove(c);
                }
                g -= 1;
                rows.retain(|row| row.iter().any(|p| !p.is_zero()));
                continue 'outer;
            }
        }
        return (g, rows);
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(ring: &ChartRing, m: &[Vec<Poly>]) -> Poly {
    let k = m.len();
    match k {
        0 => ring.one(),
        1 => m[0][0].clone(),
        2 => ring.reduce(&m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]))),
        _ => {
            let mut acc = ring.zero();
            for j in 0..k {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let t = m[0][j].mul(&determinant(ring, &minor));
                acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            ring.reduce(&acc)
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All `k`-minors of `rows` (each a list of `g` entries), reduced and deduplicated.
pub fn minors(ring: &ChartRing, rows: &[FreeModElem], g: usize, k: usize) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    if k > rows.len() || k > g {
        return out;
    }
    for rs in subsets(rows.len(), k) {
        for cs in subsets(g, k) {
            let sub: Vec<Vec<Poly>> = rs
                .iter()
                .map(|&r| cs.iter().map(|&c| rows[r][c].clone()).collect())
                .collect();
            let d = ring.reduce(&determinant(ring, &sub));
            if !d.is_zero() {
                let d = d.make_monic();
                if !out.contains(&d) {
                    out.push(d);
                }
            }
        }
    }
    out
}

/// `F_0, .., F_g` for the original generator count `g`.
pub fn fitting_ideals(m: &PresentedModule) -> Vec<FittingIdeal> {
    let ring = m.ring();
    let g0 = m.ngens();
    // Fitting ideals do not depend on the presentation, so the pruned one is used
    let (g, rows) = prune_presentation(m);
    (0..=g0)
        .map(|i| {
            let minors = if i >= g {
                vec![ring.one()]
            } else {
                minors(ring, &rows, g, g - i)
            };
            FittingIdeal {
                index: i,
                ring: ring.clone(),
                minors,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Projectivity {
    Projective { rank: usize },
    NotProjective { index: usize },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivityCertificate {
    pub vertex: Vertex,
    pub verdict: Projectivity,
    /// Whether the chart was assumed to have connected spectrum.
    pub connected_assumed: bool,
    pub fitting: Vec<FittingIdeal>,
}

impl ProjectivityCertificate {
    pub fn is_projective(&self) -> bool {
        matches!(self.verdict, Projectivity::Projective { .. })
    }

    pub fn rank(&self) -> Option<usize> {
        match self.verdict {
            Projectivity::Projective { rank } => Some(rank),
            _ => None,
        }
    }

    /// Re-derives the verdict from the stored Fitting ideals.
    pub fn recheck(&self) -> bool {
        match self.verdict {
            Projectivity::Projective { rank } => {
                self.fitting[rank].is_unit() && (rank == 0 || self.fitting[rank - 1].is_zero())
            }
            Projectivity::NotProjective { index } => {
                !self.fitting[index].is_zero() && self.fitting[index + 1].is_unit()
            }
            Projectivity::Inconclusive => !self.connected_assumed,
        }
    }
}

/// Projective of rank `r` iff `F_r = (1)` and `F_{r-1} = 0`, valid when the chart has
/// no nontrivial idempotents.
pub fn is_projective_fp_with(m: &PresentedModule, connected: bool) -> ProjectivityCertificate {
    let fitting = fitting_ideals(m);
    let r = fitting
        .iter()
        .position(FittingIdeal::is_unit)
        .expect("the last Fitting ideal is the unit ideal");
    let verdict = if r == 0 || fitting[r - 1].is_zero() {
        Projectivity::Projective { rank: r }
    } else if connected {
        Projectivity::NotProjective { index: r - 1 }
    } else {
        Projectivity::Inconclusive
    };
    ProjectivityCertificate {
        vertex: m.ring().vertex(),
        verdict,
        connected_assumed: connected,
        fitting,
    }
}

pub fn is_projective_fp(m: &PresentedModule) -> ProjectivityCertificate {
    is_projective_fp_with(m, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn affine_plane() -> Arc<ChartRing> {
        Arc::new(ChartRing::new(Field::Rationals, 2, Vertex::singleton(0), &[]).unwrap())
    }

    #[test]
    fn free_module() {
        let r = affine_plane();
        let m = PresentedModule::free(r, 2);
        let f = fitting_ideals(&m);
        assert!(f[0].is_zero() && f[1].is_zero() && f[2].is_unit());
        let c = is_projective_fp(&m);
        assert_eq!(c.verdict, Projectivity::Projective { rank: 2 });
        assert!(c.recheck());
    }

    #[test]
    fn maximal_ideal_of_the_plane() {
        let r = affine_plane();
        let (x, y) = (r.z(1).unwrap(), r.z(2).unwrap());
        let m = PresentedModule::new(r.clone(), 2, vec![vec![y.clone(), x.neg()]]).unwrap();
        let f = fitting_ideals(&m);
        assert!(f[0].is_zero());
        // F_1 = (x, y), checked both ways
        for p in [&x, &y] {
            assert!(f[1].contains(p));
        }
        for p in &f[1].minors {
            let ideal = PresIdeal::new(r.poly_ring().clone(), vec![x.clone(), y.clone()]).unwrap();
            assert!(ideal.contains(p));
        }
        assert!(!f[1].is_unit());
        assert!(f[2].is_unit());
        let c = is_projective_fp(&m);
        assert_eq!(c.verdict, Projectivity::NotProjective { index: 1 });
        assert!(c.recheck());
        assert_eq!(is_projective_fp_with(&m, false).verdict, Projectivity::Inconclusive);
    }

    #[test]
    fn cyclic_torsion() {
        let r = Arc::new(ChartRing::new(Field::Rationals, 1, Vertex::singleton(0), &[]).unwrap());
        let x = r.z(1).unwrap();
        let m = PresentedModule::new(r.clone(), 1, vec![vec![x.clone()]]).unwrap();
        let f = fitting_ideals(&m);
        assert_eq!(f[0].minors, vec![x]);
        assert!(f[1].is_unit());
    }

    #[test]
    fn unit_relation_gives_zero_module() {
        let r = Arc::new(
            ChartRing::new(Field::Rationals, 1, Vertex::from_indices(&[0, 1]), &[]).unwrap(),
        );
        let m = PresentedModule::new(r.clone(), 1, vec![vec![r.z(1).unwrap()]]).unwrap();
        assert_eq!(prune_presentation(&m).0, 0);
        assert_eq!(is_projective_fp(&m).verdict, Projectivity::Projective { rank: 0 });
    }

    #[test]
    fn pruning_keeps_fitting_ideals() {
        let r = affine_plane();
        let (x, y) = (r.z(1).unwrap(), r.z(2).unwrap());
        // e0 = -x e1 eliminated: module is R/(y*x)... relations (1, x), (0, x*y)
        let m = PresentedModule::new(
            r.clone(),
            2,
            vec![vec![r.one(), x.clone()], vec![r.zero(), x.mul(&y)]],
        )
        .unwrap();
        let f = fitting_ideals(&m);
        assert!(f[0].contains(&x.mul(&y)));
        assert!(f[1].is_unit());
        // unpruned minors agree
        let direct = minors(&r, m.relations(), 2, 2);
        assert_eq!(direct.len(), 1);
        assert!(f[0].contains(&direct[0]));
    }
}
