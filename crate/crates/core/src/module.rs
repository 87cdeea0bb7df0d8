//! Finitely presented modules over chart rings.
//!
//! `M = R(v)^g / rows(relations)`. Every computation happens in the free module over
//! the polynomial ring underlying `R(v)`, with the ring relations added as `I * e_j`.

use std::sync::{Arc, OnceLock};

use crate::charts::ChartRing;
use crate::error::{Error, Result};
use crate::groebner::{module_kernel, FreeModElem, GroebnerBasis, PresMatrix, TermOrder};
use crate::matrix::{is_zero_vec, unit_vec, zero_vec};
use crate::poly::Poly;

/// A finitely presented module over a chart ring.
#[derive(Clone, Debug)]
pub struct PresentedModule {
    ring: Arc<ChartRing>,
    ngens: usize,
    relations: Vec<FreeModElem>,
    basis: OnceLock<GroebnerBasis>,
}

/// Short name for a finitely presented module.
pub type FPModule = PresentedModule;

impl PartialEq for PresentedModule {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring && self.ngens == other.ngens && self.relations == other.relations
    }
}

impl PresentedModule {
    pub fn new(
        ring: Arc<ChartRing>,
        ngens: usize,
        relations: Vec<FreeModElem>,
    ) -> Result<PresentedModule> {
        for r in &relations {
            if r.len() != ngens {
                return Err(Error::DimensionMismatch(format!(
                    "relation of length {} for {ngens} generators",
                    r.len()
                )));
            }
            for p in r {
                ring.check(p)?;
            }
        }
        let relations = relations
            .into_iter()
            .map(|r| ring.reduce_vec(&r))
            .filter(|r| !is_zero_vec(r))
            .collect();
        Ok(PresentedModule {
            ring,
            ngens,
            relations,
            basis: OnceLock::new(),
        })
    }

    pub fn free(ring: Arc<ChartRing>, rank: usize) -> PresentedModule {
        PresentedModule {
            ring,
            ngens: rank,
            relations: Vec::new(),
            basis: OnceLock::new(),
        }
    }

    pub fn ring(&self) -> &Arc<ChartRing> {
        &self.ring
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &[FreeModElem] {
        &self.relations
    }

    pub fn relation_matrix(&self) -> PresMatrix {
        PresMatrix::new(self.ngens, self.relations.clone())
    }

    fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn zero(&self) -> FreeModElem {
        zero_vec(self.ngens, self.nvars())
    }

    pub fn generator(&self, i: usize) -> FreeModElem {
        unit_vec(i, self.ngens, self.nvars(), self.ring.field())
    }

    /// Relations together with `I * e_j` for the ring ideal `I`.
    pub fn relation_generators(&self) -> Vec<FreeModElem> {
        let mut out = self.relations.clone();
        for r in self.ring.relations() {
            for j in 0..self.ngens {
                let mut v = self.zero();
                v[j] = r.clone();
                out.push(v);
            }
        }
        out
    }

    /// Gröbner basis of the relation module inside the free module.
    pub fn relation_basis(&self) -> &GroebnerBasis {
        self.basis.get_or_init(|| {
            GroebnerBasis::compute(
                self.ring.poly_ring(),
                self.ngens,
                &self.relation_generators(),
                TermOrder::default(),
            )
            .expect("relations were checked at construction")
        })
    }

    pub fn check_elem(&self, v: &[Poly]) -> Result<()> {
        if v.len() != self.ngens {
            return Err(Error::DimensionMismatch(format!(
                "element of length {} in a module with {} generators",
                v.len(),
                self.ngens
            )));
        }
        v.iter().try_for_each(|p| self.ring.check(p))
    }

    /// Canonical representative of the class of `v`.
    pub fn reduce(&self, v: &[Poly]) -> FreeModElem {
        self.relation_basis().reduce(v)
    }

    pub fn is_zero_elem(&self, v: &[Poly]) -> bool {
        self.relation_basis().contains(v)
    }

    pub fn is_zero_module(&self) -> bool {
        self.ngens == 0 || self.relation_basis().is_whole_module()
    }

    fn span_generators(&self, elems: &[FreeModElem]) -> Vec<FreeModElem> {
        let mut gens = elems.to_vec();
        gens.extend(self.relation_generators());
        gens
    }

    /// Gröbner basis of the preimage in `R^g` of the submodule spanned by `elems`.
    pub fn span_basis(&self, elems: &[FreeModElem]) -> GroebnerBasis {
        GroebnerBasis::compute(
            self.ring.poly_ring(),
            self.ngens,
            &self.span_generators(elems),
            TermOrder::default(),
        )
        .expect("elements belong to the module")
    }

    pub fn span_contains(&self, elems: &[FreeModElem], v: &[Poly]) -> bool {
        self.span_basis(elems).contains(v)
    }

    /// True when `a` and `b` span the same submodule.
    pub fn same_span(&self, a: &[FreeModElem], b: &[FreeModElem]) -> bool {
        let ga = self.span_basis(a);
        let gb = self.span_basis(b);
        ga.elements() == gb.elements()
    }

    /// Coefficients `c` in the chart ring with `v = sum c_i elems_i` in the module.
    pub fn lift(&self, v: &[Poly], elems: &[FreeModElem]) -> Option<Vec<Poly>> {
        let gb = GroebnerBasis::compute_tracked(
            self.ring.poly_ring(),
            self.ngens,
            &self.span_generators(elems),
            TermOrder::default(),
        )
        .expect("elements belong to the module");
        let c = gb.lift(v)?;
        Some(c[..elems.len()].iter().map(|p| self.ring.reduce(p)).collect())
    }

    /// Generators of the kernel of `R^k -> M`, `e_i -> images[i]`, reduced modulo the
    /// ring ideal and stripped of zero rows.
    pub fn kernel_of_map(&self, images: &[FreeModElem]) -> Vec<FreeModElem> {
        let k = images.len();
        let f = PresMatrix::new(self.ngens, images.to_vec());
        let rels = PresMatrix::new(self.ngens, self.relation_generators());
        let ker = module_kernel(self.ring.poly_ring(), &f, &rels).expect("dimensions agree");
        let mut out: Vec<FreeModElem> = Vec::new();
        for r in ker.rows {
            let r = self.ring.reduce_vec(&r);
            if !is_zero_vec(&r) && !out.contains(&r) {
                out.push(r);
            }
        }
        debug_assert!(out.iter().all(|r| r.len() == k));
        out
    }

    /// Keeps a sublist of `elems` spanning the same submodule, greedily in the given
    /// order, dropping elements already in the span of the kept ones.
    pub fn prune(&self, elems: &[FreeModElem]) -> Vec<FreeModElem> {
        let mut kept: Vec<FreeModElem> = Vec::new();
        for e in elems {
            if self.is_zero_elem(e) {
                continue;
            }
            if kept.is_empty() || !self.span_contains(&kept, e) {
                kept.push(e.clone());
            }
        }
        kept
    }

    /// Direct sum of two modules over the same ring.
    pub fn direct_sum(&self, other: &PresentedModule) -> Result<PresentedModule> {
        if *self.ring != *other.ring {
            return Err(Error::RingMismatch("direct sum over different charts".into()));
        }
        let nv = self.nvars();
        let mut rels = Vec::new();
        for r in &self.relations {
            let mut v = r.clone();
            v.extend(zero_vec(other.ngens, nv));
            rels.push(v);
        }
        for r in &other.relations {
            let mut v = zero_vec(self.ngens, nv);
            v.extend(r.iter().cloned());
            rels.push(v);
        }
        PresentedModule::new(self.ring.clone(), self.ngens + other.ngens, rels)
    }

    /// Same generators, extra relations.
    pub fn quotient(&self, extra: &[FreeModElem]) -> Result<PresentedModule> {
        let mut rels = self.relations.clone();
        rels.extend(extra.iter().cloned());
        PresentedModule::new(self.ring.clone(), self.ngens, rels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{ambient_ring, Vertex};
    use crate::field::Field;

    fn laurent() -> Arc<ChartRing> {
        Arc::new(ChartRing::new(Field::Rationals, 1, Vertex::from_indices(&[0, 1]), &[]).unwrap())
    }

    fn affine() -> Arc<ChartRing> {
        Arc::new(ChartRing::new(Field::Rationals, 1, Vertex::singleton(0), &[]).unwrap())
    }

    #[test]
    fn zero_module_detection() {
        let r = laurent();
        let m = PresentedModule::new(r.clone(), 1, vec![vec![r.z(1).unwrap()]]).unwrap();
        assert!(m.is_zero_module());
        let free = PresentedModule::free(r, 2);
        assert!(!free.is_zero_module());
    }

    #[test]
    fn lift_over_unit() {
        let r = laurent();
        let m = PresentedModule::free(r.clone(), 1);
        let c = m.lift(&[r.one()], &[vec![r.z(1).unwrap()]]).unwrap();
        assert_eq!(c, vec![r.u(1).unwrap()]);
    }

    #[test]
    fn kernel_of_xy_map() {
        let amb = ambient_ring(Field::Rationals, 2);
        let r = Arc::new(ChartRing::new(Field::Rationals, 2, Vertex::singleton(0), &[]).unwrap());
        let _ = amb;
        let m = PresentedModule::free(r.clone(), 1);
        let k = m.kernel_of_map(&[vec![r.z(1).unwrap()], vec![r.z(2).unwrap()]]);
        assert_eq!(k.len(), 1);
        let expected = vec![r.z(2).unwrap(), r.z(1).unwrap().neg()];
        let f = PresentedModule::free(r, 2);
        assert!(f.same_span(&k, &[expected]));
    }

    #[test]
    fn prune_drops_redundant() {
        let r = affine();
        let m = PresentedModule::free(r.clone(), 1);
        let z = r.z(1).unwrap();
        let kept = m.prune(&[vec![r.one()], vec![z.clone()], vec![z.mul(&z)]]);
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn dimension_errors() {
        let r = affine();
        assert!(PresentedModule::new(r.clone(), 2, vec![vec![r.one()]]).is_err());
    }
}
