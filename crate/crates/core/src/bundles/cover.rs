//! Covers by sums of twists, kernels of covers as witnesses of `Vdim <= 1`, and
//! finite Lazard-style approximations `coker(sub -> block)`.

use std::sync::Arc;

use crate::charts::Vertex;
use crate::closure::SubRep;
use crate::error::{Error, Result};
use crate::groebner::{FreeModElem, PresMatrix};
use crate::matrix::{identity, vec_mul};
use crate::module::PresentedModule;
use crate::sheaf::{
    cokernel_with_projection, from_graded, graded_map_between, is_isomorphism, is_quasi_coherent,
    kernel_with_inclusion, GradedModule, ProjQuiver, SheafMap, SheafRep,
};

use super::fitting::ProjectivityCertificate;
use super::{is_vector_bundle, BundleReport};

#[derive(Clone, Debug)]
pub struct SerreCover {
    pub sheaf: Arc<SheafRep>,
    /// `⊕ O(twists[j]) -> sheaf`, generator `j` to generator `j`.
    pub cover: SheafMap,
    pub twists: Vec<i64>,
}

/// Vertices where `phi` is not surjective.
pub fn non_surjective_vertices(phi: &SheafMap) -> Vec<usize> {
    let target = phi.target();
    (0..target.modules().len())
        .filter(|&v| {
            let b = target.module(v);
            let span = b.span_basis(&phi.matrix(v).rows);
            !(0..b.ngens()).all(|j| span.contains(&b.generator(j)))
        })
        .collect()
}

/// The surjection from `⊕_j O(-d_j)` onto the sheafification of a graded module
/// whose generators have degrees `d_j`.
pub fn serre_cover(q: &Arc<ProjQuiver>, g: &GradedModule) -> Result<SerreCover> {
    let sheaf = Arc::new(from_graded(q, g)?);
    let free = GradedModule::free(g.degrees.clone());
    let source = Arc::new(from_graded(q, &free)?);
    let amb = q.ambient();
    let id = identity(g.ngens(), amb.nvars(), q.field());
    let cover = graded_map_between(source, sheaf.clone(), &free, g, &id)?;
    if let Some(v) = non_surjective_vertices(&cover).first() {
        return Err(Error::Internal(format!(
            "cover is not surjective at {}",
            q.vertices()[*v]
        )));
    }
    Ok(SerreCover {
        sheaf,
        cover,
        twists: g.degrees.iter().map(|d| -d).collect(),
    })
}

/// Exactness of `0 -> K -> A -> F -> 0` at each position, every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exactness {
    pub injective: bool,
    pub middle: bool,
    pub surjective: bool,
}

impl Exactness {
    pub fn holds(&self) -> bool {
        self.injective && self.middle && self.surjective
    }
}

pub fn check_exactness(inclusion: &SheafMap, cover: &SheafMap) -> Exactness {
    let k = inclusion.source();
    let a = cover.source();
    let f = cover.target();
    let nv = a.modules().len();
    let mut injective = true;
    let mut middle = true;
    for v in 0..nv {
        let rows = &inclusion.matrix(v).rows;
        if !a.module(v).kernel_of_map(rows).iter().all(|x| k.module(v).is_zero_elem(x)) {
            injective = false;
        }
        let nvars = a.module(v).ring().nvars();
        // image inside kernel
        if !rows
            .iter()
            .all(|r| f.module(v).is_zero_elem(&vec_mul(r, cover.matrix(v), nvars)))
        {
            middle = false;
        }
        // kernel inside image
        let ker = f.module(v).kernel_of_map(&cover.matrix(v).rows);
        if !ker.is_empty() {
            let span = a.module(v).span_basis(rows);
            if !ker.iter().all(|x| span.contains(x)) {
                middle = false;
            }
        }
    }
    let surjective = non_surjective_vertices(cover).is_empty();
    Exactness {
        injective,
        middle,
        surjective,
    }
}

/// `0 -> K -> A -> F -> 0` with `K` and `A` vector bundles.
#[derive(Clone, Debug)]
pub struct VdimWitness {
    pub kernel: Arc<SheafRep>,
    pub inclusion: SheafMap,
    pub cover: SheafMap,
    pub exactness: Exactness,
    pub kernel_certificates: BundleReport,
    pub middle_certificates: BundleReport,
}

impl VdimWitness {
    /// Recomputes exactness and re-derives every certificate from its Fitting data.
    pub fn recheck(&self) -> bool {
        check_exactness(&self.inclusion, &self.cover).holds()
            && self.kernel_certificates.is_bundle
            && self.middle_certificates.is_bundle
            && self
                .kernel_certificates
                .certificates
                .iter()
                .chain(&self.middle_certificates.certificates)
                .all(ProjectivityCertificate::recheck)
    }
}

#[derive(Clone, Debug)]
pub enum VdimOutcome {
    Witness(Box<VdimWitness>),
    /// A chart where the kernel (`in_kernel`) or the middle term is not projective.
    Failure {
        vertex: Vertex,
        in_kernel: bool,
        certificate: ProjectivityCertificate,
    },
}

impl VdimOutcome {
    pub fn witness(&self) -> Option<&VdimWitness> {
        match self {
            VdimOutcome::Witness(w) => Some(w),
            VdimOutcome::Failure { .. } => None,
        }
    }
}

pub fn vdim_le_one_witness(cover: &SheafMap) -> Result<VdimOutcome> {
    if let Some(v) = non_surjective_vertices(cover).first() {
        let q = cover.source().quiver();
        return Err(Error::Precondition(format!(
            "cover is not surjective at {}",
            q.vertices()[*v]
        )));
    }
    let middle_certificates = is_vector_bundle(cover.source())?;
    if let Some(c) = middle_certificates.failures().first() {
        return Ok(VdimOutcome::Failure {
            vertex: c.vertex,
            in_kernel: false,
            certificate: (*c).clone(),
        });
    }
    let (k, inclusion) = kernel_with_inclusion(cover)?;
    let kernel = inclusion.source().clone();
    debug_assert_eq!(kernel.modules(), k.modules());
    let kernel_certificates = is_vector_bundle(&kernel)?;
    if let Some(c) = kernel_certificates.failures().first() {
        return Ok(VdimOutcome::Failure {
            vertex: c.vertex,
            in_kernel: true,
            certificate: (*c).clone(),
        });
    }
    let exactness = check_exactness(&inclusion, cover);
    if !exactness.holds() {
        return Err(Error::Internal(format!("kernel sequence not exact: {exactness:?}")));
    }
    Ok(VdimOutcome::Witness(Box::new(VdimWitness {
        kernel,
        inclusion,
        cover: cover.clone(),
        exactness,
        kernel_certificates,
        middle_certificates,
    })))
}

/// One finite stage `F_sub = coker(sub -> ⊕_{j in block} A_j)` with its map to `F`.
#[derive(Clone, Debug)]
pub struct LazardStage {
    pub sheaf: Arc<SheafRep>,
    pub to_target: SheafMap,
    pub quasi_coherent: bool,
    pub witness: VdimOutcome,
    pub is_isomorphism: bool,
}

fn block_rep(a: &SheafRep, block: &[usize]) -> Result<SheafRep> {
    let q = a.quiver().clone();
    let mut modules = Vec::new();
    for (v, m) in a.modules().iter().enumerate() {
        if !m.relations().is_empty() {
            return Err(Error::Precondition(format!(
                "middle term is not free at {}",
                q.vertices()[v]
            )));
        }
        modules.push(PresentedModule::free(m.ring().clone(), block.len()));
    }
    let mut maps = Vec::new();
    for e in 0..q.edges().len() {
        let f = a.edge_map(e);
        for &j in block {
            for c in 0..f.ncols {
                if !block.contains(&c) && !f.rows[j][c].is_zero() {
                    return Err(Error::Precondition(format!(
                        "edge {} mixes the block with other summands",
                        q.edges()[e]
                    )));
                }
            }
        }
        let rows = block
            .iter()
            .map(|&j| block.iter().map(|&c| f.rows[j][c].clone()).collect())
            .collect();
        maps.push(PresMatrix::new(block.len(), rows));
    }
    SheafRep::new(q, modules, maps)
}

pub fn lazard_approximation(
    cover: &SheafMap,
    inclusion: &SheafMap,
    sub: &SubRep,
    block: &[usize],
) -> Result<LazardStage> {
    let a = cover.source();
    let f = cover.target();
    let q = a.quiver().clone();
    if !Arc::ptr_eq(inclusion.target(), a) && inclusion.target().modules() != a.modules() {
        return Err(Error::Precondition("inclusion does not land in the cover's source".into()));
    }
    if sub.ambient.modules() != inclusion.source().modules() {
        return Err(Error::Precondition("sub-representation is not inside the kernel".into()));
    }
    let ngens = a.modules().first().map_or(0, PresentedModule::ngens);
    if block.iter().any(|&j| j >= ngens) {
        return Err(Error::Precondition("block index out of range".into()));
    }
    let sub_rep = Arc::new(sub.induced_rep()?);
    let certs = is_vector_bundle(&sub_rep)?;
    if !certs.is_bundle {
        return Err(Error::Precondition("sub-representation is not a vector bundle".into()));
    }
    let block_rep = Arc::new(block_rep(a, block)?);
    let mut mats = Vec::new();
    for (v, gens) in sub.gens.iter().enumerate() {
        let ring = q.ring(v);
        let mut rows = Vec::new();
        for g in gens {
            let y: FreeModElem = ring.reduce_vec(&vec_mul(g, inclusion.matrix(v), ring.nvars()));
            if y.iter().enumerate().any(|(c, p)| !block.contains(&c) && !p.is_zero()) {
                return Err(Error::Precondition(format!(
                    "sub-representation leaves the block at {}",
                    q.vertices()[v]
                )));
            }
            rows.push(block.iter().map(|&c| y[c].clone()).collect());
        }
        mats.push(PresMatrix::new(block.len(), rows));
    }
    let into_block = SheafMap::new(sub_rep, block_rep, mats)?;
    let (_, projection) = cokernel_with_projection(&into_block)?;
    let sheaf = projection.target().clone();
    let to_target = SheafMap::new(
        sheaf.clone(),
        f.clone(),
        (0..q.vertices().len())
            .map(|v| {
                let c = cover.matrix(v);
                PresMatrix::new(c.ncols, block.iter().map(|&j| c.rows[j].clone()).collect())
            })
            .collect(),
    )?;
    let quasi_coherent = is_quasi_coherent(&sheaf)?.is_quasi_coherent();
    let witness = vdim_le_one_witness(&projection)?;
    let iso = is_isomorphism(&to_target);
    Ok(LazardStage {
        sheaf,
        to_target,
        quasi_coherent,
        witness,
        is_isomorphism: iso,
    })
}

/// Stages for a nested family of subs; on finite examples the last stage with the full
/// kernel and full block maps isomorphically onto `F`.
pub fn lazard_chain(
    cover: &SheafMap,
    inclusion: &SheafMap,
    subs: &[SubRep],
    block: &[usize],
) -> Result<Vec<LazardStage>> {
    for w in subs.windows(2) {
        for (v, gens) in w[0].gens.iter().enumerate() {
            let m = w[1].ambient.module(v);
            if gens.iter().any(|g| !m.span_contains(&w[1].gens[v], g)) {
                return Err(Error::Precondition("sub-representations are not nested".into()));
            }
        }
    }
    subs.iter()
        .map(|s| lazard_approximation(cover, inclusion, s, block))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::transition_matrix;
    use crate::field::Field;
    use crate::sheaf::build_proj_quiver;

    fn p1() -> Arc<ProjQuiver> {
        Arc::new(build_proj_quiver(Field::Rationals, 1, &[]).unwrap())
    }

    fn euler_cover(q: &Arc<ProjQuiver>) -> SheafMap {
        let amb = q.ambient();
        let src = GradedModule::twists(&[0, 0]);
        let tgt = GradedModule::twists(&[1]);
        let m = PresMatrix::new(1, vec![vec![amb.var(0)], vec![amb.var(1)]]);
        crate::sheaf::graded_map(q, &src, &tgt, &m).unwrap()
    }

    #[test]
    fn serre_cover_of_twist_sum() {
        let q = p1();
        let c = serre_cover(&q, &GradedModule::twists(&[0, 2])).unwrap();
        assert_eq!(c.twists, vec![0, 2]);
        assert!(is_isomorphism(&c.cover));
    }

    #[test]
    fn serre_cover_of_point_ideal() {
        let q = p1();
        let amb = q.ambient();
        // (x0, x1) with the Koszul relation: generators in degree 1
        let g = GradedModule {
            degrees: vec![1, 1],
            relations: vec![vec![amb.var(1), amb.var(0).neg()]],
        };
        let c = serre_cover(&q, &g).unwrap();
        assert_eq!(c.twists, vec![-1, -1]);
        let (coker, _) = cokernel_with_projection(&c.cover).unwrap();
        assert!(coker.modules().iter().all(PresentedModule::is_zero_module));
        // the ideal (x1) is a copy of O(-1)
        let line = serre_cover(&q, &GradedModule::free(vec![1])).unwrap();
        let t = transition_matrix(&line.sheaf).unwrap();
        assert_eq!(t.matrix.rows[0][0].as_monomial().unwrap().1, -1);
    }

    #[test]
    fn euler_sequence_witness() {
        let q = p1();
        let cover = euler_cover(&q);
        let out = vdim_le_one_witness(&cover).unwrap();
        let w = out.witness().expect("witness");
        assert!(w.recheck());
        let t = transition_matrix(&w.kernel).unwrap();
        assert_eq!(t.matrix.nrows(), 1);
        assert_eq!(t.matrix.rows[0][0].as_monomial().unwrap().1, -1);
    }

    #[test]
    fn skyscraper_still_has_witness() {
        let q = p1();
        let amb = q.ambient();
        let g = GradedModule {
            degrees: vec![0],
            relations: vec![vec![amb.var(0)]],
        };
        let c = serre_cover(&q, &g).unwrap();
        assert!(!is_vector_bundle(&c.sheaf).unwrap().is_bundle);
        let out = vdim_le_one_witness(&c.cover).unwrap();
        let w = out.witness().expect("witness");
        assert!(w.recheck());
        let t = transition_matrix(&w.kernel).unwrap();
        assert_eq!(t.matrix.rows[0][0].as_monomial().unwrap().1, -1);
    }

    #[test]
    fn lazard_full_kernel_recovers_target() {
        let q = p1();
        let cover = euler_cover(&q);
        let (_, incl) = kernel_with_inclusion(&cover).unwrap();
        let sub = SubRep::full(incl.source().clone());
        let stage = lazard_approximation(&cover, &incl, &sub, &[0, 1]).unwrap();
        assert!(stage.quasi_coherent);
        assert!(stage.is_isomorphism);
        assert!(stage.witness.witness().unwrap().recheck());
    }

    #[test]
    fn lazard_summand_of_free() {
        let q = p1();
        let c = serre_cover(&q, &GradedModule::twists(&[0, 0])).unwrap();
        let (_, incl) = kernel_with_inclusion(&c.cover).unwrap();
        let sub = SubRep::full(incl.source().clone());
        let stage = lazard_approximation(&c.cover, &incl, &sub, &[0]).unwrap();
        assert!(!stage.is_isomorphism);
        assert!(stage.sheaf.modules().iter().all(|m| m.ngens() == 1 && m.relations().is_empty()));
        assert!(crate::sheaf::non_isomorphic_vertices(&stage.to_target).len() == 3);
        let full = lazard_approximation(&c.cover, &incl, &sub, &[0, 1]).unwrap();
        assert!(full.is_isomorphism);
    }

    #[test]
    fn lazard_rejects_sub_outside_block() {
        let q = p1();
        let cover = euler_cover(&q);
        let (_, incl) = kernel_with_inclusion(&cover).unwrap();
        let sub = SubRep::full(incl.source().clone());
        assert!(matches!(
            lazard_approximation(&cover, &incl, &sub, &[0]),
            Err(Error::Precondition(_))
        ));
    }
}
