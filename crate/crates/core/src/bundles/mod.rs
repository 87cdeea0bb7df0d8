//! Local freeness, covers by twists, `Vdim <= 1` witnesses, finite Lazard stages, and
//! splitting of bundles on `P^1`.

mod birkhoff;
mod cover;
mod filtration;
mod fitting;
mod laurent;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sheaf::{is_quasi_coherent, SheafRep};

pub use birkhoff::{birkhoff_split, Splitting};
pub use cover::{
    check_exactness, lazard_approximation, lazard_chain, non_surjective_vertices, serre_cover,
    vdim_le_one_witness, Exactness, LazardStage, SerreCover, VdimOutcome, VdimWitness,
};
pub use filtration::{
    bundle_from_transition, chart_to_laurent, free_basis, laurent_to_chart, line_bundle_filtration,
    transition_matrix, Filtration, Transition,
};
pub use fitting::{
    determinant, fitting_ideals, is_projective_fp, is_projective_fp_with, minors, prune_presentation,
    FittingIdeal, Projectivity, ProjectivityCertificate,
};
pub use laurent::{LMatrix, LaurentPoly};

/// Projectivity certificates on the charts `{0}, .., {n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleReport {
    pub certificates: Vec<ProjectivityCertificate>,
    pub is_bundle: bool,
}

impl BundleReport {
    pub fn ranks(&self) -> Vec<Option<usize>> {
        self.certificates.iter().map(ProjectivityCertificate::rank).collect()
    }

    pub fn failures(&self) -> Vec<&ProjectivityCertificate> {
        self.certificates.iter().filter(|c| !c.is_projective()).collect()
    }
}

/// Checks the singleton charts only; the larger charts are localizations of them.
pub fn is_vector_bundle(rep: &SheafRep) -> Result<BundleReport> {
    let qc = is_quasi_coherent(rep)?;
    if let Some(c) = qc.failures().first() {
        return Err(Error::Precondition(format!("not quasi-coherent at edge {}", c.edge)));
    }
    let certificates: Vec<ProjectivityCertificate> = rep
        .quiver()
        .basic_vertices()
        .into_par_iter()
        .map(|v| is_projective_fp(rep.module(v)))
        .collect();
    let is_bundle = certificates.iter().all(ProjectivityCertificate::is_projective);
    Ok(BundleReport {
        certificates,
        is_bundle,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::field::Field;
    use crate::groebner::PresMatrix;
    use crate::sheaf::{build_proj_quiver, cokernel, graded_map, structure_sheaf, twist, GradedModule};

    #[test]
    fn twists_are_bundles() {
        let q = Arc::new(build_proj_quiver(Field::Rationals, 1, &[]).unwrap());
        for k in -3..=3 {
            let r = is_vector_bundle(&twist(&q, k)).unwrap();
            assert!(r.is_bundle);
            assert_eq!(r.ranks(), vec![Some(1), Some(1)]);
        }
    }

    #[test]
    fn subscheme_structure_sheaf_is_bundle() {
        let f = Field::prime(5).unwrap();
        let amb = crate::charts::ambient_ring(f, 1);
        let q = Arc::new(build_proj_quiver(f, 1, &[amb.parse("x0*x1").unwrap()]).unwrap());
        let r = is_vector_bundle(&structure_sheaf(&q)).unwrap();
        assert!(r.is_bundle);
        assert_eq!(r.ranks(), vec![Some(1), Some(1)]);
    }

    #[test]
    fn skyscraper_is_not_a_bundle() {
        let q = Arc::new(build_proj_quiver(Field::Rationals, 1, &[]).unwrap());
        let amb = q.ambient();
        let m = PresMatrix::new(1, vec![vec![amb.var(0)]]);
        let phi = graded_map(&q, &GradedModule::twists(&[0]), &GradedModule::twists(&[1]), &m).unwrap();
        let r = is_vector_bundle(&cokernel(&phi).unwrap()).unwrap();
        assert!(!r.is_bundle);
        assert_eq!(r.failures().len(), 1);
        assert_eq!(r.failures()[0].vertex, crate::charts::Vertex::singleton(1));
        assert_eq!(r.failures()[0].verdict, Projectivity::NotProjective { index: 0 });
    }

    #[test]
    fn euler_kernel_has_rank_two() {
        let q = Arc::new(build_proj_quiver(Field::Rationals, 2, &[]).unwrap());
        let amb = q.ambient();
        let m = PresMatrix::new(1, (0..3).map(|i| vec![amb.var(i)]).collect());
        let phi = graded_map(&q, &GradedModule::twists(&[0, 0, 0]), &GradedModule::twists(&[1]), &m).unwrap();
        let k = crate::sheaf::kernel(&phi).unwrap();
        let r = is_vector_bundle(&k).unwrap();
        assert!(r.is_bundle);
        assert_eq!(r.ranks(), vec![Some(2); 3]);
    }
}
