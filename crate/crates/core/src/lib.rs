pub mod bundles;
pub mod charts;
pub mod closure;
pub mod error;
pub mod field;
pub mod groebner;
pub mod hill;
pub mod invariants;
pub mod matrix;
pub mod module;
pub mod oracle;
pub mod poly;
pub mod sheaf;

pub use bundles::{
    birkhoff_split, is_projective_fp, is_vector_bundle, BundleReport, LMatrix, LaurentPoly,
    Projectivity, Splitting,
};
pub use charts::{ChartRing, Vertex};
pub use closure::{qc_closure, verify_subrep, ClosureOutcome, SectionSet, SubRep, WitnessMode};
pub use error::{Error, Result};
pub use field::{Coeff, Field};
pub use groebner::{FreeModElem, GroebnerBasis, PresMatrix};
pub use hill::{build_hill_family, verify_hill_properties, FilteredModule, HillLattice, HillReport};
pub use module::PresentedModule;
pub use poly::{Monomial, Poly, PolyRing};
pub use sheaf::{
    build_proj_quiver, is_quasi_coherent, structure_sheaf, twist, Edge, GradedModule, ProjQuiver,
    QcReport, SheafMap, SheafRep,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
