//! Inputs shared by the benchmarks.

use std::sync::Arc;

use qcquiver::groebner::TermOrder;
use qcquiver::{
    build_proj_quiver, structure_sheaf, twist, Field, FreeModElem, LMatrix, LaurentPoly, PolyRing, SectionSet,
    SheafRep,
};

/// Rank-one generators of the twisted cubic ideal in `k[x0..x3]`.
pub fn twisted_cubic() -> (PolyRing, Vec<FreeModElem>, TermOrder) {
    let r = PolyRing::with_standard_names(Field::Rationals, 4);
    let gens = ["x0*x2 - x1^2", "x1*x3 - x2^2", "x0*x3 - x1*x2"]
        .iter()
        .map(|s| vec![r.parse(s).unwrap()])
        .collect();
    (r, gens, TermOrder::default())
}

/// `O(1) ⊕ O` on `P^1` seeded with the first summand on the overlap chart.
pub fn summand_closure_input() -> (Arc<SheafRep>, SectionSet) {
    let q = Arc::new(build_proj_quiver(Field::Rationals, 1, &[]).unwrap());
    let rep = qcquiver::sheaf::direct_sum(&twist(&q, 1), &structure_sheaf(&q)).unwrap();
    let top = q.vertices().len() - 1;
    let mut seed: SectionSet = vec![Vec::new(); q.vertices().len()];
    seed[top].push(rep.module(top).generator(0));
    (Arc::new(rep), seed)
}

/// A 3x3 transition of splitting type `(2, 1, -1)` hidden by unimodular factors.
pub fn scrambled_transition() -> LMatrix {
    let f = Field::Rationals;
    let p = |s: &str| LaurentPoly::parse(f, s).unwrap();
    let left = LMatrix::new(
        f,
        vec![
            vec![p("1"), p("s^-1 + 2*s^-2"), p("0")],
            vec![p("0"), p("1"), p("0")],
            vec![p("3*s^-1"), p("0"), p("1")],
        ],
    )
    .unwrap();
    let right = LMatrix::new(
        f,
        vec![
            vec![p("1"), p("0"), p("s^2 - 1")],
            vec![p("s"), p("1"), p("0")],
            vec![p("0"), p("0"), p("1")],
        ],
    )
    .unwrap();
    left.mul(&LMatrix::diagonal(f, &[2, 1, -1])).mul(&right)
}
