use std::sync::Arc;

use proptest::prelude::*;
use qcquiver::bundles::{birkhoff_split, fitting_ideals, is_projective_fp, FittingIdeal, LMatrix, LaurentPoly};
use qcquiver::charts::{chart_hom, localize_module, ChartRing, Vertex};
use qcquiver::closure::{qc_closure, verify_subrep, SectionSet, WitnessMode};
use qcquiver::groebner::{GroebnerBasis, TermOrder};
use qcquiver::hill::{build_hill_family, random_filtered_module, verify_hill_properties};
use qcquiver::module::PresentedModule;
use qcquiver::sheaf::{build_proj_quiver, direct_sum, is_quasi_coherent, structure_sheaf, twist};
use qcquiver::{Field, Monomial, Poly, PolyRing};

const Q: Field = Field::Rationals;

fn poly_strategy(nvars: usize, max_deg: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, nvars), -3i64..=3), 1..4).prop_map(
        move |terms| {
            let mut p = Poly::zero(nvars);
            for (e, c) in terms {
                if e.iter().sum::<u32>() <= max_deg {
                    p.add_term(Monomial(e), Q.from_i64(c));
                }
            }
            p
        },
    )
}

fn elems_strategy(nvars: usize, rank: usize) -> impl Strategy<Value = Vec<Vec<Poly>>> {
    prop::collection::vec(prop::collection::vec(poly_strategy(nvars, 2), rank), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn groebner_basis_is_idempotent_and_contains_generators(gens in elems_strategy(3, 2)) {
        let ring = PolyRing::with_standard_names(Q, 3);
        let gb = GroebnerBasis::compute(&ring, 2, &gens, TermOrder::default()).unwrap();
        let again = GroebnerBasis::compute(&ring, 2, &gb.elements(), TermOrder::default()).unwrap();
        prop_assert_eq!(again.elements(), gb.elements());
        for g in &gens {
            prop_assert!(gb.contains(g));
        }
    }

    #[test]
    fn reduction_is_a_projection(gens in elems_strategy(2, 1), f in poly_strategy(2, 3)) {
        let ring = PolyRing::with_standard_names(Q, 2);
        let gb = GroebnerBasis::compute(&ring, 1, &gens, TermOrder::default()).unwrap();
        let r = gb.reduce(std::slice::from_ref(&f));
        prop_assert_eq!(gb.reduce(&r), r.clone());
        prop_assert!(gb.contains(&[f.sub(&r[0])]));
    }

    #[test]
    fn twists_are_quasi_coherent(k in -3i64..=3, n in 1usize..=2) {
        let q = Arc::new(build_proj_quiver(Q, n, &[]).unwrap());
        let t = twist(&q, k);
        prop_assert!(t.validate().is_ok());
        prop_assert!(is_quasi_coherent(&t).unwrap().is_quasi_coherent());
    }

    #[test]
    fn closure_is_monotone(mask in 0u32..64) {
        let q = Arc::new(build_proj_quiver(Q, 1, &[]).unwrap());
        let amb = Arc::new(direct_sum(&twist(&q, 1), &structure_sheaf(&q)).unwrap());
        let mut big: SectionSet = vec![Vec::new(); 3];
        let mut small: SectionSet = vec![Vec::new(); 3];
        for v in 0..3 {
            for i in 0..2 {
                let bit = 2 * v + i;
                big[v].push(amb.module(v).generator(i));
                if mask >> bit & 1 == 1 {
                    small[v].push(amb.module(v).generator(i));
                }
            }
        }
        let a = qc_closure(amb.clone(), &small, 6, WitnessMode::Generators).unwrap();
        let b = qc_closure(amb.clone(), &big, 6, WitnessMode::Generators).unwrap();
        prop_assert!(a.is_stabilized() && b.is_stabilized());
        prop_assert!(verify_subrep(a.sub()).passes());
        for v in 0..3 {
            for g in &a.sub().gens[v] {
                prop_assert!(amb.module(v).span_contains(&b.sub().gens[v], g));
            }
        }
    }

    #[test]
    fn splitting_type_is_invariant(
        a in -2i64..=2,
        b in -2i64..=2,
        ops in prop::collection::vec((0usize..2, -2i64..=2, -2i64..=2), 0..6),
    ) {
        let t = LMatrix::diagonal(Q, &[a, b]);
        let mut left = LMatrix::identity(Q, 2);
        let mut right = LMatrix::identity(Q, 2);
        // elementary factors: left ones over k[1/s], right ones over k[s]
        for (i, c, k) in ops {
            let mut e = LMatrix::identity(Q, 2);
            e.rows[i][1 - i] = LaurentPoly::monomial(Q.from_i64(c), -k.abs());
            left = e.mul(&left);
            let mut e = LMatrix::identity(Q, 2);
            e.rows[1 - i][i] = LaurentPoly::monomial(Q.from_i64(c), k.abs());
            right = right.mul(&e);
        }
        let scrambled = left.mul(&t).mul(&right);
        let sp = birkhoff_split(&scrambled).unwrap();
        let mut expect = vec![a, b];
        expect.sort_by(|x, y| y.cmp(x));
        prop_assert_eq!(&sp.exponents, &expect);
        prop_assert!(sp.verify(&scrambled));
    }

    #[test]
    fn projectivity_survives_localization(
        entries in prop::collection::vec(prop::collection::vec(0u32..3, 2), 1..3),
        coeffs in prop::collection::vec(-2i64..=2, 6),
    ) {
        let (m, loc) = module_and_localization(&entries, &coeffs);
        let (cv, cw) = (is_projective_fp(&m), is_projective_fp(&loc));
        prop_assert!(cv.recheck() && cw.recheck());
        if cv.is_projective() {
            prop_assert!(cw.is_projective());
            prop_assert_eq!(cv.rank(), cw.rank());
        }
    }

    #[test]
    fn fitting_ideals_commute_with_localization(
        entries in prop::collection::vec(prop::collection::vec(0u32..3, 2), 1..3),
        coeffs in prop::collection::vec(-2i64..=2, 6),
    ) {
        let (m, loc) = module_and_localization(&entries, &coeffs);
        let h = chart_hom(m.ring(), loc.ring()).unwrap();
        let (fv, fw) = (fitting_ideals(&m), fitting_ideals(&loc));
        prop_assert_eq!(fv.len(), fw.len());
        for (a, b) in fv.iter().zip(&fw) {
            let images: Vec<Poly> = a.minors.iter().map(|p| h.apply(p)).collect();
            let pushed = FittingIdeal { index: a.index, ring: loc.ring().clone(), minors: images.clone() };
            for p in &images {
                prop_assert!(b.contains(p), "F_{} image not in the localized ideal", a.index);
            }
            for p in &b.minors {
                prop_assert!(pushed.contains(p), "F_{} localized minor not in the image ideal", a.index);
            }
        }
    }

    #[test]
    fn hill_properties_hold_on_random_modules(seed in 0u64..10_000, p in prop::sample::select(vec![2u32, 3])) {
        let m = random_filtered_module(p, 4, 5, seed);
        let l = build_hill_family(&m).unwrap();
        let r = verify_hill_properties(&l);
        prop_assert!(r.passes(), "{:?}", r);
    }
}

/// A module over `k[z1]` (the chart `{0}` of `P^1`) and its localization to `{0,1}`.
fn module_and_localization(entries: &[Vec<u32>], coeffs: &[i64]) -> (PresentedModule, PresentedModule) {
    let v = Arc::new(ChartRing::new(Q, 1, Vertex::singleton(0), &[]).unwrap());
    let w = Arc::new(ChartRing::new(Q, 1, Vertex::from_indices(&[0, 1]), &[]).unwrap());
    let z = v.poly_ring().var(0);
    let rels: Vec<Vec<Poly>> = entries
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, d)| {
                    z.pow(*d, Q)
                        .scale(&Q.from_i64(coeffs[(2 * i + j) % coeffs.len()]))
                        .add(&v.poly_ring().constant(coeffs[(i + j + 1) % coeffs.len()]))
                })
                .collect()
        })
        .collect();
    let m = PresentedModule::new(v.clone(), 2, rels).unwrap();
    let h = chart_hom(&v, &w).unwrap();
    let loc = localize_module(&m, &h).unwrap();
    (m, loc)
}

#[test]
fn structure_sheaf_squares_commute() {
    for n in 1..=3 {
        let q = Arc::new(build_proj_quiver(Q, n, &[]).unwrap());
        assert!(structure_sheaf(&q).validate().is_ok());
    }
}
