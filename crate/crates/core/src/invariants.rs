//! Seeded randomized checks of the algebra engine against the brute-force routines in
//! [`crate::oracle`]. Each check returns a report instead of panicking so that the
//! command line front end can print it.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charts::{chart_hom, ChartRing, Vertex};
use crate::field::Field;
use crate::groebner::{FreeModElem, GroebnerBasis, TermOrder};
use crate::module::PresentedModule;
use crate::oracle;
use crate::poly::{Monomial, Poly, PolyRing};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl InvariantReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_poly(rng: &mut ChaCha8Rng, ring: &PolyRing, max_deg: u32, max_terms: usize) -> Poly {
    let n = ring.nvars();
    let monos = oracle::monomials_up_to(n, max_deg);
    let mut p = ring.zero();
    for _ in 0..rng.gen_range(1..=max_terms) {
        let m: &Monomial = &monos[rng.gen_range(0..monos.len())];
        let c = ring.field.from_i64(rng.gen_range(-3..=3));
        p.add_term(m.clone(), c);
    }
    p
}

fn random_elem(rng: &mut ChaCha8Rng, ring: &PolyRing, rank: usize, max_deg: u32) -> FreeModElem {
    (0..rank)
        .map(|_| {
            if rng.gen_bool(0.3) {
                ring.zero()
            } else {
                random_poly(rng, ring, max_deg, 3)
            }
        })
        .collect()
}

fn field_for(case: usize) -> Field {
    if case.is_multiple_of(2) {
        Field::Rationals
    } else {
        Field::Prime(7)
    }
}

/// The reduced basis of a reduced basis is itself; every generator reduces to zero;
/// the result agrees with an unoptimized Buchberger run in both directions; a second
/// run returns the same basis.
pub fn groebner_idempotence(seed: u64, cases: usize) -> InvariantReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for case in 0..cases {
        let ring = PolyRing::with_standard_names(field_for(case), rng.gen_range(2..=3));
        let rank = rng.gen_range(1..=2);
        let gens: Vec<FreeModElem> = (0..rng.gen_range(1..=3))
            .map(|_| random_elem(&mut rng, &ring, rank, 2))
            .collect();
        let order = TermOrder::default();
        let gb = GroebnerBasis::compute(&ring, rank, &gens, order).expect("valid generators");
        let elems = gb.elements();
        let again = GroebnerBasis::compute(&ring, rank, &elems, order).expect("valid basis");
        if again.elements() != elems {
            failures.push(format!("case {case}: basis is not a fixed point"));
        }
        if GroebnerBasis::compute(&ring, rank, &gens, order).expect("valid").elements() != elems {
            failures.push(format!("case {case}: two runs differ"));
        }
        if let Some(g) = gens.iter().find(|g| !gb.contains(g)) {
            failures.push(format!("case {case}: generator {g:?} not in its own span"));
        }
        let naive = oracle::naive_groebner(&gens);
        let naive_zero = |v: &[Poly]| oracle::naive_reduce(v, &naive).iter().all(Poly::is_zero);
        if !elems.iter().all(|e| naive_zero(e)) || !naive.iter().all(|e| gb.contains(e)) {
            failures.push(format!("case {case}: disagrees with the unoptimized basis"));
        }
    }
    InvariantReport {
        name: "groebner idempotence",
        cases,
        failures,
    }
}

/// Every computed syzygy is a syzygy, and every syzygy with entries of degree at most
/// `d` (found by linear algebra) lies in the span of the computed ones.
pub fn syzygy_completeness(seed: u64, cases: usize, d: u32) -> InvariantReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
    let mut failures = Vec::new();
    for case in 0..cases {
        let ring = PolyRing::with_standard_names(field_for(case), rng.gen_range(2..=3));
        let rank = rng.gen_range(1..=2);
        let gens: Vec<FreeModElem> = (0..rng.gen_range(2..=3))
            .map(|_| random_elem(&mut rng, &ring, rank, 2))
            .collect();
        let syz = crate::groebner::syzygies(&ring, rank, &gens).expect("valid generators");
        let m = gens.len();
        let is_syzygy = |c: &[Poly]| {
            (0..rank).all(|pos| {
                c.iter()
                    .zip(&gens)
                    .fold(ring.zero(), |acc, (ci, g)| acc.add(&ci.mul(&g[pos])))
                    .is_zero()
            })
        };
        if !syz.rows.iter().all(|s| is_syzygy(s)) {
            failures.push(format!("case {case}: computed element is not a syzygy"));
        }
        let span = GroebnerBasis::compute(&ring, m, &syz.rows, TermOrder::default())
            .expect("syzygies have the right length");
        let bounded = oracle::bounded_syzygies(&ring, rank, &gens, d);
        if let Some(missing) = bounded.iter().find(|s| !span.contains(s)) {
            failures.push(format!("case {case}: degree <= {d} syzygy {missing:?} missed"));
        }
    }
    InvariantReport {
        name: "syzygy completeness",
        cases,
        failures,
    }
}

/// Localization commutes with kernels: for charts `v ⊆ w` and a matrix `f` over
/// `R(v)`, the image of `ker f` spans `ker(f ⊗ R(w))`.
pub fn localization_exactness(seed: u64, cases: usize) -> InvariantReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
    let mut failures = Vec::new();
    for case in 0..cases {
        let field = field_for(case);
        let n = rng.gen_range(1..=2);
        let full = (1u32 << (n + 1)) - 1;
        let w_mask = loop {
            let m = rng.gen_range(1..=full);
            if m.count_ones() >= 2 {
                break m;
            }
        };
        let bits: Vec<usize> = (0..=n).filter(|i| w_mask >> i & 1 == 1).collect();
        let v = Vertex::singleton(bits[rng.gen_range(0..bits.len())]);
        let w = Vertex(w_mask);
        let rv = Arc::new(ChartRing::new(field, n, v, &[]).expect("valid chart"));
        let rw = Arc::new(ChartRing::new(field, n, w, &[]).expect("valid chart"));
        let h = chart_hom(&rv, &rw).expect("v is contained in w");
        let (k, s) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
        let rows: Vec<FreeModElem> = (0..k)
            .map(|_| {
                let e = random_elem(&mut rng, rv.poly_ring(), s, 1);
                rv.reduce_vec(&e)
            })
            .collect();
        let ker_v = PresentedModule::free(rv.clone(), s).kernel_of_map(&rows);
        let local_rows: Vec<FreeModElem> = rows.iter().map(|r| h.apply_vec(r)).collect();
        let ker_w = PresentedModule::free(rw.clone(), s).kernel_of_map(&local_rows);
        let pushed: Vec<FreeModElem> = ker_v.iter().map(|r| h.apply_vec(r)).collect();
        if !PresentedModule::free(rw.clone(), k).same_span(&pushed, &ker_w) {
            failures.push(format!("case {case}: kernels differ on {v} -> {w}"));
        }
    }
    InvariantReport {
        name: "localization exactness",
        cases,
        failures,
    }
}

/// The suite run by `selftest`.
pub fn run_all(seed: u64) -> Vec<InvariantReport> {
    vec![
        groebner_idempotence(seed, 24),
        syzygy_completeness(seed, 16, 3),
        localization_exactness(seed, 16),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_default_seed() {
        for r in run_all(DEFAULT_SEED) {
            assert!(r.passes(), "{}: {:?}", r.name, r.failures);
        }
    }

    #[test]
    fn suite_is_deterministic() {
        assert_eq!(syzygy_completeness(3, 4, 2), syzygy_completeness(3, 4, 2));
    }
}
