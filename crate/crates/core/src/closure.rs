//! Quasi-coherent closure of a finite set of sections inside a quasi-coherent
//! representation: single-edge closure by lifting through the edge map, and the
//! round-robin schedule over all edges with a stabilization test after each cycle.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groebner::{FreeModElem, PresMatrix};
use crate::matrix::{is_zero_vec, scale_vec};
use crate::module::PresentedModule;
use crate::sheaf::{check_edge, is_quasi_coherent, Edge, SheafRep};

/// Per-vertex finite lists of elements, indexed like the quiver's vertices.
pub type SectionSet = Vec<Vec<FreeModElem>>;

/// How a target section is pulled back to the source of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WitnessMode {
    /// Witnesses are the source generators whose lifted coefficient is nonzero.
    #[default]
    Generators,
    /// Witnesses are `a_i e_i` where `h(a_i) = s_i r_i` for the lifted coefficient
    /// `r_i` and a unit `s_i` built from the smallest powers of the coordinates
    /// inverted along the edge.
    ClearedElement,
}

/// `t = sum_i coeffs[i] * f(ys[i])` over the target chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub section: FreeModElem,
    pub ys: Vec<FreeModElem>,
    pub coeffs: Vec<crate::poly::Poly>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeClosure {
    pub source_gens: Vec<FreeModElem>,
    pub target_gens: Vec<FreeModElem>,
    pub witnesses: Vec<Witness>,
}

fn push_new(m: &PresentedModule, list: &mut Vec<FreeModElem>, x: FreeModElem) -> bool {
    if m.is_zero_elem(&x) || (!list.is_empty() && m.span_contains(list, &x)) {
        return false;
    }
    list.push(x);
    true
}

/// Closes `(xv, xw)` along edge `e`: the returned target generators span exactly the
/// image of the returned source generators.
pub fn edge_closure(
    rep: &SheafRep,
    e: usize,
    xv: &[FreeModElem],
    xw: &[FreeModElem],
    mode: WitnessMode,
) -> Result<EdgeClosure> {
    let check = check_edge(rep, e)?;
    if !check.passes() {
        return Err(Error::Precondition(format!(
            "edge {} of the ambient is not an isomorphism",
            check.edge
        )));
    }
    edge_closure_unchecked(rep, e, xv, xw, mode)
}

fn edge_closure_unchecked(
    rep: &SheafRep,
    e: usize,
    xv: &[FreeModElem],
    xw: &[FreeModElem],
    mode: WitnessMode,
) -> Result<EdgeClosure> {
    let q = rep.quiver();
    let (s, t) = q.endpoints(e);
    let (ms, mt) = (rep.module(s), rep.module(t));
    let f = rep.edge_map(e);
    let hom = q.hom(e);
    let mut source_gens = xv.to_vec();
    let mut witnesses = Vec::new();
    for x in xw {
        mt.check_elem(x)?;
        let r = mt.lift(x, &f.rows).ok_or_else(|| {
            Error::Internal(format!("section not in the image along {}", q.edges()[e]))
        })?;
        let mut ys = Vec::new();
        let mut coeffs = Vec::new();
        for (i, ri) in r.iter().enumerate() {
            if ri.is_zero() {
                continue;
            }
            match mode {
                WitnessMode::Generators => {
                    ys.push(ms.generator(i));
                    coeffs.push(ri.clone());
                }
                WitnessMode::ClearedElement => {
                    let (unit, a) = hom.clear_denominators(ri);
                    let inv = q.ring(t).reduce(
                        &unit_inverse(q.ring(t), &unit).expect("cleared factor is a unit"),
                    );
                    ys.push(scale_vec(&a, &ms.generator(i)));
                    coeffs.push(inv);
                }
            }
        }
        for y in &ys {
            if !source_gens.contains(y) {
                source_gens.push(y.clone());
            }
        }
        witnesses.push(Witness {
            section: x.clone(),
            ys,
            coeffs,
        });
    }
    let mut target_gens = xw.to_vec();
    for g in &source_gens {
        let img = rep.push(e, g);
        if !is_zero_vec(&img) && !target_gens.contains(&img) {
            target_gens.push(img);
        }
    }
    Ok(EdgeClosure {
        source_gens,
        target_gens,
        witnesses,
    })
}

/// Inverse of a Laurent monomial unit in a chart ring.
fn unit_inverse(
    ring: &crate::charts::ChartRing,
    s: &crate::poly::Poly,
) -> Option<crate::poly::Poly> {
    let (m, c) = s.leading_term()?;
    if s.terms().count() != 1 {
        return None;
    }
    let e: Vec<i64> = ring.laurent_exponents(m).iter().map(|x| -x).collect();
    Some(ring.laurent_monomial(&e)?.scale(&c.inv()))
}

/// A sub-representation given by generators inside an ambient representation.
#[derive(Clone, Debug)]
pub struct SubRep {
    pub ambient: Arc<SheafRep>,
    pub gens: SectionSet,
    pub seed: SectionSet,
}

impl SubRep {
    /// The full ambient, generated by the ambient generators everywhere.
    pub fn full(ambient: Arc<SheafRep>) -> SubRep {
        let gens: SectionSet = ambient
            .modules()
            .iter()
            .map(|m| (0..m.ngens()).map(|i| m.generator(i)).collect())
            .collect();
        let seed = vec![Vec::new(); gens.len()];
        SubRep { ambient, gens, seed }
    }

    /// Presentation of the generated submodules with edge maps obtained by lifting.
    /// Fails when some edge image leaves the target span.
    pub fn induced_rep(&self) -> Result<SheafRep> {
        let amb = &self.ambient;
        let q = amb.quiver().clone();
        let modules = (0..q.vertices().len())
            .map(|v| {
                let rels = amb.module(v).kernel_of_map(&self.gens[v]);
                PresentedModule::new(q.ring(v).clone(), self.gens[v].len(), rels)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut maps = Vec::new();
        for e in 0..q.edges().len() {
            let (s, t) = q.endpoints(e);
            let mut rows = Vec::new();
            for g in &self.gens[s] {
                let img = amb.push(e, g);
                let c = amb.module(t).lift(&img, &self.gens[t]).ok_or_else(|| {
                    Error::MalformedRep(format!("edge {} leaves the submodule", q.edges()[e]))
                })?;
                rows.push(c);
            }
            maps.push(PresMatrix::new(self.gens[t].len(), rows));
        }
        SheafRep::new(q, modules, maps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubRepReport {
    pub contains_seed: bool,
    pub edge_closed: bool,
    pub quasi_coherent: bool,
    /// Human-readable reasons for each failed check.
    pub failures: Vec<String>,
}

impl SubRepReport {
    pub fn passes(&self) -> bool {
        self.contains_seed && self.edge_closed && self.quasi_coherent
    }
}

pub fn verify_subrep(s: &SubRep) -> SubRepReport {
    let amb = &s.ambient;
    let q = amb.quiver();
    let mut failures = Vec::new();
    let mut contains_seed = true;
    for (v, xs) in s.seed.iter().enumerate() {
        for x in xs {
            if !amb.module(v).span_contains(&s.gens[v], x) {
                contains_seed = false;
                failures.push(format!("seed section at {} not generated", q.vertices()[v]));
            }
        }
    }
    let mut edge_closed = true;
    for e in 0..q.edges().len() {
        let (src, tgt) = q.endpoints(e);
        for g in &s.gens[src] {
            if !amb.module(tgt).span_contains(&s.gens[tgt], &amb.push(e, g)) {
                edge_closed = false;
                failures.push(format!("edge {} leaves the submodule", q.edges()[e]));
                break;
            }
        }
    }
    let quasi_coherent = edge_closed
        && match s.induced_rep().and_then(|r| is_quasi_coherent(&r)) {
            Ok(report) => {
                for c in report.failures() {
                    failures.push(format!(
                        "induced edge {} surjective={} injective={}",
                        c.edge, c.surjective, c.injective
                    ));
                }
                report.is_quasi_coherent()
            }
            Err(err) => {
                failures.push(err.to_string());
                false
            }
        };
    SubRepReport {
        contains_seed,
        edge_closed,
        quasi_coherent,
        failures,
    }
}

#[derive(Clone, Debug)]
pub enum ClosureOutcome {
    Stabilized {
        sub: SubRep,
        cycles: usize,
        /// Generator counts per vertex after each cycle.
        trace: Vec<Vec<usize>>,
    },
    NotStabilized {
        cycles: usize,
        trace: Vec<Vec<usize>>,
        partial: SubRep,
    },
}

impl ClosureOutcome {
    pub fn is_stabilized(&self) -> bool {
        matches!(self, ClosureOutcome::Stabilized { .. })
    }

    pub fn sub(&self) -> &SubRep {
        match self {
            ClosureOutcome::Stabilized { sub, .. } => sub,
            ClosureOutcome::NotStabilized { partial, .. } => partial,
        }
    }

    pub fn trace(&self) -> &[Vec<usize>] {
        match self {
            ClosureOutcome::Stabilized { trace, .. } | ClosureOutcome::NotStabilized { trace, .. } => {
                trace
            }
        }
    }
}

/// Closes all current generators under every ambient edge map. Edges are ordered by
/// source size, so one pass reaches every vertex.
fn propagate(amb: &SheafRep, gens: &mut SectionSet) {
    let q = amb.quiver();
    for e in 0..q.edges().len() {
        let (s, t) = q.endpoints(e);
        let imgs: Vec<FreeModElem> = gens[s].iter().map(|g| amb.push(e, g)).collect();
        for img in imgs {
            push_new(amb.module(t), &mut gens[t], img);
        }
    }
}

pub fn qc_closure(
    ambient: Arc<SheafRep>,
    seed: &SectionSet,
    max_cycles: usize,
    mode: WitnessMode,
) -> Result<ClosureOutcome> {
    if max_cycles == 0 {
        return Err(Error::Precondition("cycle budget must be positive".into()));
    }
    let q = ambient.quiver().clone();
    let nv = q.vertices().len();
    if seed.len() != nv {
        return Err(Error::DimensionMismatch(format!(
            "section set has {} vertices, quiver has {nv}",
            seed.len()
        )));
    }
    let report = is_quasi_coherent(&ambient)?;
    if let Some(c) = report.failures().first() {
        return Err(Error::Precondition(format!(
            "ambient edge {} is not an isomorphism",
            c.edge
        )));
    }
    let mut gens: SectionSet = vec![Vec::new(); nv];
    for (v, xs) in seed.iter().enumerate() {
        for x in xs {
            ambient.module(v).check_elem(x)?;
            push_new(ambient.module(v), &mut gens[v], x.clone());
        }
    }
    let mut trace = Vec::new();
    for cycle in 1..=max_cycles {
        let before: Vec<_> = (0..nv)
            .map(|v| ambient.module(v).span_basis(&gens[v]).elements())
            .collect();
        for e in 0..q.edges().len() {
            let (s, t) = q.endpoints(e);
            let ec = edge_closure_unchecked(&ambient, e, &gens[s], &gens[t], mode)?;
            for y in ec.source_gens {
                push_new(ambient.module(s), &mut gens[s], y);
            }
            for y in ec.target_gens {
                push_new(ambient.module(t), &mut gens[t], y);
            }
            propagate(&ambient, &mut gens);
        }
        trace.push(gens.iter().map(Vec::len).collect());
        let unchanged = (0..nv).all(|v| ambient.module(v).span_basis(&gens[v]).elements() == before[v]);
        let sub = SubRep {
            ambient: ambient.clone(),
            gens: gens.clone(),
            seed: seed.clone(),
        };
        if unchanged {
            let induced = sub.induced_rep()?;
            if is_quasi_coherent(&induced)?.is_quasi_coherent() {
                return Ok(ClosureOutcome::Stabilized {
                    sub,
                    cycles: cycle,
                    trace,
                });
            }
        }
        if cycle == max_cycles {
            return Ok(ClosureOutcome::NotStabilized {
                cycles: cycle,
                trace,
                partial: sub,
            });
        }
    }
    unreachable!("loop returns on the last cycle")
}

/// Edges whose induced map fails to be surjective for the given generators.
pub fn non_surjective_edges(s: &SubRep) -> Vec<Edge> {
    let amb = &s.ambient;
    let q = amb.quiver();
    (0..q.edges().len())
        .filter(|&e| {
            let (src, tgt) = q.endpoints(e);
            let imgs: Vec<FreeModElem> = s.gens[src].iter().map(|g| amb.push(e, g)).collect();
            s.gens[tgt]
                .iter()
                .any(|g| !amb.module(tgt).span_contains(&imgs, g))
        })
        .map(|e| q.edges()[e])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::Vertex;
    use crate::field::Field;
    use crate::sheaf::{build_proj_quiver, direct_sum, structure_sheaf, twist, ProjQuiver};

    fn p1() -> Arc<ProjQuiver> {
        Arc::new(build_proj_quiver(Field::Rationals, 1, &[]).unwrap())
    }

    fn empty(q: &ProjQuiver) -> SectionSet {
        vec![Vec::new(); q.vertices().len()]
    }

    #[test]
    fn empty_edge_closure() {
        let q = p1();
        let o = structure_sheaf(&q);
        let ec = edge_closure(&o, 0, &[], &[], WitnessMode::Generators).unwrap();
        assert!(ec.source_gens.is_empty() && ec.target_gens.is_empty());
    }

    #[test]
    fn structure_sheaf_edge_closure() {
        let q = p1();
        let o = structure_sheaf(&q);
        let w = q.vertex_index(Vertex::from_indices(&[0, 1])).unwrap();
        let one = o.module(w).generator(0);
        let ec = edge_closure(&o, 0, &[], std::slice::from_ref(&one), WitnessMode::Generators).unwrap();
        assert_eq!(ec.source_gens, vec![o.module(0).generator(0)]);
        assert_eq!(ec.target_gens, vec![one]);
    }

    #[test]
    fn twist_witness_coefficient() {
        let q = p1();
        let o1 = twist(&q, 1);
        let e = q.edge_index(Vertex::singleton(1), Vertex::from_indices(&[0, 1])).unwrap();
        let w = q.vertex_index(Vertex::from_indices(&[0, 1])).unwrap();
        let t = o1.module(w).generator(0);
        let ec = edge_closure(&o1, e, &[], &[t], WitnessMode::Generators).unwrap();
        let wit = &ec.witnesses[0];
        assert_eq!(wit.ys, vec![o1.module(1).generator(0)]);
        assert_eq!(wit.coeffs, vec![q.ring(w).u(1).unwrap()]);
        let ec = edge_closure(&o1, e, &[], &ec.target_gens, WitnessMode::ClearedElement).unwrap();
        assert!(ec.witnesses.iter().all(|w| !w.ys.is_empty()));
    }

    #[test]
    fn empty_seed_stabilizes_immediately() {
        let q = p1();
        let out = qc_closure(Arc::new(structure_sheaf(&q)), &empty(&q), 3, WitnessMode::Generators).unwrap();
        match out {
            ClosureOutcome::Stabilized { cycles, sub, .. } => {
                assert_eq!(cycles, 1);
                assert!(sub.gens.iter().all(Vec::is_empty));
            }
            _ => panic!("did not stabilize"),
        }
    }

    #[test]
    fn closure_of_one_is_everything() {
        let q = p1();
        let o = Arc::new(structure_sheaf(&q));
        let mut seed = empty(&q);
        seed[0].push(o.module(0).generator(0));
        let out = qc_closure(o.clone(), &seed, 4, WitnessMode::Generators).unwrap();
        let ClosureOutcome::Stabilized { sub, cycles, .. } = out else {
            panic!("did not stabilize")
        };
        assert!(cycles <= 2);
        for v in 0..3 {
            assert!(o.module(v).span_contains(&sub.gens[v], &o.module(v).generator(0)));
        }
        assert!(verify_subrep(&sub).passes());
    }

    #[test]
    fn closure_stays_in_summand() {
        let q = p1();
        let amb = Arc::new(direct_sum(&twist(&q, 1), &structure_sheaf(&q)).unwrap());
        let w = q.vertex_index(Vertex::from_indices(&[0, 1])).unwrap();
        for mode in [WitnessMode::Generators, WitnessMode::ClearedElement] {
            let mut seed = empty(&q);
            seed[w].push(amb.module(w).generator(0));
            let out = qc_closure(amb.clone(), &seed, 5, mode).unwrap();
            let sub = out.sub();
            assert!(out.is_stabilized());
            for v in 0..3 {
                assert!(sub.gens[v].iter().all(|g| g[1].is_zero()));
                let full = amb.module(v).span_contains(&sub.gens[v], &amb.module(v).generator(0));
                // cleared witnesses at {1} give x0 * e, the copy of O inside O(1)
                assert!(full || (mode == WitnessMode::ClearedElement && v == 1));
            }
            assert!(verify_subrep(sub).passes());
        }
    }

    #[test]
    fn truncated_subrep_fails() {
        let q = p1();
        let o = Arc::new(structure_sheaf(&q));
        let mut s = SubRep::full(o.clone());
        assert!(verify_subrep(&s).passes());
        s.gens[2].clear();
        let r = verify_subrep(&s);
        assert!(!r.passes());
        assert!(!r.edge_closed);
    }

    #[test]
    fn non_qc_ambient_rejected() {
        let q = p1();
        let o = structure_sheaf(&q);
        let bad = o
            .with_edge_map(0, crate::matrix::zero_matrix(1, 1, q.ring(2).nvars()))
            .unwrap();
        assert!(matches!(
            qc_closure(Arc::new(bad), &empty(&q), 2, WitnessMode::Generators),
            Err(Error::Precondition(_))
        ));
    }
}
