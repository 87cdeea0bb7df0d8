//! Representations of the chart quiver of a closed subscheme of `P^n`.
//!
//! Vertices are the nonempty subsets of `{0..n}`, generating edges are `v -> v ∪ {k}`.
//! A [`SheafRep`] stores a presented module per vertex and, per generating edge, a
//! matrix over the target chart whose row `i` is the image of generator `i` of `M(v)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::charts::{ambient_ring, chart_hom, ChartHom, ChartRing, Vertex};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::groebner::{FreeModElem, PresMatrix};
use crate::matrix::{block_diag, identity, sub_vec, unit_vec, vec_mul, zero_vec};
use crate::module::PresentedModule;
use crate::poly::Poly;

/// Largest `n` accepted by [`build_proj_quiver`] unless a bound is passed explicitly.
pub const DEFAULT_MAX_N: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: Vertex,
    pub target: Vertex,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.source, self.target)
    }
}

/// A commuting square `v -> v+k -> v+k+l`, `v -> v+l -> v+k+l`, by edge indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Square {
    pub first: (usize, usize),
    pub second: (usize, usize),
}

#[derive(Debug)]
pub struct ProjQuiver {
    field: Field,
    n: usize,
    ideal: Vec<Poly>,
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    rings: Vec<Arc<ChartRing>>,
    edges: Vec<Edge>,
    edge_index: HashMap<Edge, usize>,
    homs: Vec<ChartHom>,
    squares: Vec<Square>,
}

impl PartialEq for ProjQuiver {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.n == other.n && self.ideal == other.ideal
    }
}

pub fn build_proj_quiver(field: Field, n: usize, homogeneous_ideal: &[Poly]) -> Result<ProjQuiver> {
    build_proj_quiver_bounded(field, n, homogeneous_ideal, DEFAULT_MAX_N)
}

pub fn build_proj_quiver_bounded(
    field: Field,
    n: usize,
    homogeneous_ideal: &[Poly],
    bound: usize,
) -> Result<ProjQuiver> {
    if n > bound {
        return Err(Error::QuiverTooLarge { n, bound });
    }
    if n == 0 {
        return Err(Error::Precondition("projective space of dimension 0".into()));
    }
    let mut vertices: Vec<Vertex> = (1u32..(1u32 << (n + 1))).map(Vertex).collect();
    vertices.sort_by_key(|v| (v.len(), v.0));
    let index: HashMap<Vertex, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let rings = vertices
        .iter()
        .map(|v| ChartRing::new(field, n, *v, homogeneous_ideal).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    let mut edges = Vec::new();
    let mut homs = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        for k in 0..=n {
            if !v.contains(k) {
                let w = v.with(k);
                homs.push(chart_hom(&rings[i], &rings[index[&w]])?);
                edges.push(Edge {
                    source: *v,
                    target: w,
                });
            }
        }
    }
    let edge_index: HashMap<Edge, usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut squares = Vec::new();
    for v in &vertices {
        for k in 0..=n {
            for l in (k + 1)..=n {
                if v.contains(k) || v.contains(l) {
                    continue;
                }
                let (vk, vl, u) = (v.with(k), v.with(l), v.with(k).with(l));
                let e = |s: Vertex, t: Vertex| edge_index[&Edge { source: s, target: t }];
                squares.push(Square {
                    first: (e(*v, vk), e(vk, u)),
                    second: (e(*v, vl), e(vl, u)),
                });
            }
        }
    }
    let q = ProjQuiver {
        field,
        n,
        ideal: homogeneous_ideal.to_vec(),
        vertices,
        index,
        rings,
        edges,
        edge_index,
        homs,
        squares,
    };
    q.check_coherence()?;
    Ok(q)
}

impl ProjQuiver {
    fn check_coherence(&self) -> Result<()> {
        for sq in &self.squares {
            for (a, b) in [sq.first, sq.second] {
                let composite = self.homs[a].then(&self.homs[b])?;
                let src = self.index[&self.edges[a].source];
                let tgt = self.index[&self.edges[b].target];
                let direct = chart_hom(&self.rings[src], &self.rings[tgt])?;
                if !composite.agrees_with(&direct) {
                    return Err(Error::IncompatibleCharts(format!(
                        "composite {} then {} differs from the direct localization",
                        self.edges[a], self.edges[b]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ideal(&self) -> &[Poly] {
        &self.ideal
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_index(&self, v: Vertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, source: Vertex, target: Vertex) -> Option<usize> {
        self.edge_index.get(&Edge { source, target }).copied()
    }

    /// Vertex indices of the endpoints of edge `e`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let edge = self.edges[e];
        (self.index[&edge.source], self.index[&edge.target])
    }

    pub fn ring(&self, i: usize) -> &Arc<ChartRing> {
        &self.rings[i]
    }

    pub fn ring_of(&self, v: Vertex) -> Option<&Arc<ChartRing>> {
        self.vertex_index(v).map(|i| &self.rings[i])
    }

    pub fn hom(&self, e: usize) -> &ChartHom {
        &self.homs[e]
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    /// Indices of the singleton vertices `{0}, .., {n}`.
    pub fn basic_vertices(&self) -> Vec<usize> {
        (0..=self.n).map(|i| self.index[&Vertex::singleton(i)]).collect()
    }

    pub fn ambient(&self) -> crate::poly::PolyRing {
        ambient_ring(self.field, self.n)
    }
}

#[derive(Clone, Debug)]
pub struct SheafRep {
    quiver: Arc<ProjQuiver>,
    modules: Vec<PresentedModule>,
    maps: Vec<PresMatrix>,
}

/// Image of a generator row under an edge: `h(x) * F`, reduced modulo the target ring.
fn push_along(hom: &ChartHom, f: &PresMatrix, x: &[Poly]) -> FreeModElem {
    let t = &hom.target;
    t.reduce_vec(&vec_mul(&hom.apply_vec(x), f, t.nvars()))
}

impl SheafRep {
    /// Builds and validates a representation.
    pub fn new(
        quiver: Arc<ProjQuiver>,
        modules: Vec<PresentedModule>,
        maps: Vec<PresMatrix>,
    ) -> Result<SheafRep> {
        let rep = SheafRep::new_unchecked(quiver, modules, maps)?;
        rep.validate()?;
        Ok(rep)
    }

    /// Checks only shapes and rings; well-definedness and commutativity are left to
    /// [`SheafRep::validate`].
    pub fn new_unchecked(
        quiver: Arc<ProjQuiver>,
        modules: Vec<PresentedModule>,
        maps: Vec<PresMatrix>,
    ) -> Result<SheafRep> {
        if modules.len() != quiver.vertices.len() || maps.len() != quiver.edges.len() {
            return Err(Error::MalformedRep(format!(
                "{} modules and {} edge maps for {} vertices and {} edges",
                modules.len(),
                maps.len(),
                quiver.vertices.len(),
                quiver.edges.len()
            )));
        }
        for (i, m) in modules.iter().enumerate() {
            if **m.ring() != *quiver.rings[i] {
                return Err(Error::MalformedRep(format!(
                    "module at {} is over the wrong chart",
                    quiver.vertices[i]
                )));
            }
        }
        let mut maps = maps;
        for (e, f) in maps.iter_mut().enumerate() {
            let (s, t) = quiver.endpoints(e);
            let edge = quiver.edges[e];
            if f.nrows() != modules[s].ngens() || f.ncols != modules[t].ngens() {
                return Err(Error::MalformedRep(format!(
                    "edge {edge}: matrix is {}x{}, expected {}x{}",
                    f.nrows(),
                    f.ncols,
                    modules[s].ngens(),
                    modules[t].ngens()
                )));
            }
            let ring = &quiver.rings[t];
            for row in f.rows.iter_mut() {
                if row.len() != f.ncols {
                    return Err(Error::MalformedRep(format!("edge {edge}: ragged matrix")));
                }
                for p in row.iter_mut() {
                    ring.check(p)
                        .map_err(|err| Error::MalformedRep(format!("edge {edge}: {err}")))?;
                    *p = ring.reduce(p);
                }
            }
        }
        Ok(SheafRep {
            quiver,
            modules,
            maps,
        })
    }

    /// Well-definedness of every edge map and commutativity of every square.
    pub fn validate(&self) -> Result<()> {
        let q = &self.quiver;
        for e in 0..q.edges.len() {
            let (s, t) = q.endpoints(e);
            for r in self.modules[s].relations() {
                let img = push_along(&q.homs[e], &self.maps[e], r);
                if !self.modules[t].is_zero_elem(&img) {
                    return Err(Error::MalformedRep(format!(
                        "edge {}: a relation of the source is not sent to zero",
                        q.edges[e]
                    )));
                }
            }
        }
        for sq in &q.squares {
            let (s, _) = q.endpoints(sq.first.0);
            let (_, t) = q.endpoints(sq.first.1);
            for i in 0..self.modules[s].ngens() {
                let g = self.modules[s].generator(i);
                let a = self.compose(sq.first, &g);
                let b = self.compose(sq.second, &g);
                if !self.modules[t].is_zero_elem(&sub_vec(&a, &b)) {
                    return Err(Error::MalformedRep(format!(
                        "square {} {} vs {} {} does not commute on generator {i}",
                        q.edges[sq.first.0], q.edges[sq.first.1], q.edges[sq.second.0], q.edges[sq.second.1]
                    )));
                }
            }
        }
        Ok(())
    }

    fn compose(&self, path: (usize, usize), x: &[Poly]) -> FreeModElem {
        let y = self.push(path.0, x);
        self.push(path.1, &y)
    }

    /// Image of an element of `M(source)` in `M(target)` along edge `e`.
    pub fn push(&self, e: usize, x: &[Poly]) -> FreeModElem {
        push_along(&self.quiver.homs[e], &self.maps[e], x)
    }

    pub fn quiver(&self) -> &Arc<ProjQuiver> {
        &self.quiver
    }

    pub fn module(&self, i: usize) -> &PresentedModule {
        &self.modules[i]
    }

    pub fn module_at(&self, v: Vertex) -> Option<&PresentedModule> {
        self.quiver.vertex_index(v).map(|i| &self.modules[i])
    }

    pub fn modules(&self) -> &[PresentedModule] {
        &self.modules
    }

    pub fn edge_map(&self, e: usize) -> &PresMatrix {
        &self.maps[e]
    }

    pub fn edge_maps(&self) -> &[PresMatrix] {
        &self.maps
    }

    /// Copy with one edge matrix replaced; the result is not validated.
    pub fn with_edge_map(&self, e: usize, f: PresMatrix) -> Result<SheafRep> {
        let mut maps = self.maps.clone();
        maps[e] = f;
        SheafRep::new_unchecked(self.quiver.clone(), self.modules.clone(), maps)
    }
}

/// Quasi-coherence verdict for one generating edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCheck {
    pub edge: Edge,
    pub surjective: bool,
    pub injective: bool,
}

impl EdgeCheck {
    pub fn passes(&self) -> bool {
        self.surjective && self.injective
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcReport {
    pub edges: Vec<EdgeCheck>,
}

impl QcReport {
    pub fn is_quasi_coherent(&self) -> bool {
        self.edges.iter().all(EdgeCheck::passes)
    }

    pub fn failures(&self) -> Vec<&EdgeCheck> {
        self.edges.iter().filter(|c| !c.passes()).collect()
    }
}

/// Whether the map induced by edge `e` from the localized source module is an
/// isomorphism onto the target module.
pub fn check_edge(rep: &SheafRep, e: usize) -> Result<EdgeCheck> {
    let q = &rep.quiver;
    let (s, t) = q.endpoints(e);
    let target = &rep.modules[t];
    let f = &rep.maps[e];
    let span = target.span_basis(&f.rows);
    let surjective = (0..target.ngens()).all(|j| span.contains(&target.generator(j)));
    let local = crate::charts::localize_module(&rep.modules[s], &q.homs[e])?;
    let kernel = target.kernel_of_map(&f.rows);
    let injective = kernel.iter().all(|k| local.is_zero_elem(k));
    Ok(EdgeCheck {
        edge: q.edges[e],
        surjective,
        injective,
    })
}

/// Per-edge quasi-coherence report. Invariant failures are returned as errors.
pub fn is_quasi_coherent(rep: &SheafRep) -> Result<QcReport> {
    rep.validate()?;
    let edges = (0..rep.quiver.edges.len())
        .into_par_iter()
        .map(|e| check_edge(rep, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(QcReport { edges })
}

pub fn structure_sheaf(q: &Arc<ProjQuiver>) -> SheafRep {
    twist(q, 0)
}

/// `O(k)`: generator at `v` is `x_{pivot(v)}^k`, edge maps `(x_p / x_q)^k`.
pub fn twist(q: &Arc<ProjQuiver>, k: i64) -> SheafRep {
    let modules = q.rings.iter().map(|r| PresentedModule::free(r.clone(), 1)).collect();
    let maps = (0..q.edges.len())
        .map(|e| {
            let (s, t) = q.endpoints(e);
            let (p, pt) = (q.rings[s].pivot(), q.rings[t].pivot());
            let entry = q.rings[t]
                .ratio_power(p, pt, k)
                .expect("both pivots lie in the target vertex");
            PresMatrix::new(1, vec![vec![entry]])
        })
        .collect();
    SheafRep::new_unchecked(q.clone(), modules, maps).expect("twist has consistent shapes")
}

/// A finitely presented graded module over `k[x_0..x_n]`: generator `j` in degree
/// `degrees[j]`, relation rows homogeneous.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedModule {
    pub degrees: Vec<i64>,
    pub relations: Vec<FreeModElem>,
}

impl GradedModule {
    pub fn free(degrees: Vec<i64>) -> GradedModule {
        GradedModule {
            degrees,
            relations: Vec::new(),
        }
    }

    /// `O(a_1) ⊕ .. ⊕ O(a_r)`.
    pub fn twists(a: &[i64]) -> GradedModule {
        GradedModule::free(a.iter().map(|x| -x).collect())
    }

    pub fn ngens(&self) -> usize {
        self.degrees.len()
    }

    /// Degree of the homogeneous row `r`, or `None` for the zero row.
    pub fn row_degree(&self, r: &[Poly]) -> Result<Option<i64>> {
        row_degree(&self.degrees, r)
    }
}

fn row_degree(degrees: &[i64], r: &[Poly]) -> Result<Option<i64>> {
    let mut deg = None;
    for (p, d) in r.iter().zip(degrees) {
        if p.is_zero() {
            continue;
        }
        if !p.is_homogeneous() {
            return Err(Error::NonHomogeneous("entry of a graded relation".into()));
        }
        let e = p.total_degree().unwrap() as i64 + d;
        match deg {
            None => deg = Some(e),
            Some(x) if x != e => {
                return Err(Error::NonHomogeneous("relation mixes degrees".into()));
            }
            _ => {}
        }
    }
    Ok(deg)
}

/// Sheafification of a graded module on the quiver.
pub fn from_graded(q: &Arc<ProjQuiver>, g: &GradedModule) -> Result<SheafRep> {
    let amb = q.ambient();
    for r in &g.relations {
        if r.len() != g.ngens() {
            return Err(Error::DimensionMismatch("graded relation length".into()));
        }
        for p in r {
            amb.check(p)?;
        }
        g.row_degree(r)?;
    }
    let modules = q
        .rings
        .iter()
        .map(|ring| {
            let rels = g
                .relations
                .iter()
                .map(|r| r.iter().map(|p| ring.dehomogenize(p)).collect())
                .collect();
            PresentedModule::new(ring.clone(), g.ngens(), rels)
        })
        .collect::<Result<Vec<_>>>()?;
    let maps = (0..q.edges.len())
        .map(|e| {
            let (s, t) = q.endpoints(e);
            let ring = &q.rings[t];
            let (p, pt) = (q.rings[s].pivot(), ring.pivot());
            let mut m = identity(g.ngens(), ring.nvars(), q.field);
            for (j, d) in g.degrees.iter().enumerate() {
                // e_j / x_p^d = (x_pt / x_p)^d * e_j / x_pt^d
                m.rows[j][j] = ring.ratio_power(pt, p, *d).expect("pivots in target");
            }
            m
        })
        .collect();
    SheafRep::new(q.clone(), modules, maps)
}

/// Sheafification of a graded map: `matrix` rows are images of the source
/// generators, entry `(i, j)` homogeneous of degree `src.degrees[i] - tgt.degrees[j]`.
pub fn graded_map(
    q: &Arc<ProjQuiver>,
    src: &GradedModule,
    tgt: &GradedModule,
    matrix: &PresMatrix,
) -> Result<SheafMap> {
    let a = Arc::new(from_graded(q, src)?);
    let b = Arc::new(from_graded(q, tgt)?);
    graded_map_between(a, b, src, tgt, matrix)
}

/// As [`graded_map`] with the sheafified modules supplied.
pub fn graded_map_between(
    a: Arc<SheafRep>,
    b: Arc<SheafRep>,
    src: &GradedModule,
    tgt: &GradedModule,
    matrix: &PresMatrix,
) -> Result<SheafMap> {
    let q = a.quiver.clone();
    if matrix.nrows() != src.ngens() || matrix.ncols != tgt.ngens() {
        return Err(Error::DimensionMismatch("graded map shape".into()));
    }
    let amb = q.ambient();
    for (i, row) in matrix.rows.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            amb.check(p)?;
            if !p.is_zero()
                && (!p.is_homogeneous()
                    || p.total_degree().unwrap() as i64 != src.degrees[i] - tgt.degrees[j])
            {
                return Err(Error::NonHomogeneous(format!("graded map entry ({i},{j})")));
            }
        }
    }
    let mats = q
        .rings
        .iter()
        .map(|ring| {
            PresMatrix::new(
                matrix.ncols,
                matrix
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|p| ring.dehomogenize(p)).collect())
                    .collect(),
            )
        })
        .collect();
    SheafMap::new(a, b, mats)
}

/// A morphism of representations: `mats[v]` sends generators of `source(v)` to
/// elements of `target(v)`.
#[derive(Clone, Debug)]
pub struct SheafMap {
    source: Arc<SheafRep>,
    target: Arc<SheafRep>,
    mats: Vec<PresMatrix>,
}

impl SheafMap {
    pub fn new(source: Arc<SheafRep>, target: Arc<SheafRep>, mats: Vec<PresMatrix>) -> Result<SheafMap> {
        let q = &source.quiver;
        if *q.as_ref() != *target.quiver.as_ref() {
            return Err(Error::RingMismatch("maps between different quivers".into()));
        }
        if mats.len() != q.vertices.len() {
            return Err(Error::DimensionMismatch("one matrix per vertex expected".into()));
        }
        let mut mats = mats;
        for (v, m) in mats.iter_mut().enumerate() {
            if m.nrows() != source.modules[v].ngens() || m.ncols != target.modules[v].ngens() {
                return Err(Error::DimensionMismatch(format!(
                    "map at {}: wrong shape",
                    q.vertices[v]
                )));
            }
            let ring = &q.rings[v];
            for row in m.rows.iter_mut() {
                for p in row.iter_mut() {
                    ring.check(p)?;
                    *p = ring.reduce(p);
                }
            }
        }
        let map = SheafMap { source, target, mats };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<()> {
        let q = &self.source.quiver;
        for (v, m) in self.mats.iter().enumerate() {
            for r in self.source.modules[v].relations() {
                let img = vec_mul(r, m, q.rings[v].nvars());
                if !self.target.modules[v].is_zero_elem(&img) {
                    return Err(Error::MalformedRep(format!(
                        "map at {} does not respect relations",
                        q.vertices[v]
                    )));
                }
            }
        }
        for e in 0..q.edges.len() {
            let (s, t) = q.endpoints(e);
            for i in 0..self.source.modules[s].ngens() {
                let g = self.source.modules[s].generator(i);
                let a = self.apply(t, &self.source.push(e, &g));
                let b = self.target.push(e, &self.apply(s, &g));
                if !self.target.modules[t].is_zero_elem(&sub_vec(&a, &b)) {
                    return Err(Error::MalformedRep(format!(
                        "map does not commute with edge {}",
                        q.edges[e]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<SheafRep> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SheafRep> {
        &self.target
    }

    pub fn matrix(&self, v: usize) -> &PresMatrix {
        &self.mats[v]
    }

    /// Image of an element of `source(v)`.
    pub fn apply(&self, v: usize, x: &[Poly]) -> FreeModElem {
        let ring = &self.source.quiver.rings[v];
        ring.reduce_vec(&vec_mul(x, &self.mats[v], ring.nvars()))
    }

    pub fn identity(rep: Arc<SheafRep>) -> SheafMap {
        let q = rep.quiver.clone();
        let mats = (0..q.vertices.len())
            .map(|v| identity(rep.modules[v].ngens(), q.rings[v].nvars(), q.field))
            .collect();
        SheafMap {
            source: rep.clone(),
            target: rep,
            mats,
        }
    }

    pub fn zero(source: Arc<SheafRep>, target: Arc<SheafRep>) -> Result<SheafMap> {
        let q = source.quiver.clone();
        let mats = (0..q.vertices.len())
            .map(|v| {
                PresMatrix::new(
                    target.modules[v].ngens(),
                    vec![zero_vec(target.modules[v].ngens(), q.rings[v].nvars()); source.modules[v].ngens()],
                )
            })
            .collect();
        SheafMap::new(source, target, mats)
    }
}

/// Vertex indices where `phi` fails to be bijective.
pub fn non_isomorphic_vertices(phi: &SheafMap) -> Vec<usize> {
    let q = &phi.source.quiver;
    (0..q.vertices.len())
        .filter(|&v| {
            let (a, b) = (&phi.source.modules[v], &phi.target.modules[v]);
            let rows = &phi.mats[v].rows;
            let span = b.span_basis(rows);
            let surjective = (0..b.ngens()).all(|j| span.contains(&b.generator(j)));
            let injective = b.kernel_of_map(rows).iter().all(|k| a.is_zero_elem(k));
            !(surjective && injective)
        })
        .collect()
}

pub fn is_isomorphism(phi: &SheafMap) -> bool {
    non_isomorphic_vertices(phi).is_empty()
}

pub fn direct_sum(a: &SheafRep, b: &SheafRep) -> Result<SheafRep> {
    if *a.quiver != *b.quiver {
        return Err(Error::RingMismatch("direct sum over different quivers".into()));
    }
    let q = a.quiver.clone();
    let modules = a
        .modules
        .iter()
        .zip(&b.modules)
        .map(|(x, y)| x.direct_sum(y))
        .collect::<Result<Vec<_>>>()?;
    let maps = (0..q.edges.len())
        .map(|e| {
            let (_, t) = q.endpoints(e);
            block_diag(&a.maps[e], &b.maps[e], q.rings[t].nvars())
        })
        .collect();
    SheafRep::new_unchecked(q, modules, maps)
}

/// Kernel with its inclusion into the source.
pub fn kernel_with_inclusion(phi: &SheafMap) -> Result<(SheafRep, SheafMap)> {
    let src = &phi.source;
    let q = src.quiver.clone();
    let gens: Vec<Vec<FreeModElem>> = (0..q.vertices.len())
        .map(|v| {
            let k = phi.target.modules[v].kernel_of_map(&phi.mats[v].rows);
            src.modules[v].prune(&k)
        })
        .collect();
    let modules = (0..q.vertices.len())
        .map(|v| {
            let rels = src.modules[v].kernel_of_map(&gens[v]);
            PresentedModule::new(q.rings[v].clone(), gens[v].len(), rels)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut maps = Vec::with_capacity(q.edges.len());
    for e in 0..q.edges.len() {
        let (s, t) = q.endpoints(e);
        let mut rows = Vec::new();
        for k in &gens[s] {
            let img = src.push(e, k);
            let c = src.modules[t].lift(&img, &gens[t]).ok_or_else(|| {
                Error::Internal(format!("kernel element leaves the kernel along {}", q.edges[e]))
            })?;
            rows.push(c);
        }
        maps.push(PresMatrix::new(gens[t].len(), rows));
    }
    let rep = Arc::new(SheafRep::new_unchecked(q.clone(), modules, maps)?);
    let incl = (0..q.vertices.len())
        .map(|v| PresMatrix::new(src.modules[v].ngens(), gens[v].clone()))
        .collect();
    let incl = SheafMap::new(rep.clone(), src.clone(), incl)?;
    Ok((Arc::unwrap_or_clone(rep), incl))
}

pub fn kernel(phi: &SheafMap) -> Result<SheafRep> {
    kernel_with_inclusion(phi).map(|(k, _)| k)
}

/// Cokernel with its projection from the target.
pub fn cokernel_with_projection(phi: &SheafMap) -> Result<(SheafRep, SheafMap)> {
    let tgt = &phi.target;
    let q = tgt.quiver.clone();
    let modules = (0..q.vertices.len())
        .map(|v| tgt.modules[v].quotient(&phi.mats[v].rows))
        .collect::<Result<Vec<_>>>()?;
    let rep = Arc::new(SheafRep::new_unchecked(q.clone(), modules, tgt.maps.clone())?);
    let proj = (0..q.vertices.len())
        .map(|v| identity(tgt.modules[v].ngens(), q.rings[v].nvars(), q.field))
        .collect();
    let proj = SheafMap::new(tgt.clone(), rep.clone(), proj)?;
    Ok((Arc::unwrap_or_clone(rep), proj))
}

pub fn cokernel(phi: &SheafMap) -> Result<SheafRep> {
    cokernel_with_projection(phi).map(|(c, _)| c)
}

/// The standard basis vector `e_i` of `M(v)`; convenience for callers building elements.
pub fn generator(rep: &SheafRep, v: usize, i: usize) -> FreeModElem {
    let q = &rep.quiver;
    unit_vec(i, rep.modules[v].ngens(), q.rings[v].nvars(), q.field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::zero_matrix;

    fn quiver(n: usize, ideal: &[&str], field: Field) -> Arc<ProjQuiver> {
        let amb = ambient_ring(field, n);
        let ideal: Vec<Poly> = ideal.iter().map(|s| amb.parse(s).unwrap()).collect();
        Arc::new(build_proj_quiver(field, n, &ideal).unwrap())
    }

    fn subsets_oracle(n: usize) -> (usize, usize) {
        let mut verts = 0;
        let mut edges = 0;
        for mask in 1u32..(1 << (n + 1)) {
            verts += 1;
            edges += (n + 1) - mask.count_ones() as usize;
        }
        (verts, edges)
    }

    #[test]
    fn quiver_shapes() {
        let q = quiver(1, &[], Field::Rationals);
        assert_eq!(q.vertices().len(), 3);
        assert_eq!(q.edges().len(), 2);
        for n in 1..=3 {
            let q = quiver(n, &[], Field::Rationals);
            assert_eq!((q.vertices().len(), q.edges().len()), subsets_oracle(n));
        }
        let q = quiver(2, &[], Field::Rationals);
        assert_eq!(q.edges().len(), 9);
        let q = quiver(1, &["x0*x1"], Field::prime(5).unwrap());
        assert_eq!(q.vertices().len(), 3);
        assert!(q.ring_of(Vertex::from_indices(&[0, 1])).unwrap().is_zero_ring());
    }

    #[test]
    fn quiver_bound() {
        let err = build_proj_quiver(Field::Rationals, 5, &[]).unwrap_err();
        assert_eq!(err, Error::QuiverTooLarge { n: 5, bound: 4 });
    }

    #[test]
    fn twist_edge_on_p1() {
        let q = quiver(1, &[], Field::Rationals);
        let o1 = twist(&q, 1);
        let e = q.edge_index(Vertex::singleton(1), Vertex::from_indices(&[0, 1])).unwrap();
        let r = q.ring_of(Vertex::from_indices(&[0, 1])).unwrap();
        assert_eq!(o1.edge_map(e).rows[0][0], r.z(1).unwrap());
        let e0 = q.edge_index(Vertex::singleton(0), Vertex::from_indices(&[0, 1])).unwrap();
        assert!(o1.edge_map(e0).rows[0][0].is_one());
    }

    #[test]
    fn twists_are_quasi_coherent() {
        let q = quiver(1, &[], Field::Rationals);
        for k in -3..=3 {
            assert!(is_quasi_coherent(&twist(&q, k)).unwrap().is_quasi_coherent(), "k = {k}");
        }
        let q = quiver(2, &[], Field::Rationals);
        for k in [-2, 0, 1] {
            assert!(is_quasi_coherent(&twist(&q, k)).unwrap().is_quasi_coherent());
        }
    }

    #[test]
    fn twist_additivity() {
        let q = quiver(2, &[], Field::Rationals);
        for a in -3..=3 {
            for b in -3..=3 {
                let (ta, tb, tab) = (twist(&q, a), twist(&q, b), twist(&q, a + b));
                for e in 0..q.edges().len() {
                    let (_, t) = q.endpoints(e);
                    let ring = q.ring(t);
                    let prod = ring.reduce(&ta.edge_map(e).rows[0][0].mul(&tb.edge_map(e).rows[0][0]));
                    assert_eq!(prod, tab.edge_map(e).rows[0][0]);
                }
            }
        }
    }

    #[test]
    fn zeroed_edge_fails_surjectivity() {
        let q = quiver(1, &[], Field::Rationals);
        let o = structure_sheaf(&q);
        let bad = o.with_edge_map(1, zero_matrix(1, 1, q.ring(2).nvars())).unwrap();
        let report = is_quasi_coherent(&bad).unwrap();
        assert!(report.edges[0].passes());
        assert!(!report.edges[1].surjective);
        assert!(!report.edges[1].injective);
    }

    #[test]
    fn broken_square_is_an_error() {
        let q = quiver(2, &[], Field::Rationals);
        let o = structure_sheaf(&q);
        let t = q.endpoints(0).1;
        let bad = o.with_edge_map(0, zero_matrix(1, 1, q.ring(t).nvars())).unwrap();
        assert!(matches!(is_quasi_coherent(&bad), Err(Error::MalformedRep(_))));
    }

    #[test]
    fn subscheme_structure_sheaf() {
        let q = quiver(1, &["x0*x1"], Field::prime(5).unwrap());
        let o = structure_sheaf(&q);
        assert!(o.module(2).is_zero_module());
        assert!(is_quasi_coherent(&o).unwrap().is_quasi_coherent());
    }

    #[test]
    fn graded_twist_matches_twist() {
        let q = quiver(2, &[], Field::Rationals);
        for k in -2..=2 {
            let g = from_graded(&q, &GradedModule::twists(&[k])).unwrap();
            let t = twist(&q, k);
            assert_eq!(g.edge_maps(), t.edge_maps());
        }
    }

    #[test]
    fn kernel_and_cokernel_basics() {
        let q = quiver(1, &[], Field::Rationals);
        let a = Arc::new(twist(&q, 1));
        let id = SheafMap::identity(a.clone());
        let k = kernel(&id).unwrap();
        assert!(k.modules().iter().all(|m| m.ngens() == 0));
        let zero = Arc::new(from_graded(&q, &GradedModule::free(vec![])).unwrap());
        let z = SheafMap::zero(zero, a.clone()).unwrap();
        let c = cokernel(&z).unwrap();
        assert_eq!(c.modules(), a.modules());
        assert!(is_quasi_coherent(&c).unwrap().is_quasi_coherent());
    }

    #[test]
    fn euler_kernel_on_p2() {
        let q = quiver(2, &[], Field::Rationals);
        let amb = q.ambient();
        let m = PresMatrix::new(1, (0..3).map(|i| vec![amb.var(i)]).collect());
        let phi = graded_map(&q, &GradedModule::twists(&[0, 0, 0]), &GradedModule::twists(&[1]), &m).unwrap();
        let k = kernel(&phi).unwrap();
        assert!(is_quasi_coherent(&k).unwrap().is_quasi_coherent());
        let c = cokernel(&phi).unwrap();
        assert!(c.modules().iter().all(PresentedModule::is_zero_module));
    }

    #[test]
    fn skyscraper_cokernel() {
        let q = quiver(1, &[], Field::Rationals);
        let amb = q.ambient();
        let m = PresMatrix::new(1, vec![vec![amb.var(0)]]);
        let phi = graded_map(&q, &GradedModule::twists(&[0]), &GradedModule::twists(&[1]), &m).unwrap();
        let c = cokernel(&phi).unwrap();
        let nonzero: Vec<Vertex> = q
            .vertices()
            .iter()
            .enumerate()
            .filter(|(i, _)| !c.module(*i).is_zero_module())
            .map(|(_, v)| *v)
            .collect();
        assert_eq!(nonzero, vec![Vertex::singleton(1)]);
        assert!(is_quasi_coherent(&c).unwrap().is_quasi_coherent());
    }
}
