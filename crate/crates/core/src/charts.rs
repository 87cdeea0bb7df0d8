//! Chart rings of the standard affine cover of `P^n` (and of closed subschemes) and
//! the localization homomorphisms between them.
//!
//! The chart of a vertex `v ⊆ {0..n}` with pivot `p = min(v)` is presented as
//! `k[z_j (j != p), u_i (i in v \ {p})] / (u_i z_i - 1, J(v))`, where `z_j` stands for
//! `x_j / x_p`, `u_i` for `x_p / x_i`, and `J(v)` is the pivot dehomogenization of the
//! homogeneous ideal. Every monomial in these variables is a degree-zero Laurent
//! monomial in `x_0..x_n`; that view drives both the homomorphisms and denominator
//! clearing.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::groebner::{FreeModElem, GroebnerBasis, PresMatrix, TermOrder};
use crate::matrix::map_entries;
use crate::module::PresentedModule;
use crate::poly::{Monomial, Poly, PolyRing};

/// A subset of `{0..n}` as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex(pub u32);

impl Vertex {
    pub fn from_indices(indices: &[usize]) -> Vertex {
        Vertex(indices.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn singleton(i: usize) -> Vertex {
        Vertex(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: Vertex) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn with(self, i: usize) -> Vertex {
        Vertex(self.0 | (1 << i))
    }

    pub fn pivot(self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl std::str::FromStr for Vertex {
    type Err = Error;

    /// Accepts `0,1`, `{0,1}` and `01` (single-digit indices).
    fn from_str(s: &str) -> Result<Vertex> {
        let t = s.trim().trim_start_matches('{').trim_end_matches('}');
        let parts: Vec<&str> = if t.contains(',') {
            t.split(',').map(str::trim).collect()
        } else {
            t.split("").filter(|c| !c.is_empty()).collect()
        };
        let mut idx = Vec::new();
        for p in parts {
            let i: usize = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad vertex `{s}`")))?;
            if i >= 31 {
                return Err(Error::Parse(format!("vertex index {i} too large")));
            }
            idx.push(i);
        }
        if idx.is_empty() {
            return Err(Error::Parse(format!("empty vertex `{s}`")));
        }
        Ok(Vertex::from_indices(&idx))
    }
}

/// The presented chart ring `R(v)`.
#[derive(Clone, Debug)]
pub struct ChartRing {
    n: usize,
    vertex: Vertex,
    pivot: usize,
    ring: PolyRing,
    z_var: Vec<Option<usize>>,
    u_var: Vec<Option<usize>>,
    homogeneous_ideal: Vec<Poly>,
    relations: Vec<Poly>,
    basis: GroebnerBasis,
}

impl PartialEq for ChartRing {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.vertex == other.vertex
            && self.ring == other.ring
            && self.homogeneous_ideal == other.homogeneous_ideal
    }
}

impl Eq for ChartRing {}

/// The ring `k[x_0..x_n]` that homogeneous ideals live in.
pub fn ambient_ring(field: Field, n: usize) -> PolyRing {
    PolyRing::with_standard_names(field, n + 1)
}

impl ChartRing {
    pub fn new(
        field: Field,
        n: usize,
        vertex: Vertex,
        homogeneous_ideal: &[Poly],
    ) -> Result<ChartRing> {
        if vertex.is_empty() || vertex.0 >> (n + 1) != 0 {
            return Err(Error::EmptyVertex { n });
        }
        let amb = ambient_ring(field, n);
        for g in homogeneous_ideal {
            amb.check(g)?;
            if !g.is_homogeneous() {
                return Err(Error::NonHomogeneous(amb.format(g)));
            }
        }
        let pivot = vertex.pivot().unwrap();
        let mut names = Vec::new();
        let mut z_var = vec![None; n + 1];
        let mut u_var = vec![None; n + 1];
        for (j, z) in z_var.iter_mut().enumerate() {
            if j != pivot {
                *z = Some(names.len());
                names.push(format!("z{j}"));
            }
        }
        for (i, u) in u_var.iter_mut().enumerate() {
            if i != pivot && vertex.contains(i) {
                *u = Some(names.len());
                names.push(format!("u{i}"));
            }
        }
        let ring = PolyRing::new(field, names);
        let mut relations = Vec::new();
        for i in 0..=n {
            if let Some(ui) = u_var[i] {
                let zi = z_var[i].unwrap();
                relations.push(ring.var(ui).mul(&ring.var(zi)).sub(&ring.one()));
            }
        }
        for g in homogeneous_ideal {
            let d = dehomogenize_at(g, n, pivot, &z_var, &ring);
            if !d.is_zero() {
                relations.push(d);
            }
        }
        let gens: Vec<FreeModElem> = relations.iter().map(|r| vec![r.clone()]).collect();
        let basis = GroebnerBasis::compute(&ring, 1, &gens, TermOrder::default())?;
        let chart = ChartRing {
            n,
            vertex,
            pivot,
            ring,
            z_var,
            u_var,
            homogeneous_ideal: homogeneous_ideal.to_vec(),
            relations,
            basis,
        };
        Ok(chart)
    }

    pub fn field(&self) -> Field {
        self.ring.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex(&self) -> Vertex {
        self.vertex
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    /// The polynomial ring the chart ring is a quotient of.
    pub fn poly_ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn homogeneous_ideal(&self) -> &[Poly] {
        &self.homogeneous_ideal
    }

    /// Inversion relations followed by the dehomogenized ideal generators.
    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    pub fn relation_basis(&self) -> &GroebnerBasis {
        &self.basis
    }

    pub fn z(&self, j: usize) -> Option<Poly> {
        self.z_var[j].map(|i| self.ring.var(i))
    }

    pub fn u(&self, i: usize) -> Option<Poly> {
        self.u_var[i].map(|k| self.ring.var(k))
    }

    pub fn zero(&self) -> Poly {
        self.ring.zero()
    }

    pub fn one(&self) -> Poly {
        self.ring.one()
    }

    /// Canonical representative modulo the relations.
    pub fn reduce(&self, p: &Poly) -> Poly {
        self.basis.reduce(std::slice::from_ref(p)).pop().unwrap()
    }

    pub fn reduce_vec(&self, v: &[Poly]) -> FreeModElem {
        v.iter().map(|p| self.reduce(p)).collect()
    }

    pub fn is_zero_elem(&self, p: &Poly) -> bool {
        self.reduce(p).is_zero()
    }

    /// True when the relations generate the unit ideal (the subscheme misses the chart).
    pub fn is_zero_ring(&self) -> bool {
        self.is_zero_elem(&self.one())
    }

    /// `f(x_0..x_n)` with `x_pivot = 1` and `x_j = z_j`.
    pub fn dehomogenize(&self, f: &Poly) -> Poly {
        dehomogenize_at(f, self.n, self.pivot, &self.z_var, &self.ring)
    }

    /// The degree-zero Laurent exponent vector in `x_0..x_n` of a chart monomial.
    pub fn laurent_exponents(&self, m: &Monomial) -> Vec<i64> {
        let mut e = vec![0i64; self.n + 1];
        for j in 0..=self.n {
            if let Some(k) = self.z_var[j] {
                let a = m.0[k] as i64;
                e[j] += a;
                e[self.pivot] -= a;
            }
            if let Some(k) = self.u_var[j] {
                let a = m.0[k] as i64;
                e[j] -= a;
                e[self.pivot] += a;
            }
        }
        e
    }

    /// The chart monomial for a degree-zero Laurent exponent vector, when its negative
    /// entries all sit inside the vertex.
    pub fn monomial_from_laurent(&self, e: &[i64]) -> Option<Monomial> {
        if e.len() != self.n + 1 || e.iter().sum::<i64>() != 0 {
            return None;
        }
        let mut m = vec![0u32; self.nvars()];
        for j in 0..=self.n {
            if j == self.pivot {
                continue;
            }
            if e[j] > 0 {
                m[self.z_var[j].unwrap()] += e[j] as u32;
            } else if e[j] < 0 {
                let k = self.u_var[j]?;
                m[k] += (-e[j]) as u32;
            }
        }
        Some(Monomial(m))
    }

    pub fn laurent_monomial(&self, e: &[i64]) -> Option<Poly> {
        self.monomial_from_laurent(e)
            .map(|m| Poly::term(self.field().one(), m))
    }

    /// `(x_a / x_b)^k` as an element of this chart; `None` if it needs an inverse of a
    /// coordinate outside the vertex.
    pub fn ratio_power(&self, a: usize, b: usize, k: i64) -> Option<Poly> {
        let mut e = vec![0i64; self.n + 1];
        e[a] += k;
        e[b] -= k;
        self.laurent_monomial(&e)
    }

    pub fn format(&self, p: &Poly) -> String {
        self.ring.format(p)
    }

    pub fn parse(&self, s: &str) -> Result<Poly> {
        self.ring.parse(s)
    }

    pub fn check(&self, p: &Poly) -> Result<()> {
        self.ring.check(p)
    }
}

fn dehomogenize_at(f: &Poly, n: usize, pivot: usize, z_var: &[Option<usize>], ring: &PolyRing) -> Poly {
    let images: Vec<Poly> = (0..=n)
        .map(|j| if j == pivot { ring.one() } else { ring.var(z_var[j].unwrap()) })
        .collect();
    f.substitute(&images, ring.nvars(), ring.field)
}

/// Builds the chart ring of `vertex` for the subscheme cut out by `homogeneous_ideal`.
pub fn make_chart_ring(
    field: Field,
    n: usize,
    vertex: Vertex,
    homogeneous_ideal: &[Poly],
) -> Result<ChartRing> {
    ChartRing::new(field, n, vertex, homogeneous_ideal)
}

/// Localization `R(v) -> R(w)` for `v ⊆ w`, recorded by the images of the source
/// variables.
#[derive(Clone, Debug)]
pub struct ChartHom {
    pub source: Arc<ChartRing>,
    pub target: Arc<ChartRing>,
    images: Vec<Poly>,
}

impl ChartHom {
    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    /// Image of a source element, in canonical form in the target.
    pub fn apply(&self, p: &Poly) -> Poly {
        let t = &self.target;
        t.reduce(&p.substitute(&self.images, t.nvars(), t.field()))
    }

    pub fn apply_vec(&self, v: &[Poly]) -> FreeModElem {
        v.iter().map(|p| self.apply(p)).collect()
    }

    /// Composite `self` then `next`.
    pub fn then(&self, next: &ChartHom) -> Result<ChartHom> {
        if *self.target != *next.source {
            return Err(Error::IncompatibleCharts(
                "composition of non-adjacent localizations".into(),
            ));
        }
        Ok(ChartHom {
            source: self.source.clone(),
            target: next.target.clone(),
            images: self.images.iter().map(|p| next.apply(p)).collect(),
        })
    }

    /// True when both homs agree on every generator after reduction.
    pub fn agrees_with(&self, other: &ChartHom) -> bool {
        *self.source == *other.source
            && *self.target == *other.target
            && self
                .images
                .iter()
                .zip(&other.images)
                .all(|(a, b)| self.target.is_zero_elem(&a.sub(b)))
    }

    /// For an element `r` of the target, a unit `s` of the target that is a monomial
    /// in the inverted coordinates and a source element `a` with `hom(a) = s * r`.
    /// The power of each inverted coordinate is the least one that clears it.
    pub fn clear_denominators(&self, r: &Poly) -> (Poly, Poly) {
        let (src, tgt) = (&self.source, &self.target);
        let n = tgt.n();
        let p = src.pivot();
        let mut shift = vec![0i64; n + 1];
        for (m, _) in r.terms() {
            let e = tgt.laurent_exponents(m);
            for k in 0..=n {
                if !src.vertex().contains(k) && e[k] < 0 {
                    shift[k] = shift[k].max(-e[k]);
                }
            }
        }
        // s = prod_k (x_k / x_p)^shift_k
        let mut s_exp = vec![0i64; n + 1];
        for k in 0..=n {
            s_exp[k] += shift[k];
            s_exp[p] -= shift[k];
        }
        let s = tgt
            .laurent_monomial(&s_exp)
            .expect("shift coordinates lie in the target vertex");
        let mut a = src.zero();
        for (m, c) in r.terms() {
            let e: Vec<i64> = tgt
                .laurent_exponents(m)
                .iter()
                .zip(&s_exp)
                .map(|(x, y)| x + y)
                .collect();
            let mono = src
                .monomial_from_laurent(&e)
                .expect("cleared exponents are regular on the source chart");
            a.add_term(mono, c.clone());
        }
        (s, src.reduce(&a))
    }
}

/// The localization homomorphism between two charts of the same subscheme.
pub fn chart_hom(source: &Arc<ChartRing>, target: &Arc<ChartRing>) -> Result<ChartHom> {
    if source.n() != target.n()
        || source.field() != target.field()
        || source.homogeneous_ideal() != target.homogeneous_ideal()
    {
        return Err(Error::IncompatibleCharts(
            "charts belong to different schemes".into(),
        ));
    }
    if !source.vertex().is_subset(target.vertex()) {
        return Err(Error::IncompatibleCharts(format!(
            "{} is not contained in {}",
            source.vertex(),
            target.vertex()
        )));
    }
    let nv = source.nvars();
    let images: Vec<Poly> = (0..nv)
        .map(|k| {
            let e = source.laurent_exponents(&Monomial::var(k, nv));
            target
                .laurent_monomial(&e)
                .expect("source coordinates are regular on the smaller open")
        })
        .collect();
    let hom = ChartHom {
        source: source.clone(),
        target: target.clone(),
        images,
    };
    for r in source.relations() {
        if !hom.apply(r).is_zero() {
            return Err(Error::IncompatibleCharts(format!(
                "relation {} does not vanish on {}",
                source.format(r),
                target.vertex()
            )));
        }
    }
    Ok(hom)
}

/// `R(w) ⊗ M`: the presentation matrix mapped through the localization.
pub fn localize_module(m: &PresentedModule, h: &ChartHom) -> Result<PresentedModule> {
    if **m.ring() != *h.source {
        return Err(Error::RingMismatch(format!(
            "module over {} localized along a hom from {}",
            m.ring().vertex(),
            h.source.vertex()
        )));
    }
    let rels = m.relations().iter().map(|r| h.apply_vec(r)).collect();
    PresentedModule::new(h.target.clone(), m.ngens(), rels)
}

/// Entrywise image of a matrix over the source chart.
pub fn localize_map(f: &PresMatrix, h: &ChartHom) -> Result<PresMatrix> {
    for row in &f.rows {
        for p in row {
            h.source.check(p)?;
        }
    }
    Ok(map_entries(f, |p| h.apply(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyRing;

    fn chart(n: usize, v: &[usize], ideal: &[&str]) -> Arc<ChartRing> {
        let amb = ambient_ring(Field::Rationals, n);
        let ideal: Vec<Poly> = ideal.iter().map(|s| amb.parse(s).unwrap()).collect();
        Arc::new(ChartRing::new(Field::Rationals, n, Vertex::from_indices(v), &ideal).unwrap())
    }

    #[test]
    fn vertex_parsing_and_display() {
        let v: Vertex = "0,1".parse().unwrap();
        assert_eq!(v, Vertex::from_indices(&[0, 1]));
        assert_eq!("{01}".parse::<Vertex>().unwrap(), v);
        assert_eq!(v.to_string(), "{0,1}");
        assert!("".parse::<Vertex>().is_err());
    }

    #[test]
    fn affine_chart_is_polynomial_ring() {
        let c = chart(1, &[0], &[]);
        assert_eq!(c.poly_ring().names, vec!["z1".to_string()]);
        assert!(c.relations().is_empty());
    }

    #[test]
    fn overlap_chart_is_laurent_ring() {
        let c = chart(1, &[0, 1], &[]);
        assert_eq!(c.poly_ring().names, vec!["z1".to_string(), "u1".to_string()]);
        assert_eq!(c.relations().len(), 1);
        let uz = c.u(1).unwrap().mul(&c.z(1).unwrap());
        assert!(c.is_zero_elem(&uz.sub(&c.one())));
    }

    #[test]
    fn conic_dehomogenizes() {
        let c = chart(2, &[0], &["x0*x2 - x1^2"]);
        let expected = c.parse("z2 - z1^2").unwrap();
        assert_eq!(c.relations(), &[expected]);
    }

    #[test]
    fn construction_errors() {
        let amb = ambient_ring(Field::Rationals, 1);
        assert!(matches!(
            ChartRing::new(Field::Rationals, 1, Vertex(0), &[]),
            Err(Error::EmptyVertex { .. })
        ));
        let bad = amb.parse("x0 + 1").unwrap();
        assert!(matches!(
            ChartRing::new(Field::Rationals, 1, Vertex(1), &[bad]),
            Err(Error::NonHomogeneous(_))
        ));
    }

    #[test]
    fn pivot_change_hom() {
        let a = chart(1, &[0], &[]);
        let b = chart(1, &[1], &[]);
        let ab = chart(1, &[0, 1], &[]);
        let h = chart_hom(&a, &ab).unwrap();
        assert_eq!(h.images(), &[ab.z(1).unwrap()]);
        let h = chart_hom(&b, &ab).unwrap();
        assert_eq!(h.images(), &[ab.u(1).unwrap()]);
        assert!(chart_hom(&ab, &a).is_err());
    }

    #[test]
    fn homs_compose_along_chains() {
        let v0 = chart(2, &[1], &[]);
        let v01 = chart(2, &[0, 1], &[]);
        let v012 = chart(2, &[0, 1, 2], &[]);
        let two = chart_hom(&v0, &v01)
            .unwrap()
            .then(&chart_hom(&v01, &v012).unwrap())
            .unwrap();
        assert!(two.agrees_with(&chart_hom(&v0, &v012).unwrap()));
    }

    #[test]
    fn localizing_torsion_kills_it() {
        let a = chart(1, &[0], &[]);
        let ab = chart(1, &[0, 1], &[]);
        let h = chart_hom(&a, &ab).unwrap();
        let m = PresentedModule::new(a.clone(), 1, vec![vec![a.z(1).unwrap()]]).unwrap();
        let lm = localize_module(&m, &h).unwrap();
        assert!(lm.is_zero_module());
        let m = PresentedModule::new(a.clone(), 1, vec![vec![a.parse("z1 - 1").unwrap()]]).unwrap();
        assert!(!localize_module(&m, &h).unwrap().is_zero_module());
        let free = PresentedModule::free(a.clone(), 3);
        let lf = localize_module(&free, &h).unwrap();
        assert_eq!(lf.ngens(), 3);
        assert!(lf.relations().is_empty());
    }

    #[test]
    fn localize_map_is_entrywise() {
        let a = chart(1, &[0], &[]);
        let ab = chart(1, &[0, 1], &[]);
        let h = chart_hom(&a, &ab).unwrap();
        let f = PresMatrix::new(1, vec![vec![a.z(1).unwrap()]]);
        let g = localize_map(&f, &h).unwrap();
        assert_eq!(g.rows[0][0], ab.z(1).unwrap());
        let other = PolyRing::with_standard_names(Field::Rationals, 4);
        let bad = PresMatrix::new(1, vec![vec![other.var(3)]]);
        assert!(localize_map(&bad, &h).is_err());
    }

    #[test]
    fn clearing_denominators() {
        let a = chart(1, &[0], &[]);
        let ab = chart(1, &[0, 1], &[]);
        let h = chart_hom(&a, &ab).unwrap();
        // r = u1^2 + 1 needs z1^2
        let r = ab.parse("u1^2 + 1").unwrap();
        let (s, pre) = h.clear_denominators(&r);
        assert_eq!(s, ab.parse("z1^2").unwrap());
        assert_eq!(h.apply(&pre), ab.reduce(&s.mul(&r)));
        // already regular on the source
        let (s, _) = h.clear_denominators(&ab.parse("z1").unwrap());
        assert!(s.is_one());
    }
}
