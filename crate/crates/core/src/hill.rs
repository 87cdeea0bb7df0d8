//! A finite model of the Hill construction. A module over `F_p` (optionally with a
//! nilpotent operator `X`, making it an `F_p[x]`-module) is filtered by blocks
//! `B_0, .., B_{σ-1}` with `M_{α+1} = M_α + R·B_α`. The family `ℋ` consists of the
//! submodules `N(S) = Σ_{α ∈ S} R·B_α` over the dependency-closed supports `S`.
//!
//! Dependencies come from an adapted basis: for each α, normal forms modulo `M_α`
//! of the vectors `X^i b` (b in `B_α`) that are new modulo `M_α`. Block β depends on
//! α < β when some element of `R·B_β` has a nonzero α-coordinate in that basis.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_BLOCKS: usize = 12;
pub const MAX_DIM: usize = 12;
/// Above this many vectors, small extensions are checked on a seeded sample.
pub const EXHAUSTIVE_ELEMENTS: u64 = 1 << 16;

type Vector = Vec<u32>;

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut r, mut e, mut b) = (1u64, p as u64 - 2, a as u64 % p as u64);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// A subspace of `F_p^dim` in reduced row echelon form; equality is subspace equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    p: u32,
    dim: usize,
    rows: Vec<Vector>,
}

impl Subspace {
    pub fn zero(p: u32, dim: usize) -> Subspace {
        Subspace {
            p,
            dim,
            rows: Vec::new(),
        }
    }

    pub fn span(p: u32, dim: usize, vectors: &[Vector]) -> Subspace {
        let mut rows: Vec<Vector> = vectors.to_vec();
        let mut out = Vec::new();
        let mut r = 0;
        for c in 0..dim {
            let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
                continue;
            };
            rows.swap(r, piv);
            let inv = inv_mod(rows[r][c], p) as u64;
            for x in rows[r].iter_mut() {
                *x = (*x as u64 * inv % p as u64) as u32;
            }
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row[c] != 0 {
                    let f = row[c] as u64;
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        let sub = f * *y as u64 % p as u64;
                        *x = ((*x as u64 + p as u64 - sub) % p as u64) as u32;
                    }
                }
            }
            r += 1;
        }
        out.extend(rows.into_iter().take(r));
        Subspace { p, dim, rows: out }
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.rows
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|x| *x == 0)
    }

    /// Normal form of `v` modulo this subspace: zero in every pivot column.
    pub fn reduce(&self, v: &[u32]) -> Vector {
        let mut w = v.to_vec();
        for row in &self.rows {
            let c = row.iter().position(|x| *x != 0).unwrap();
            if w[c] != 0 {
                let f = w[c] as u64;
                for j in 0..self.dim {
                    let sub = f * row[j] as u64 % self.p as u64;
                    w[j] = ((w[j] as u64 + self.p as u64 - sub) % self.p as u64) as u32;
                }
            }
        }
        w
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut v = self.rows.clone();
        v.extend(other.rows.iter().cloned());
        Subspace::span(self.p, self.dim, &v)
    }

    /// Intersection by the Zassenhaus construction.
    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let (p, d) = (self.p, self.dim);
        let mut rows = Vec::new();
        for r in &self.rows {
            let mut v = r.clone();
            v.extend(r.iter().cloned());
            rows.push(v);
        }
        for r in &other.rows {
            let mut v = r.clone();
            v.extend(std::iter::repeat_n(0, d));
            rows.push(v);
        }
        let big = Subspace::span(p, 2 * d, &rows);
        let meet: Vec<Vector> = big
            .rows
            .iter()
            .filter(|r| r[..d].iter().all(|x| *x == 0))
            .map(|r| r[d..].to_vec())
            .collect();
        Subspace::span(p, d, &meet)
    }

    pub fn vectors(&self) -> impl Iterator<Item = Vector> + '_ {
        let n = self.rows.len();
        let total = (self.p as u64).pow(n as u32);
        (0..total).map(move |mut idx| {
            let mut v = vec![0u32; self.dim];
            for row in &self.rows {
                let c = idx % self.p as u64;
                idx /= self.p as u64;
                for (x, r) in v.iter_mut().zip(row) {
                    *x = ((*x as u64 + c * *r as u64) % self.p as u64) as u32;
                }
            }
            v
        })
    }
}

fn apply(op: &[Vector], v: &[u32], p: u32) -> Vector {
    // row-vector convention: v * X
    let d = v.len();
    let mut out = vec![0u32; d];
    for (i, x) in v.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for j in 0..d {
            out[j] = ((out[j] as u64 + *x as u64 * op[i][j] as u64) % p as u64) as u32;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredModule {
    p: u32,
    dim: usize,
    operator: Option<Vec<Vector>>,
    blocks: Vec<Vec<Vector>>,
}

impl FilteredModule {
    pub fn new(
        p: u32,
        dim: usize,
        operator: Option<Vec<Vector>>,
        blocks: Vec<Vec<Vector>>,
    ) -> Result<FilteredModule> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if blocks.len() > MAX_BLOCKS || dim > MAX_DIM {
            return Err(Error::SizeBound(format!(
                "{} blocks in dimension {dim}; limits are {MAX_BLOCKS} and {MAX_DIM}",
                blocks.len()
            )));
        }
        let ok = |v: &Vector| v.len() == dim && v.iter().all(|x| *x < p);
        if let Some(op) = &operator {
            if op.len() != dim || !op.iter().all(ok) {
                return Err(Error::DimensionMismatch("operator must be a dim x dim matrix".into()));
            }
            // nilpotent: X^dim kills every basis vector
            for i in 0..dim {
                let mut v = vec![0u32; dim];
                v[i] = 1;
                for _ in 0..dim {
                    v = apply(op, &v, p);
                }
                if v.iter().any(|x| *x != 0) {
                    return Err(Error::Precondition("operator is not nilpotent".into()));
                }
            }
        }
        if !blocks.iter().flatten().all(ok) {
            return Err(Error::DimensionMismatch(format!(
                "block vectors must have {dim} entries below {p}"
            )));
        }
        Ok(FilteredModule {
            p,
            dim,
            operator,
            blocks,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> usize {
        self.blocks.len()
    }

    pub fn operator(&self) -> Option<&[Vector]> {
        self.operator.as_deref()
    }

    pub fn blocks(&self) -> &[Vec<Vector>] {
        &self.blocks
    }

    /// The submodule generated by `vectors`.
    pub fn module_span(&self, vectors: &[Vector]) -> Subspace {
        let mut all = Vec::new();
        for v in vectors {
            let mut w = v.clone();
            for _ in 0..=self.dim {
                if w.iter().all(|x| *x == 0) {
                    break;
                }
                all.push(w.clone());
                match &self.operator {
                    Some(op) => w = apply(op, &w, self.p),
                    None => break,
                }
            }
        }
        Subspace::span(self.p, self.dim, &all)
    }

    /// `X` applied to every basis vector of `s`, spanned together with `s`.
    fn image_power(&self, s: &Subspace, k: usize) -> Subspace {
        let Some(op) = &self.operator else {
            return if k == 0 { s.clone() } else { Subspace::zero(self.p, self.dim) };
        };
        let imgs: Vec<Vector> = s
            .basis()
            .iter()
            .map(|v| (0..k).fold(v.clone(), |w, _| apply(op, &w, self.p)))
            .collect();
        Subspace::span(self.p, self.dim, &imgs)
    }

    /// Ranks of `X^k` on `upper / lower` for `k = 0..=dim`: determines the module up to
    /// isomorphism (dimension and Jordan type).
    pub fn quotient_type(&self, lower: &Subspace, upper: &Subspace) -> Vec<usize> {
        (0..=self.dim)
            .map(|k| self.image_power(upper, k).sum(lower).dimension() - lower.dimension())
            .collect()
    }

    /// `M_0 ⊆ .. ⊆ M_σ`.
    pub fn stages(&self) -> Vec<Subspace> {
        let mut out = vec![Subspace::zero(self.p, self.dim)];
        for b in &self.blocks {
            let next = out.last().unwrap().sum(&self.module_span(b));
            out.push(next);
        }
        out
    }
}

/// Coordinates with respect to the adapted basis, grouped by block.
#[derive(Clone, Debug)]
struct AdaptedBasis {
    vectors: Vec<Vector>,
    owner: Vec<usize>,
}

impl AdaptedBasis {
    fn build(m: &FilteredModule) -> AdaptedBasis {
        let mut vectors: Vec<Vector> = Vec::new();
        let mut owner = Vec::new();
        let mut cur = Subspace::zero(m.p, m.dim);
        for (a, b) in m.blocks.iter().enumerate() {
            let before = cur.clone();
            for v in m.module_span(b).basis() {
                let w = before.reduce(v);
                if !cur.contains(&w) {
                    cur = cur.sum(&Subspace::span(m.p, m.dim, std::slice::from_ref(&w)));
                    vectors.push(w);
                    owner.push(a);
                }
            }
        }
        AdaptedBasis { vectors, owner }
    }

    /// Blocks with a nonzero coordinate in `v`; `None` if `v` is outside `M_σ`.
    fn support(&self, p: u32, v: &[u32]) -> Option<BTreeSet<usize>> {
        let n = self.vectors.len();
        let d = v.len();
        // solve c * V = v through an augmented elimination on the transpose
        let mut rows: Vec<Vector> = (0..d)
            .map(|j| {
                let mut r: Vector = (0..n).map(|i| self.vectors[i][j]).collect();
                r.push(v[j]);
                r
            })
            .collect();
        let red = Subspace::span(p, n + 1, &std::mem::take(&mut rows));
        let mut coeffs = vec![0u32; n];
        for r in red.basis() {
            let c = r.iter().position(|x| *x != 0).unwrap();
            if c == n {
                return None;
            }
            coeffs[c] = r[n];
        }
        Some(
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, _)| self.owner[i])
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HillMember {
    /// Largest support producing this submodule.
    pub support: BTreeSet<usize>,
    pub space: Subspace,
}

#[derive(Clone, Debug)]
pub struct HillLattice {
    module: FilteredModule,
    /// `dependencies[β]`: blocks α < β that β depends on.
    pub dependencies: Vec<BTreeSet<usize>>,
    pub members: Vec<HillMember>,
    adapted: AdaptedBasis,
}

fn close(deps: &[BTreeSet<usize>], s: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut out = s.clone();
    let mut stack: Vec<usize> = s.iter().copied().collect();
    while let Some(b) = stack.pop() {
        for &a in &deps[b] {
            if out.insert(a) {
                stack.push(a);
            }
        }
    }
    out
}

pub fn build_hill_family(m: &FilteredModule) -> Result<HillLattice> {
    let sigma = m.sigma();
    if sigma > MAX_BLOCKS || m.dim > MAX_DIM {
        return Err(Error::SizeBound("filtered module too large".into()));
    }
    let adapted = AdaptedBasis::build(m);
    let dependencies: Vec<BTreeSet<usize>> = (0..sigma)
        .map(|b| {
            let mut deps = BTreeSet::new();
            for v in m.module_span(&m.blocks[b]).basis() {
                let supp = adapted.support(m.p, v).expect("block lies in M_σ");
                deps.extend(supp.into_iter().filter(|a| *a < b));
            }
            deps
        })
        .collect();
    let mut members: Vec<HillMember> = Vec::new();
    for mask in 0u32..(1u32 << sigma) {
        let s: BTreeSet<usize> = (0..sigma).filter(|i| mask >> i & 1 == 1).collect();
        if close(&dependencies, &s) != s {
            continue;
        }
        let gens: Vec<Vector> = s.iter().flat_map(|&a| m.blocks[a].iter().cloned()).collect();
        let space = m.module_span(&gens);
        match members.iter_mut().find(|x| x.space == space) {
            Some(x) => x.support.extend(s),
            None => members.push(HillMember { support: s, space }),
        }
    }
    Ok(HillLattice {
        module: m.clone(),
        dependencies,
        members,
        adapted,
    })
}

impl HillLattice {
    pub fn module(&self) -> &FilteredModule {
        &self.module
    }

    pub fn position(&self, s: &Subspace) -> Option<usize> {
        self.members.iter().position(|m| m.space == *s)
    }

    /// Drops a member; used to build deliberately broken families.
    pub fn remove(&mut self, index: usize) -> Result<HillMember> {
        if index >= self.members.len() {
            return Err(Error::Precondition(format!("no member {index}")));
        }
        Ok(self.members.remove(index))
    }
}

/// `P/N` filtered by the blocks of `T \ S`, in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientChain {
    pub lower: usize,
    pub upper: usize,
    /// `(block, P_{k+1})` with `P_0 = N`.
    pub steps: Vec<(usize, Subspace)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetOp {
    Sum,
    Intersection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HillReport {
    pub family_size: usize,
    pub stages_found: bool,
    pub missing_stage: Option<usize>,
    pub lattice_closed: bool,
    /// Members `(i, j)` whose sum or intersection is not in the family.
    pub lattice_witness: Option<(usize, usize, SetOp)>,
    pub filtrations_ok: bool,
    pub chains: Vec<QuotientChain>,
    pub filtration_failure: Option<(usize, usize)>,
    pub small_extensions_ok: bool,
    pub elements_checked: u64,
    pub exhaustive: bool,
    /// `(member, dim(P/N), bound)` for the largest extension met.
    pub largest_extension: Option<(usize, usize, usize)>,
    pub extension_failure: Option<(usize, Vector)>,
}

impl HillReport {
    pub fn passes(&self) -> bool {
        self.stages_found && self.lattice_closed && self.filtrations_ok && self.small_extensions_ok
    }
}

pub fn verify_hill_properties(l: &HillLattice) -> HillReport {
    verify_hill_properties_seeded(l, 0)
}

pub fn verify_hill_properties_seeded(l: &HillLattice, seed: u64) -> HillReport {
    let m = &l.module;
    let stages = m.stages();
    // every stage is a member
    let missing_stage = (0..stages.len()).find(|&a| l.position(&stages[a]).is_none());
    // closed under sums and intersections
    let mut lattice_witness = None;
    'pairs: for i in 0..l.members.len() {
        for j in i..l.members.len() {
            let (a, b) = (&l.members[i].space, &l.members[j].space);
            if l.position(&a.sum(b)).is_none() {
                lattice_witness = Some((i, j, SetOp::Sum));
                break 'pairs;
            }
            if l.position(&a.intersection(b)).is_none() {
                lattice_witness = Some((i, j, SetOp::Intersection));
                break 'pairs;
            }
        }
    }
    // quotient filtrations
    let mut chains = Vec::new();
    let mut filtration_failure = None;
    for (i, n) in l.members.iter().enumerate() {
        for (j, p) in l.members.iter().enumerate() {
            if i == j || !n.space.is_subspace_of(&p.space) {
                continue;
            }
            match quotient_chain(l, i, j, &stages) {
                Some(c) => chains.push(c),
                None => {
                    filtration_failure.get_or_insert((i, j));
                }
            }
        }
    }
    // small extensions
    let ambient = stages.last().cloned().unwrap_or_else(|| Subspace::zero(m.p, m.dim));
    let total = (m.p as u64).saturating_pow(ambient.dimension() as u32);
    let exhaustive = total <= EXHAUSTIVE_ELEMENTS;
    let elements: Vec<Vector> = if exhaustive {
        ambient.vectors().collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..EXHAUSTIVE_ELEMENTS)
            .map(|_| {
                let mut v = vec![0u32; m.dim];
                for row in ambient.basis() {
                    let c = rng.gen_range(0..m.p) as u64;
                    for (x, y) in v.iter_mut().zip(row) {
                        *x = ((*x as u64 + c * *y as u64) % m.p as u64) as u32;
                    }
                }
                v
            })
            .collect()
    };
    let max_block = (0..m.sigma())
        .map(|a| stages[a + 1].dimension() - stages[a].dimension())
        .max()
        .unwrap_or(0);
    let mut largest: Option<(usize, usize, usize)> = None;
    let mut extension_failure = None;
    let supports: Vec<BTreeSet<usize>> = elements
        .iter()
        .map(|x| l.adapted.support(m.p, x).expect("element of M_σ"))
        .collect();
    'ext: for (i, n) in l.members.iter().enumerate() {
        for (x, supp) in elements.iter().zip(&supports) {
            let mut s = n.support.clone();
            let added: BTreeSet<usize> = close(&l.dependencies, &supp.union(&n.support).copied().collect());
            let blocks_added = added.difference(&s).count();
            s = added;
            let gens: Vec<Vector> = s.iter().flat_map(|&a| m.blocks[a].iter().cloned()).collect();
            let p = m.module_span(&gens);
            let ok = l.position(&p).is_some()
                && n.space.is_subspace_of(&p)
                && p.contains(x);
            let ext = p.dimension() - n.space.dimension().min(p.dimension());
            let bound = max_block * blocks_added;
            if !ok || ext > bound {
                extension_failure = Some((i, x.clone()));
                break 'ext;
            }
            if largest.is_none_or(|(_, e, _)| ext > e) {
                largest = Some((i, ext, bound));
            }
        }
    }
    HillReport {
        family_size: l.members.len(),
        stages_found: missing_stage.is_none(),
        missing_stage,
        lattice_closed: lattice_witness.is_none(),
        lattice_witness,
        filtrations_ok: filtration_failure.is_none(),
        chains,
        filtration_failure,
        small_extensions_ok: extension_failure.is_none(),
        elements_checked: elements.len() as u64,
        exhaustive,
        largest_extension: largest,
        extension_failure,
    }
}

/// Filtration of `P/N` through the members `N(S ∪ (T ∩ [0, γ)))`, each quotient
/// matched against the corresponding `M_{γ+1}/M_γ`.
fn quotient_chain(l: &HillLattice, lower: usize, upper: usize, stages: &[Subspace]) -> Option<QuotientChain> {
    let m = &l.module;
    let (n, p) = (&l.members[lower], &l.members[upper]);
    let extra: Vec<usize> = p.support.difference(&n.support).copied().collect();
    let mut cur_support = n.support.clone();
    let mut cur = n.space.clone();
    let mut steps = Vec::new();
    for &g in &extra {
        cur_support.insert(g);
        let closed = close(&l.dependencies, &cur_support);
        if closed != cur_support {
            return None;
        }
        let gens: Vec<Vector> = cur_support.iter().flat_map(|&a| m.blocks[a].iter().cloned()).collect();
        let next = m.module_span(&gens);
        l.position(&next)?;
        if m.quotient_type(&cur, &next) != m.quotient_type(&stages[g], &stages[g + 1]) {
            return None;
        }
        steps.push((g, next.clone()));
        cur = next;
    }
    (cur == p.space).then_some(QuotientChain { lower, upper, steps })
}

/// A random filtered module with `sigma` single-vector blocks, for property tests.
pub fn random_filtered_module(p: u32, dim: usize, sigma: usize, seed: u64) -> FilteredModule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = (0..sigma)
        .map(|_| vec![(0..dim).map(|_| rng.gen_range(0..p)).collect()])
        .collect();
    FilteredModule::new(p, dim, None, blocks).expect("random module within bounds")
}
