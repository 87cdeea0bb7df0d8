//! Buchberger's algorithm for submodules of free modules over a polynomial ring,
//! with representation tracking so that lifts and Schreyer syzygies come out of
//! the same run.
//!
//! Elements of `F_r = P^r` are [`FreeModElem`]s (`Vec<Poly>` of length `r`).
//! Internally a module element is a [`Row`]: its terms `(position, monomial, coeff)`
//! sorted ascending under a [`TermOrder`], so the leading term is the last entry.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::field::{Coeff, Field};
use crate::poly::{grevlex_cmp, Monomial, Poly, PolyRing};

/// An element of a free module `P^r`.
pub type FreeModElem = Vec<Poly>;

/// A matrix whose rows are elements of `P^ncols`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresMatrix {
    pub ncols: usize,
    pub rows: Vec<FreeModElem>,
}

impl PresMatrix {
    pub fn new(ncols: usize, rows: Vec<FreeModElem>) -> PresMatrix {
        debug_assert!(rows.iter().all(|r| r.len() == ncols));
        PresMatrix { ncols, rows }
    }

    pub fn empty(ncols: usize) -> PresMatrix {
        PresMatrix {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    Lex,
    DegLex,
    #[default]
    DegRevLex,
}

/// How positions of a free module interact with the monomial order.
/// Lower positions are larger in both variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ModuleOrder {
    #[default]
    PositionOverTerm,
    TermOverPosition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct TermOrder {
    pub monomial: MonomialOrder,
    pub module: ModuleOrder,
}

impl TermOrder {
    pub fn cmp_mono(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.monomial {
            MonomialOrder::DegRevLex => grevlex_cmp(&a.0, &b.0),
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::DegLex => a.degree().cmp(&b.degree()).then_with(|| a.0.cmp(&b.0)),
        }
    }

    fn cmp_term(&self, ap: usize, am: &Monomial, bp: usize, bm: &Monomial) -> Ordering {
        match self.module {
            ModuleOrder::PositionOverTerm => bp.cmp(&ap).then_with(|| self.cmp_mono(am, bm)),
            ModuleOrder::TermOverPosition => self.cmp_mono(am, bm).then_with(|| bp.cmp(&ap)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Term {
    pub pos: usize,
    pub mono: Monomial,
    pub coeff: Coeff,
}

pub(crate) type Row = Vec<Term>;

fn to_row(e: &[Poly], order: &TermOrder) -> Row {
    let mut row: Row = e
        .iter()
        .enumerate()
        .flat_map(|(pos, p)| {
            p.terms().map(move |(m, c)| Term {
                pos,
                mono: m.clone(),
                coeff: c.clone(),
            })
        })
        .collect();
    row.sort_by(|a, b| order.cmp_term(a.pos, &a.mono, b.pos, &b.mono));
    row
}

fn from_row(row: &Row, rank: usize, nvars: usize) -> FreeModElem {
    let mut out = vec![Poly::zero(nvars); rank];
    for t in row {
        out[t.pos].add_term(t.mono.clone(), t.coeff.clone());
    }
    out
}

/// `a + c * m * b`, both rows ascending.
fn axpy(order: &TermOrder, a: &Row, c: &Coeff, m: &Monomial, b: &Row) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut j = 0;
    let mut bj: Option<Term> = None;
    loop {
        if bj.is_none() && j < b.len() {
            bj = Some(Term {
                pos: b[j].pos,
                mono: b[j].mono.mul(m),
                coeff: &b[j].coeff * c,
            });
        }
        match (i < a.len(), &bj) {
            (false, None) => break,
            (true, None) => {
                out.extend_from_slice(&a[i..]);
                break;
            }
            (false, Some(_)) => {
                out.push(bj.take().unwrap());
                j += 1;
            }
            (true, Some(t)) => match order.cmp_term(a[i].pos, &a[i].mono, t.pos, &t.mono) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(bj.take().unwrap());
                    j += 1;
                }
                Ordering::Equal => {
                    let s = &a[i].coeff + &t.coeff;
                    if !s.is_zero() {
                        out.push(Term {
                            pos: t.pos,
                            mono: t.mono.clone(),
                            coeff: s,
                        });
                    }
                    bj = None;
                    i += 1;
                    j += 1;
                }
            },
        }
    }
    out
}

fn scale_row(row: &Row, c: &Coeff) -> Row {
    row.iter()
        .map(|t| Term {
            pos: t.pos,
            mono: t.mono.clone(),
            coeff: &t.coeff * c,
        })
        .collect()
}

fn unit_row(pos: usize, nvars: usize, field: Field) -> Row {
    vec![Term {
        pos,
        mono: Monomial::one(nvars),
        coeff: field.one(),
    }]
}

/// Multiplies each basis representation by the polynomial quotient stored in `quot`
/// (a row over basis positions) and sums: `sum_k quot_k * reps[k]`.
fn combine(order: &TermOrder, quot: &Row, reps: &[Row]) -> Row {
    let mut out = Row::new();
    for t in quot {
        out = axpy(order, &out, &t.coeff, &t.mono, &reps[t.pos]);
    }
    out
}

fn sub_rows(order: &TermOrder, a: &Row, b: &Row, nvars: usize, field: Field) -> Row {
    axpy(order, a, &-&field.one(), &Monomial::one(nvars), b)
}

struct Element {
    row: Row,
    rep: Option<Row>,
}

impl Element {
    fn lead(&self) -> &Term {
        self.row.last().expect("zero element in basis")
    }
}

/// A Gröbner basis of a submodule of `P^rank`, optionally carrying, for each basis
/// element, its expression in terms of the original generators.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    field: Field,
    nvars: usize,
    rank: usize,
    order: TermOrder,
    ngens: usize,
    elems: Vec<Row>,
    reps: Option<Vec<Row>>,
}

impl GroebnerBasis {
    /// Reduced Gröbner basis of the submodule of `ring^rank` generated by `gens`.
    pub fn compute(
        ring: &PolyRing,
        rank: usize,
        gens: &[FreeModElem],
        order: TermOrder,
    ) -> Result<GroebnerBasis> {
        GroebnerBasis::run(ring, rank, gens, order, false)
    }

    /// Same as [`GroebnerBasis::compute`], also recording representations.
    pub fn compute_tracked(
        ring: &PolyRing,
        rank: usize,
        gens: &[FreeModElem],
        order: TermOrder,
    ) -> Result<GroebnerBasis> {
        GroebnerBasis::run(ring, rank, gens, order, true)
    }

    /// Wraps elements already known to form a Gröbner basis. Not verified.
    pub fn from_basis(
        ring: &PolyRing,
        rank: usize,
        basis: &[FreeModElem],
        order: TermOrder,
    ) -> Result<GroebnerBasis> {
        check_elems(ring, rank, basis)?;
        let elems = basis
            .iter()
            .map(|e| to_row(e, &order))
            .filter(|r| !r.is_empty())
            .collect();
        Ok(GroebnerBasis {
            field: ring.field,
            nvars: ring.nvars(),
            rank,
            order,
            ngens: basis.len(),
            elems,
            reps: None,
        })
    }

    fn run(
        ring: &PolyRing,
        rank: usize,
        gens: &[FreeModElem],
        order: TermOrder,
        track: bool,
    ) -> Result<GroebnerBasis> {
        check_elems(ring, rank, gens)?;
        let field = ring.field;
        let nvars = ring.nvars();
        let mut engine = Buchberger {
            order,
            field,
            nvars,
            product_criterion: rank == 1,
            elems: Vec::new(),
            active: Vec::new(),
            pairs: Vec::new(),
        };
        for (i, g) in gens.iter().enumerate() {
            let row = to_row(g, &order);
            let rep = track.then(|| unit_row(i, nvars, field));
            engine.insert_reduced(row, rep);
        }
        while let Some((i, j)) = engine.select_pair() {
            let (row, rep) = engine.spoly(i, j);
            engine.insert_reduced(row, rep);
        }
        let (elems, reps) = engine.finish(track);
        Ok(GroebnerBasis {
            field,
            nvars,
            rank,
            order,
            ngens: gens.len(),
            elems,
            reps,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> TermOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> Vec<FreeModElem> {
        self.elems
            .iter()
            .map(|r| from_row(r, self.rank, self.nvars))
            .collect()
    }

    /// Leading terms as `(position, monomial)`, in basis order.
    pub fn leading_terms(&self) -> Vec<(usize, Monomial)> {
        self.elems
            .iter()
            .map(|r| {
                let t = r.last().unwrap();
                (t.pos, t.mono.clone())
            })
            .collect()
    }

    /// True when some basis element has a nonzero constant leading term in every
    /// position, i.e. the submodule is the whole free module.
    pub fn is_whole_module(&self) -> bool {
        (0..self.rank).all(|pos| {
            self.elems.iter().any(|r| {
                let t = r.last().unwrap();
                t.pos == pos && t.mono.is_one()
            })
        })
    }

    fn reducer(&self) -> Reducer<'_> {
        Reducer {
            order: &self.order,
            elems: &self.elems,
        }
    }

    pub fn reduce(&self, e: &[Poly]) -> FreeModElem {
        assert_eq!(e.len(), self.rank, "element rank differs from basis rank");
        let (rem, _) = self.reducer().reduce(to_row(e, &self.order), false);
        from_row(&rem, self.rank, self.nvars)
    }

    pub fn contains(&self, e: &[Poly]) -> bool {
        self.reduce(e).iter().all(Poly::is_zero)
    }

    /// Coefficients `c` with `e = sum_i c_i * gens_i`, or `None` when `e` is not in
    /// the submodule. Requires a tracked basis.
    pub fn lift(&self, e: &[Poly]) -> Option<Vec<Poly>> {
        let reps = self.reps.as_ref().expect("lift needs a tracked basis");
        assert_eq!(e.len(), self.rank);
        let (rem, quot) = self.reducer().reduce(to_row(e, &self.order), true);
        if !rem.is_empty() {
            return None;
        }
        let coeffs = combine(&self.order, &quot.unwrap(), reps);
        Some(from_row(&coeffs, self.ngens, self.nvars))
    }

    /// Generators of the syzygy module of the original generators, by Schreyer's
    /// construction on the tracked basis. Requires a tracked basis.
    pub fn syzygies(&self, gens: &[FreeModElem]) -> Vec<FreeModElem> {
        let reps = self.reps.as_ref().expect("syzygies need a tracked basis");
        assert_eq!(gens.len(), self.ngens);
        let order = &self.order;
        let (field, nvars) = (self.field, self.nvars);
        let red = self.reducer();
        let mut out: Vec<Row> = Vec::new();
        let n = self.elems.len();
        for k in 0..n {
            for l in (k + 1)..n {
                let (tk, tl) = (self.elems[k].last().unwrap(), self.elems[l].last().unwrap());
                if tk.pos != tl.pos {
                    continue;
                }
                let lcm = tk.mono.lcm(&tl.mono);
                let mk = tk.mono.quotient_of(&lcm);
                let ml = tl.mono.quotient_of(&lcm);
                let ck = tk.coeff.inv();
                let cl = -&tl.coeff.inv();
                let s = axpy(
                    order,
                    &axpy(order, &Row::new(), &ck, &mk, &self.elems[k]),
                    &cl,
                    &ml,
                    &self.elems[l],
                );
                let (rem, quot) = red.reduce(s, true);
                debug_assert!(rem.is_empty(), "S-polynomial of a Gröbner basis must reduce to zero");
                // syzygy among basis elements: ck*mk*e_k + cl*ml*e_l - quot
                let mut sig = vec![
                    Term {
                        pos: k,
                        mono: mk,
                        coeff: ck,
                    },
                    Term {
                        pos: l,
                        mono: ml,
                        coeff: cl,
                    },
                ];
                sig.sort_by(|a, b| order.cmp_term(a.pos, &a.mono, b.pos, &b.mono));
                let sig = sub_rows(order, &sig, &quot.unwrap(), nvars, field);
                let syz = combine(order, &sig, reps);
                if !syz.is_empty() {
                    out.push(syz);
                }
            }
        }
        for (i, g) in gens.iter().enumerate() {
            let (rem, quot) = red.reduce(to_row(g, order), true);
            debug_assert!(rem.is_empty());
            let back = combine(order, &quot.unwrap(), reps);
            let syz = sub_rows(order, &unit_row(i, nvars, field), &back, nvars, field);
            if !syz.is_empty() {
                out.push(syz);
            }
        }
        let mut seen = Vec::<Row>::new();
        for r in out {
            let r = make_monic_row(&r);
            if !seen.contains(&r) {
                seen.push(r);
            }
        }
        seen.iter().map(|r| from_row(r, self.ngens, nvars)).collect()
    }
}

fn make_monic_row(r: &Row) -> Row {
    match r.last() {
        None => Row::new(),
        Some(t) => scale_row(r, &t.coeff.inv()),
    }
}

fn check_elems(ring: &PolyRing, rank: usize, gens: &[FreeModElem]) -> Result<()> {
    for g in gens {
        if g.len() != rank {
            return Err(Error::DimensionMismatch(format!(
                "element of length {} in a free module of rank {rank}",
                g.len()
            )));
        }
        for p in g {
            ring.check(p)?;
        }
    }
    Ok(())
}

struct Reducer<'a> {
    order: &'a TermOrder,
    elems: &'a [Row],
}

impl Reducer<'_> {
    fn find_divisor(&self, t: &Term) -> Option<usize> {
        self.elems.iter().position(|e| {
            let l = e.last().unwrap();
            l.pos == t.pos && l.mono.divides(&t.mono)
        })
    }

    /// Full reduction. Returns the remainder and, when asked, the quotient row whose
    /// positions index the basis elements.
    fn reduce(&self, mut f: Row, want_quot: bool) -> (Row, Option<Row>) {
        let mut rem_rev: Row = Vec::new();
        let mut quot: Option<Row> = want_quot.then(Row::new);
        while let Some(t) = f.last() {
            match self.find_divisor(t) {
                Some(k) => {
                    let lead = self.elems[k].last().unwrap();
                    let m = lead.mono.quotient_of(&t.mono);
                    let c = &t.coeff * &lead.coeff.inv();
                    f = axpy(self.order, &f, &-&c, &m, &self.elems[k]);
                    if let Some(q) = quot.as_mut() {
                        let one_term = vec![Term {
                            pos: k,
                            mono: m.clone(),
                            coeff: c.clone(),
                        }];
                        let nv = m.nvars();
                        *q = axpy(self.order, q, &c.field().one(), &Monomial::one(nv), &one_term);
                    }
                }
                None => {
                    rem_rev.push(f.pop().unwrap());
                }
            }
        }
        rem_rev.reverse();
        (rem_rev, quot)
    }
}

struct Buchberger {
    order: TermOrder,
    field: Field,
    nvars: usize,
    product_criterion: bool,
    elems: Vec<Element>,
    active: Vec<bool>,
    pairs: Vec<(usize, usize, Monomial)>,
}

impl Buchberger {
    fn reduce(&self, mut row: Row, mut rep: Option<Row>) -> (Row, Option<Row>) {
        let idx: Vec<usize> = (0..self.elems.len()).filter(|&i| self.active[i]).collect();
        let rows: Vec<Row> = idx.iter().map(|&i| self.elems[i].row.clone()).collect();
        let red = Reducer {
            order: &self.order,
            elems: &rows,
        };
        let (rem, quot) = red.reduce(std::mem::take(&mut row), rep.is_some());
        if let (Some(r), Some(q)) = (rep.as_mut(), quot) {
            let reps: Vec<Row> = idx
                .iter()
                .map(|&i| self.elems[i].rep.clone().unwrap())
                .collect();
            let back = combine(&self.order, &q, &reps);
            *r = sub_rows(&self.order, r, &back, self.nvars, self.field);
        }
        (rem, rep)
    }

    fn insert_reduced(&mut self, row: Row, rep: Option<Row>) {
        let (row, rep) = self.reduce(row, rep);
        if row.is_empty() {
            return;
        }
        let inv = row.last().unwrap().coeff.inv();
        let row = scale_row(&row, &inv);
        let rep = rep.map(|r| scale_row(&r, &inv));
        self.update(Element { row, rep });
    }

    /// Gebauer–Möller update.
    fn update(&mut self, h: Element) {
        let hi = self.elems.len();
        let hl = h.lead().clone();
        self.elems.push(h);
        self.active.push(true);

        let lead = |e: &Element| e.lead().clone();
        let cands: Vec<(usize, Monomial, bool)> = (0..hi)
            .filter(|&g| self.active[g])
            .filter_map(|g| {
                let gl = lead(&self.elems[g]);
                (gl.pos == hl.pos).then(|| {
                    let coprime = self.product_criterion && gl.mono.is_coprime(&hl.mono);
                    (g, gl.mono.lcm(&hl.mono), coprime)
                })
            })
            .collect();

        // chain criterion among the new pairs
        let mut kept: Vec<(usize, Monomial, bool)> = Vec::new();
        for (idx, (g, lcm, coprime)) in cands.iter().enumerate() {
            let dominated = cands
                .iter()
                .enumerate()
                .any(|(j, (_, l2, _))| j > idx && l2.divides(lcm))
                || kept.iter().any(|(_, l2, _)| l2.divides(lcm));
            if *coprime || !dominated {
                kept.push((*g, lcm.clone(), *coprime));
            }
        }
        // old pairs made redundant by h
        let elems = &self.elems;
        self.pairs.retain(|(a, b, lcm)| {
            let al = &elems[*a].lead().mono;
            let bl = &elems[*b].lead().mono;
            let pos = elems[*a].lead().pos;
            !(pos == hl.pos
                && hl.mono.divides(lcm)
                && al.lcm(&hl.mono) != *lcm
                && bl.lcm(&hl.mono) != *lcm)
        });
        for (g, lcm, coprime) in kept {
            if !coprime {
                self.pairs.push((g, hi, lcm));
            }
        }
        for g in 0..hi {
            if self.active[g] {
                let gl = self.elems[g].lead();
                if gl.pos == hl.pos && hl.mono.divides(&gl.mono) {
                    self.active[g] = false;
                }
            }
        }
    }

    fn select_pair(&mut self) -> Option<(usize, usize)> {
        if self.pairs.is_empty() {
            return None;
        }
        let mut best = 0;
        for k in 1..self.pairs.len() {
            let (a, _, l) = &self.pairs[k];
            let (b, _, m) = &self.pairs[best];
            let pa = self.elems[*a].lead().pos;
            let pb = self.elems[*b].lead().pos;
            if self.order.cmp_term(pa, l, pb, m) == Ordering::Less {
                best = k;
            }
        }
        let (i, j, _) = self.pairs.swap_remove(best);
        Some((i, j))
    }

    fn spoly(&self, i: usize, j: usize) -> (Row, Option<Row>) {
        let (ei, ej) = (&self.elems[i], &self.elems[j]);
        let (li, lj) = (ei.lead(), ej.lead());
        let lcm = li.mono.lcm(&lj.mono);
        let mi = li.mono.quotient_of(&lcm);
        let mj = lj.mono.quotient_of(&lcm);
        let one = self.field.one();
        let neg = -&one;
        let row = axpy(
            &self.order,
            &axpy(&self.order, &Row::new(), &one, &mi, &ei.row),
            &neg,
            &mj,
            &ej.row,
        );
        let rep = match (&ei.rep, &ej.rep) {
            (Some(ri), Some(rj)) => Some(axpy(
                &self.order,
                &axpy(&self.order, &Row::new(), &one, &mi, ri),
                &neg,
                &mj,
                rj,
            )),
            _ => None,
        };
        (row, rep)
    }

    /// Minimalizes, tail-reduces and sorts the basis (descending leading terms).
    fn finish(self, track: bool) -> (Vec<Row>, Option<Vec<Row>>) {
        let order = self.order;
        let mut idx: Vec<usize> = (0..self.elems.len()).filter(|&i| self.active[i]).collect();
        // drop elements whose lead is divisible by another kept lead
        let mut minimal: Vec<usize> = Vec::new();
        idx.sort_by(|&a, &b| {
            let (ta, tb) = (self.elems[a].lead(), self.elems[b].lead());
            order.cmp_term(ta.pos, &ta.mono, tb.pos, &tb.mono).then(a.cmp(&b))
        });
        for &i in &idx {
            let ti = self.elems[i].lead();
            let redundant = minimal.iter().any(|&k| {
                let tk = self.elems[k].lead();
                tk.pos == ti.pos && tk.mono.divides(&ti.mono)
            });
            if !redundant {
                minimal.push(i);
            }
        }
        let mut rows: Vec<Row> = minimal.iter().map(|&i| self.elems[i].row.clone()).collect();
        let mut reps: Vec<Row> = minimal
            .iter()
            .map(|&i| self.elems[i].rep.clone().unwrap_or_default())
            .collect();
        for k in 0..rows.len() {
            let others: Vec<Row> = rows
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, r)| r.clone())
                .collect();
            let other_reps: Vec<Row> = reps
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, r)| r.clone())
                .collect();
            let mut f = rows[k].clone();
            let lead = f.pop().unwrap();
            let red = Reducer {
                order: &order,
                elems: &others,
            };
            let (mut tail, quot) = red.reduce(f, track);
            tail.push(lead);
            rows[k] = tail;
            if track {
                let back = combine(&order, &quot.unwrap(), &other_reps);
                reps[k] = sub_rows(&order, &reps[k], &back, self.nvars, self.field);
            }
        }
        let mut pairs: Vec<(Row, Row)> = rows.into_iter().zip(reps).collect();
        pairs.sort_by(|(a, _), (b, _)| {
            let (ta, tb) = (a.last().unwrap(), b.last().unwrap());
            order.cmp_term(tb.pos, &tb.mono, ta.pos, &ta.mono)
        });
        let (rows, reps): (Vec<Row>, Vec<Row>) = pairs.into_iter().unzip();
        (rows, track.then_some(reps))
    }
}

/// Reduced Gröbner basis of the submodule generated by `gens` (all of rank `rank`).
pub fn groebner_basis(
    ring: &PolyRing,
    rank: usize,
    gens: &[FreeModElem],
    order: TermOrder,
) -> Result<Vec<FreeModElem>> {
    Ok(GroebnerBasis::compute(ring, rank, gens, order)?.elements())
}

/// Full reduction of `e` by `basis`. The caller guarantees `basis` is a Gröbner basis
/// for `order`; this is not checked.
pub fn normal_form(
    ring: &PolyRing,
    e: &FreeModElem,
    basis: &[FreeModElem],
    order: TermOrder,
) -> Result<FreeModElem> {
    check_elems(ring, e.len(), std::slice::from_ref(e))?;
    let gb = GroebnerBasis::from_basis(ring, e.len(), basis, order)?;
    Ok(gb.reduce(e))
}

/// Generators of the syzygy module of `gens` as the rows of a matrix with
/// `gens.len()` columns.
pub fn syzygies(ring: &PolyRing, rank: usize, gens: &[FreeModElem]) -> Result<PresMatrix> {
    let gb = GroebnerBasis::compute_tracked(ring, rank, gens, TermOrder::default())?;
    Ok(PresMatrix::new(gens.len(), gb.syzygies(gens)))
}

/// Generators of the kernel of `P^r -> P^s / target_relations`, where row `i` of `f`
/// is the image of the `i`-th basis vector.
pub fn module_kernel(
    ring: &PolyRing,
    f: &PresMatrix,
    target_relations: &PresMatrix,
) -> Result<PresMatrix> {
    if f.ncols != target_relations.ncols {
        return Err(Error::DimensionMismatch(format!(
            "map into rank {} but relations of rank {}",
            f.ncols, target_relations.ncols
        )));
    }
    let r = f.nrows();
    let mut gens = f.rows.clone();
    gens.extend(target_relations.rows.iter().cloned());
    let syz = syzygies(ring, f.ncols, &gens)?;
    let mut rows: Vec<FreeModElem> = Vec::new();
    for s in syz.rows {
        let head: FreeModElem = s[..r].to_vec();
        if head.iter().any(|p| !p.is_zero()) && !rows.contains(&head) {
            rows.push(head);
        }
    }
    Ok(PresMatrix::new(r, rows))
}

/// An ideal given by generators in a polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresIdeal {
    pub ring: PolyRing,
    pub gens: Vec<Poly>,
}

impl PresIdeal {
    pub fn new(ring: PolyRing, gens: Vec<Poly>) -> Result<PresIdeal> {
        for g in &gens {
            ring.check(g)?;
        }
        Ok(PresIdeal { ring, gens })
    }

    pub fn groebner(&self) -> GroebnerBasis {
        let gens: Vec<FreeModElem> = self.gens.iter().map(|g| vec![g.clone()]).collect();
        GroebnerBasis::compute(&self.ring, 1, &gens, TermOrder::default())
            .expect("generators were checked at construction")
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.groebner().contains(std::slice::from_ref(p))
    }

    pub fn is_zero(&self) -> bool {
        self.gens.iter().all(Poly::is_zero)
    }
}

/// True iff `1` lies in the ideal.
pub fn ideal_contains_one(ideal: &PresIdeal) -> bool {
    ideal.contains(&ideal.ring.one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qxy() -> PolyRing {
        PolyRing::with_standard_names(Field::Rationals, 2)
    }

    fn el(r: &PolyRing, s: &[&str]) -> FreeModElem {
        s.iter().map(|t| r.parse(t).unwrap()).collect()
    }

    #[test]
    fn basis_of_monomial_ideal() {
        let r = qxy();
        let gens = vec![el(&r, &["x0^2"]), el(&r, &["x0*x1"])];
        let gb = groebner_basis(&r, 1, &gens, TermOrder::default()).unwrap();
        assert_eq!(gb.len(), 2);
        assert!(gb.contains(&el(&r, &["x0^2"])));
        assert!(gb.contains(&el(&r, &["x0*x1"])));
    }

    #[test]
    fn degenerate_inputs() {
        let r = qxy();
        assert!(groebner_basis(&r, 1, &[], TermOrder::default()).unwrap().is_empty());
        let one = PolyRing::with_standard_names(Field::Rationals, 1);
        let gb = groebner_basis(&one, 1, &[el(&one, &["1"])], TermOrder::default()).unwrap();
        assert_eq!(gb, vec![el(&one, &["1"])]);
        assert!(groebner_basis(&r, 0, &[], TermOrder::default()).unwrap().is_empty());
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let r = qxy();
        let other = PolyRing::with_standard_names(Field::Rationals, 3);
        let gens = vec![el(&r, &["x0"]), el(&other, &["x2"])];
        assert!(matches!(
            groebner_basis(&r, 1, &gens, TermOrder::default()),
            Err(Error::RingMismatch(_))
        ));
        let f2 = PolyRing::with_standard_names(Field::prime(2).unwrap(), 2);
        let gens = vec![el(&r, &["x0"]), el(&f2, &["x1"])];
        assert!(groebner_basis(&r, 1, &gens, TermOrder::default()).is_err());
    }

    #[test]
    fn normal_form_by_hand() {
        let r = qxy();
        let basis = groebner_basis(&r, 1, &[el(&r, &["x0^2"])], TermOrder::default()).unwrap();
        let nf = normal_form(&r, &el(&r, &["x0^2 + x1"]), &basis, TermOrder::default()).unwrap();
        assert_eq!(nf, el(&r, &["x1"]));
        let nf = normal_form(&r, &el(&r, &["0"]), &basis, TermOrder::default()).unwrap();
        assert!(nf[0].is_zero());
    }

    #[test]
    fn syzygy_examples() {
        let r = qxy();
        let syz = syzygies(&r, 1, &[el(&r, &["x0"]), el(&r, &["x1"])]).unwrap();
        let gb = GroebnerBasis::compute(&r, 2, &syz.rows, TermOrder::default()).unwrap();
        assert!(gb.contains(&el(&r, &["x1", "-x0"])));
        for s in &syz.rows {
            let dot = s[0].mul(&r.var(0)).add(&s[1].mul(&r.var(1)));
            assert!(dot.is_zero());
        }
        let syz = syzygies(&r, 1, &[el(&r, &["1"])]).unwrap();
        assert!(syz.rows.is_empty());
        let syz = syzygies(&r, 1, &[el(&r, &["x0"]), el(&r, &["x0"])]).unwrap();
        let gb = GroebnerBasis::compute(&r, 2, &syz.rows, TermOrder::default()).unwrap();
        assert!(gb.contains(&el(&r, &["1", "-1"])));
    }

    #[test]
    fn kernel_examples() {
        let r = qxy();
        let id = PresMatrix::new(2, vec![el(&r, &["1", "0"]), el(&r, &["0", "1"])]);
        assert!(module_kernel(&r, &id, &PresMatrix::empty(2)).unwrap().is_empty());
        let f = PresMatrix::new(1, vec![el(&r, &["x0"]), el(&r, &["x1"])]);
        let k = module_kernel(&r, &f, &PresMatrix::empty(1)).unwrap();
        let gb = GroebnerBasis::compute(&r, 2, &k.rows, TermOrder::default()).unwrap();
        assert!(gb.contains(&el(&r, &["x1", "-x0"])));
        let zero = PresMatrix::new(1, vec![el(&r, &["0"])]);
        let k = module_kernel(&r, &zero, &PresMatrix::empty(1)).unwrap();
        assert_eq!(k.rows, vec![el(&r, &["1"])]);
        assert!(module_kernel(&r, &zero, &PresMatrix::empty(2)).is_err());
    }

    #[test]
    fn unit_ideal_detection() {
        let q1 = PolyRing::with_standard_names(Field::Rationals, 1);
        let i = PresIdeal::new(q1.clone(), vec![q1.parse("x0").unwrap(), q1.parse("x0+1").unwrap()]).unwrap();
        assert!(ideal_contains_one(&i));
        let r = qxy();
        let i = PresIdeal::new(r.clone(), vec![r.var(0), r.var(1)]).unwrap();
        assert!(!ideal_contains_one(&i));
        let f2 = PolyRing::with_standard_names(Field::prime(2).unwrap(), 1);
        let i = PresIdeal::new(f2.clone(), vec![f2.parse("x0^2 + 1").unwrap()]).unwrap();
        assert!(!ideal_contains_one(&i));
    }

    #[test]
    fn lift_recovers_coefficients() {
        let r = qxy();
        let gens = vec![el(&r, &["x0", "x1"]), el(&r, &["x1", "0"])];
        let gb = GroebnerBasis::compute_tracked(&r, 2, &gens, TermOrder::default()).unwrap();
        let target = el(&r, &["x0^2 + x1^2", "x0*x1"]);
        let c = gb.lift(&target).unwrap();
        let mut sum = vec![r.zero(), r.zero()];
        for (ci, g) in c.iter().zip(&gens) {
            for k in 0..2 {
                sum[k] = sum[k].add(&ci.mul(&g[k]));
            }
        }
        assert_eq!(sum, target);
        assert!(gb.lift(&el(&r, &["1", "0"])).is_none());
    }

    #[test]
    fn module_product_criterion_is_not_applied() {
        // x*e1 + e2 and y*e1 have coprime leads but their S-vector y*e2 is new
        let r = qxy();
        let gens = vec![el(&r, &["x0", "1"]), el(&r, &["x1", "0"])];
        let gb = GroebnerBasis::compute(&r, 2, &gens, TermOrder::default()).unwrap();
        assert!(gb.contains(&el(&r, &["0", "x1"])));
    }
}
