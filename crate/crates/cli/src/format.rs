//! Input files. Every file is TOML with a `kind` key selecting one of the layouts
//! below; polynomial entries are strings. See `corpus/README.md` for the grammar.

use std::fmt::Write as _;
use std::ops::Range;
use std::sync::Arc;

use qcquiver::charts::Vertex;
use qcquiver::closure::SectionSet;
use qcquiver::hill::FilteredModule;
use qcquiver::sheaf::{build_proj_quiver, from_graded};
use qcquiver::{
    Field, GradedModule, LMatrix, LaurentPoly, Poly, PolyRing, PresMatrix, PresentedModule,
    ProjQuiver, SheafRep,
};
use serde::Deserialize;
use toml::Spanned;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: semantic error: {message}")]
    Semantic { line: usize, message: String },
}

impl InputError {
    pub fn code(&self) -> &'static str {
        match self {
            InputError::Syntax { .. } => "syntax",
            InputError::Semantic { .. } => "semantic",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            InputError::Syntax { message, .. } | InputError::Semantic { message, .. } => message,
        }
    }

    pub fn line(&self) -> usize {
        match self {
            InputError::Syntax { line, .. } | InputError::Semantic { line, .. } => *line,
        }
    }
}

type Parsed<T> = Result<T, InputError>;

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn line(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    fn line_of(&self, span: &Range<usize>) -> usize {
        self.line(span.start)
    }

    fn syntax(&self, span: &Range<usize>, message: impl Into<String>) -> InputError {
        InputError::Syntax {
            line: self.line_of(span),
            message: message.into(),
        }
    }

    fn semantic(&self, span: &Range<usize>, message: impl Into<String>) -> InputError {
        InputError::Semantic {
            line: self.line_of(span),
            message: message.into(),
        }
    }

    /// Polynomial text in `ring`. Text that is well formed over some known variable
    /// names but uses variables foreign to `ring` is a semantic error.
    fn poly(&self, ring: &PolyRing, s: &Spanned<String>) -> Parsed<Poly> {
        ring.parse(s.get_ref()).map_err(|e| {
            let mut names: Vec<String> = Vec::new();
            for i in 0..=30 {
                for p in ["x", "z", "u"] {
                    names.push(format!("{p}{i}"));
                }
            }
            names.push("s".into());
            if PolyRing::new(ring.field, names).parse(s.get_ref()).is_ok() {
                self.semantic(
                    &s.span(),
                    format!("`{}` uses variables outside {}", s.get_ref(), ring.names.join(", ")),
                )
            } else {
                self.syntax(&s.span(), e.to_string())
            }
        })
    }
}

fn decode<'de, T: Deserialize<'de>>(text: &'de str) -> Parsed<T> {
    toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(1);
        InputError::Syntax {
            line,
            message: e.message().to_string(),
        }
    })
}

/// The `kind` key of a file.
pub fn file_kind(text: &str) -> Parsed<String> {
    let t: toml::Table = decode(text)?;
    match t.get("kind") {
        Some(toml::Value::String(k)) => Ok(k.clone()),
        _ => Err(InputError::Syntax {
            line: 1,
            message: "missing string key `kind`".into(),
        }),
    }
}

pub fn parse_field(s: &str) -> Result<Field, String> {
    match s.trim() {
        "Q" | "QQ" => Ok(Field::Rationals),
        t => {
            let p = t
                .strip_prefix("Fp:")
                .or_else(|| t.strip_prefix("F"))
                .ok_or_else(|| format!("unknown field `{s}`; expected Q or Fp:<p>"))?;
            let p: u64 = p.parse().map_err(|_| format!("bad characteristic in `{s}`"))?;
            Field::prime(p).map_err(|e| e.to_string())
        }
    }
}

pub fn field_name(f: Field) -> String {
    match f {
        Field::Rationals => "Q".into(),
        Field::Prime(p) => format!("Fp:{p}"),
    }
}

fn resolve_field(src: &Source, raw: &Option<Spanned<String>>, over: Option<Field>) -> Parsed<Field> {
    if let Some(f) = over {
        return Ok(f);
    }
    match raw {
        None => Ok(Field::Rationals),
        Some(s) => parse_field(s.get_ref()).map_err(|m| src.semantic(&s.span(), m)),
    }
}

fn expect_kind(src: &Source, kind: &Spanned<String>, want: &[&str]) -> Parsed<()> {
    if want.contains(&kind.get_ref().as_str()) {
        Ok(())
    } else {
        Err(src.semantic(
            &kind.span(),
            format!("expected kind {}, found `{}`", want.join(" or "), kind.get_ref()),
        ))
    }
}

fn vertex(src: &Source, s: &Spanned<String>) -> Parsed<Vertex> {
    s.get_ref()
        .parse()
        .map_err(|e: qcquiver::Error| src.syntax(&s.span(), e.to_string()))
}

type RawRow = Vec<Spanned<String>>;

fn rows(src: &Source, ring: &PolyRing, raw: &[RawRow], width: usize, what: &str) -> Parsed<Vec<Vec<Poly>>> {
    raw.iter()
        .map(|r| {
            if r.len() != width {
                let span = r.first().map(Spanned::span).unwrap_or(0..0);
                return Err(src.semantic(
                    &span,
                    format!("{what} row has {} entries, expected {width}", r.len()),
                ));
            }
            r.iter().map(|p| src.poly(ring, p)).collect()
        })
        .collect()
}

// ---------------------------------------------------------------- sheaves

struct RawHeader {
    kind: Spanned<String>,
    field: Option<Spanned<String>>,
    n: Spanned<usize>,
    ideal: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVertex {
    chart: Spanned<String>,
    gens: usize,
    #[serde(default)]
    relations: Vec<RawRow>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    from: Spanned<String>,
    to: Spanned<String>,
    matrix: Vec<RawRow>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSheaf {
    kind: Spanned<String>,
    field: Option<Spanned<String>>,
    n: Spanned<usize>,
    #[serde(default)]
    ideal: Vec<Spanned<String>>,
    #[serde(default)]
    vertex: Vec<Spanned<RawVertex>>,
    #[serde(default)]
    edge: Vec<Spanned<RawEdge>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraded {
    kind: Spanned<String>,
    field: Option<Spanned<String>>,
    n: Spanned<usize>,
    #[serde(default)]
    ideal: Vec<Spanned<String>>,
    degrees: Vec<i64>,
    #[serde(default)]
    relations: Vec<RawRow>,
}

fn quiver(src: &Source, h: &RawHeader, over: Option<Field>) -> Parsed<Arc<ProjQuiver>> {
    let field = resolve_field(src, &h.field, over)?;
    let amb = qcquiver::charts::ambient_ring(field, *h.n.get_ref());
    let ideal = h.ideal.iter().map(|g| src.poly(&amb, g)).collect::<Parsed<Vec<_>>>()?;
    build_proj_quiver(field, *h.n.get_ref(), &ideal)
        .map(Arc::new)
        .map_err(|e| src.semantic(&h.n.span(), e.to_string()))
}

/// A graded module together with the quiver it lives on.
#[derive(Clone, Debug)]
pub struct GradedInput {
    pub quiver: Arc<ProjQuiver>,
    pub module: GradedModule,
}

/// A sheaf file: either explicit charts and edges or a graded module.
#[derive(Clone, Debug)]
pub struct SheafInput {
    pub rep: SheafRep,
    pub graded: Option<GradedModule>,
}

pub fn parse_graded(text: &str, over: Option<Field>) -> Parsed<GradedInput> {
    let src = Source { text };
    let raw: RawGraded = decode(text)?;
    let h = RawHeader {
        kind: raw.kind,
        field: raw.field,
        n: raw.n,
        ideal: raw.ideal,
    };
    expect_kind(&src, &h.kind, &["graded"])?;
    let q = quiver(&src, &h, over)?;
    let amb = q.ambient();
    let relations = rows(&src, &amb, &raw.relations, raw.degrees.len(), "relation")?;
    let module = GradedModule {
        degrees: raw.degrees,
        relations,
    };
    for (r, raw_row) in module.relations.iter().zip(&raw.relations) {
        if let Err(e) = module.row_degree(r) {
            let span = raw_row.first().map(Spanned::span).unwrap_or(0..0);
            return Err(src.semantic(&span, e.to_string()));
        }
    }
    Ok(GradedInput { quiver: q, module })
}

pub fn parse_sheaf(text: &str, over: Option<Field>) -> Parsed<SheafInput> {
    let kind = file_kind(text)?;
    if kind == "graded" {
        let g = parse_graded(text, over)?;
        let rep = from_graded(&g.quiver, &g.module).map_err(|e| InputError::Semantic {
            line: 1,
            message: e.to_string(),
        })?;
        return Ok(SheafInput {
            rep,
            graded: Some(g.module),
        });
    }
    let src = Source { text };
    let raw: RawSheaf = decode(text)?;
    let h = RawHeader {
        kind: raw.kind,
        field: raw.field,
        n: raw.n,
        ideal: raw.ideal,
    };
    expect_kind(&src, &h.kind, &["sheaf", "graded"])?;
    let q = quiver(&src, &h, over)?;
    let nv = q.vertices().len();
    let mut modules: Vec<Option<PresentedModule>> = vec![None; nv];
    for entry in &raw.vertex {
        let span = entry.span();
        let rv = entry.get_ref();
        let v = vertex(&src, &rv.chart)?;
        let i = q
            .vertex_index(v)
            .ok_or_else(|| src.semantic(&span, format!("{v} is not a chart of P^{}", q.n())))?;
        if modules[i].is_some() {
            return Err(src.semantic(&span, format!("chart {v} listed twice")));
        }
        let ring = q.ring(i).clone();
        let rels = rows(&src, ring.poly_ring(), &rv.relations, rv.gens, "relation")?;
        let m = PresentedModule::new(ring, rv.gens, rels)
            .map_err(|e| src.semantic(&span, e.to_string()))?;
        modules[i] = Some(m);
    }
    let modules = modules
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            m.ok_or_else(|| src.semantic(&(0..0), format!("chart {} is missing", q.vertices()[i])))
        })
        .collect::<Parsed<Vec<_>>>()?;
    let ne = q.edges().len();
    let mut maps: Vec<Option<PresMatrix>> = vec![None; ne];
    let mut edge_lines = vec![1usize; ne];
    for entry in &raw.edge {
        let span = entry.span();
        let re = entry.get_ref();
        let (s, t) = (vertex(&src, &re.from)?, vertex(&src, &re.to)?);
        let e = q
            .edge_index(s, t)
            .ok_or_else(|| src.semantic(&span, format!("{s}->{t} is not a generating edge")))?;
        if maps[e].is_some() {
            return Err(src.semantic(&span, format!("edge {s}->{t} listed twice")));
        }
        let (si, ti) = q.endpoints(e);
        let (rows_expected, cols) = (modules[si].ngens(), modules[ti].ngens());
        if re.matrix.len() != rows_expected {
            return Err(src.semantic(
                &span,
                format!("edge {s}->{t}: {} rows, expected {rows_expected}", re.matrix.len()),
            ));
        }
        let m = rows(&src, q.ring(ti).poly_ring(), &re.matrix, cols, "matrix")?;
        maps[e] = Some(PresMatrix::new(cols, m));
        edge_lines[e] = src.line_of(&span);
    }
    let maps = maps
        .into_iter()
        .enumerate()
        .map(|(e, m)| m.ok_or_else(|| src.semantic(&(0..0), format!("edge {} is missing", q.edges()[e]))))
        .collect::<Parsed<Vec<_>>>()?;
    let rep = SheafRep::new(q.clone(), modules, maps).map_err(|err| {
        let msg = err.to_string();
        // point at the first edge the message names
        let line = q
            .edges()
            .iter()
            .enumerate()
            .filter_map(|(e, edge)| msg.find(&edge.to_string()).map(|pos| (pos, edge_lines[e])))
            .min()
            .map_or(1, |(_, l)| l);
        InputError::Semantic { line, message: msg }
    })?;
    Ok(SheafInput { rep, graded: None })
}

fn header_text(out: &mut String, kind: &str, q: &ProjQuiver) {
    let amb = q.ambient();
    let ideal: Vec<String> = q.ideal().iter().map(|g| format!("\"{}\"", amb.format(g))).collect();
    let _ = writeln!(out, "kind = \"{kind}\"");
    let _ = writeln!(out, "field = \"{}\"", field_name(q.field()));
    let _ = writeln!(out, "n = {}", q.n());
    let _ = writeln!(out, "ideal = [{}]", ideal.join(", "));
}

fn rows_text(ring: &PolyRing, rows: &[Vec<Poly>]) -> String {
    let inner: Vec<String> = rows
        .iter()
        .map(|r| {
            let e: Vec<String> = r.iter().map(|p| format!("\"{}\"", ring.format(p))).collect();
            format!("[{}]", e.join(", "))
        })
        .collect();
    format!("[{}]", inner.join(", "))
}

/// Explicit layout of a representation; reparses to an equal representation.
pub fn serialize_sheaf(rep: &SheafRep) -> String {
    let q = rep.quiver();
    let mut out = String::new();
    header_text(&mut out, "sheaf", q);
    for (i, v) in q.vertices().iter().enumerate() {
        let m = rep.module(i);
        let _ = writeln!(out, "\n[[vertex]]\nchart = \"{v}\"\ngens = {}", m.ngens());
        let _ = writeln!(out, "relations = {}", rows_text(q.ring(i).poly_ring(), m.relations()));
    }
    for (e, edge) in q.edges().iter().enumerate() {
        let (_, t) = q.endpoints(e);
        let _ = writeln!(
            out,
            "\n[[edge]]\nfrom = \"{}\"\nto = \"{}\"\nmatrix = {}",
            edge.source,
            edge.target,
            rows_text(q.ring(t).poly_ring(), &rep.edge_map(e).rows)
        );
    }
    out
}

pub fn serialize_graded(q: &ProjQuiver, g: &GradedModule) -> String {
    let mut out = String::new();
    header_text(&mut out, "graded", q);
    let d: Vec<String> = g.degrees.iter().map(i64::to_string).collect();
    let _ = writeln!(out, "degrees = [{}]", d.join(", "));
    let _ = writeln!(out, "relations = {}", rows_text(&q.ambient(), &g.relations));
    out
}

/// Structural equality of two representations on equal quivers.
pub fn same_rep(a: &SheafRep, b: &SheafRep) -> bool {
    let (qa, qb) = (a.quiver(), b.quiver());
    qa.field() == qb.field()
        && qa.n() == qb.n()
        && qa.ideal() == qb.ideal()
        && a.modules() == b.modules()
        && a.edge_maps() == b.edge_maps()
}

// ---------------------------------------------------------------- sections

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    chart: Spanned<String>,
    element: RawRow,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSections {
    kind: Spanned<String>,
    #[serde(default)]
    section: Vec<Spanned<RawSection>>,
}

/// Sections of `rep`, as elements of the free modules on each chart's generators.
pub fn parse_sections(text: &str, rep: &SheafRep) -> Parsed<SectionSet> {
    let src = Source { text };
    let raw: RawSections = decode(text)?;
    expect_kind(&src, &raw.kind, &["sections"])?;
    let q = rep.quiver();
    let mut out: SectionSet = vec![Vec::new(); q.vertices().len()];
    for entry in &raw.section {
        let span = entry.span();
        let s = entry.get_ref();
        let v = vertex(&src, &s.chart)?;
        let i = q
            .vertex_index(v)
            .ok_or_else(|| src.semantic(&span, format!("{v} is not a chart of the ambient")))?;
        let m = rep.module(i);
        let row = rows(&src, q.ring(i).poly_ring(), std::slice::from_ref(&s.element), m.ngens(), "section")?;
        let x = q.ring(i).reduce_vec(&row[0]);
        out[i].push(x);
    }
    Ok(out)
}

pub fn serialize_sections(rep: &SheafRep, s: &SectionSet) -> String {
    let q = rep.quiver();
    let mut out = String::from("kind = \"sections\"\n");
    for (i, gens) in s.iter().enumerate() {
        let ring = q.ring(i).poly_ring();
        for g in gens {
            let e: Vec<String> = g.iter().map(|p| format!("\"{}\"", ring.format(p))).collect();
            let _ = writeln!(
                out,
                "\n[[section]]\nchart = \"{}\"\nelement = [{}]",
                q.vertices()[i],
                e.join(", ")
            );
        }
    }
    out
}

// ---------------------------------------------------------------- Laurent matrices

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLaurent {
    kind: Spanned<String>,
    field: Option<Spanned<String>>,
    rows: Vec<RawRow>,
}

pub fn parse_laurent_matrix(text: &str, over: Option<Field>) -> Parsed<LMatrix> {
    let src = Source { text };
    let raw: RawLaurent = decode(text)?;
    expect_kind(&src, &raw.kind, &["laurent-matrix"])?;
    let field = resolve_field(&src, &raw.field, over)?;
    let rows = raw
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| {
                    LaurentPoly::parse(field, s.get_ref()).map_err(|e| src.syntax(&s.span(), e.to_string()))
                })
                .collect()
        })
        .collect::<Parsed<Vec<Vec<_>>>>()?;
    LMatrix::new(field, rows).map_err(|e| InputError::Semantic {
        line: 1,
        message: e.to_string(),
    })
}

pub fn serialize_laurent_matrix(m: &LMatrix) -> String {
    let rows: Vec<String> = m
        .rows
        .iter()
        .map(|r| {
            let e: Vec<String> = r.iter().map(|p| format!("\"{p}\"")).collect();
            format!("[{}]", e.join(", "))
        })
        .collect();
    format!(
        "kind = \"laurent-matrix\"\nfield = \"{}\"\nrows = [{}]\n",
        field_name(m.field),
        rows.join(", ")
    )
}

// ---------------------------------------------------------------- filtered modules

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFiltered {
    kind: Spanned<String>,
    p: Spanned<u32>,
    dim: usize,
    operator: Option<Vec<Vec<u32>>>,
    blocks: Vec<Vec<Vec<u32>>>,
    #[serde(default)]
    remove: Vec<Spanned<Vec<usize>>>,
}

/// A filtered module with optional members to drop from its family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HillInput {
    pub module: FilteredModule,
    /// Supports whose generated submodules are removed after the family is built.
    pub remove: Vec<Vec<usize>>,
}

pub fn parse_filtered(text: &str, over: Option<Field>) -> Parsed<HillInput> {
    let src = Source { text };
    let raw: RawFiltered = decode(text)?;
    expect_kind(&src, &raw.kind, &["filtered-module"])?;
    let p = match over {
        Some(Field::Prime(p)) => p,
        Some(Field::Rationals) => {
            return Err(src.semantic(&raw.p.span(), "filtered modules need a prime field"))
        }
        None => *raw.p.get_ref(),
    };
    let module = FilteredModule::new(p, raw.dim, raw.operator, raw.blocks)
        .map_err(|e| src.semantic(&raw.p.span(), e.to_string()))?;
    for r in &raw.remove {
        if let Some(b) = r.get_ref().iter().find(|b| **b >= module.sigma()) {
            return Err(src.semantic(&r.span(), format!("block {b} does not exist")));
        }
    }
    Ok(HillInput {
        module,
        remove: raw.remove.into_iter().map(Spanned::into_inner).collect(),
    })
}

pub fn serialize_filtered(h: &HillInput) -> String {
    let m = &h.module;
    let vecs = |vs: &[Vec<u32>]| {
        let v: Vec<String> = vs
            .iter()
            .map(|v| format!("[{}]", v.iter().map(u32::to_string).collect::<Vec<_>>().join(", ")))
            .collect();
        format!("[{}]", v.join(", "))
    };
    let mut out = format!("kind = \"filtered-module\"\np = {}\ndim = {}\n", m.p(), m.dim());
    if let Some(op) = m.operator() {
        let _ = writeln!(out, "operator = {}", vecs(op));
    }
    let blocks: Vec<String> = m.blocks().iter().map(|b| vecs(b)).collect();
    let _ = writeln!(out, "blocks = [{}]", blocks.join(", "));
    if !h.remove.is_empty() {
        let r: Vec<String> = h
            .remove
            .iter()
            .map(|s| format!("[{}]", s.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")))
            .collect();
        let _ = writeln!(out, "remove = [{}]", r.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcquiver::sheaf::{structure_sheaf, twist};

    fn p(n: usize) -> Arc<ProjQuiver> {
        Arc::new(build_proj_quiver(Field::Rationals, n, &[]).unwrap())
    }

    #[test]
    fn sheaf_round_trip() {
        for k in [-2, 0, 3] {
            let t = twist(&p(2), k);
            let text = serialize_sheaf(&t);
            let back = parse_sheaf(&text, None).unwrap();
            assert!(same_rep(&t, &back.rep));
            assert_eq!(serialize_sheaf(&back.rep), text);
        }
    }

    #[test]
    fn syntax_error_has_line() {
        let text = "kind = \"sheaf\"\nn = 1\nideal = [\"x0 +\"]\n";
        let e = parse_sheaf(text, None).unwrap_err();
        assert_eq!(e.code(), "syntax");
        assert_eq!(e.line(), 3);
        let e = parse_sheaf("kind = \"sheaf\"\nn = = 1\n", None).unwrap_err();
        assert_eq!((e.code(), e.line()), ("syntax", 2));
    }

    #[test]
    fn foreign_variable_is_semantic() {
        let mut text = serialize_sheaf(&structure_sheaf(&p(1)));
        text = text.replacen("matrix = [[\"1\"]]", "matrix = [[\"z0\"]]", 1);
        let e = parse_sheaf(&text, None).unwrap_err();
        assert_eq!(e.code(), "semantic");
    }

    #[test]
    fn missing_edge_is_semantic() {
        let text = serialize_sheaf(&structure_sheaf(&p(1)));
        let cut = text.rfind("[[edge]]").unwrap();
        let e = parse_sheaf(&text[..cut], None).unwrap_err();
        assert!(matches!(e, InputError::Semantic { ref message, .. } if message.contains("missing")));
    }

    #[test]
    fn field_spellings() {
        assert_eq!(parse_field("Q").unwrap(), Field::Rationals);
        assert_eq!(parse_field("Fp:5").unwrap(), Field::Prime(5));
        assert!(parse_field("Fp:6").is_err());
        assert!(parse_field("R").is_err());
    }
}
