use std::sync::Arc;

use qcquiver::bundles::{
    bundle_from_transition, lazard_chain, line_bundle_filtration, serre_cover,
    vdim_le_one_witness, BundleReport, Projectivity, ProjectivityCertificate, VdimOutcome,
};
use qcquiver::closure::{qc_closure, verify_subrep, ClosureOutcome, SubRep, WitnessMode};
use qcquiver::hill::{build_hill_family, verify_hill_properties_seeded, SetOp, Subspace};
use qcquiver::sheaf::{kernel_with_inclusion, non_isomorphic_vertices, SheafMap};
use qcquiver::{
    birkhoff_split, build_proj_quiver, is_quasi_coherent, is_vector_bundle, Error, Field,
    LMatrix, SectionSet, SheafRep,
};
use serde_json::{json, Value};

use crate::format::{self, InputError};
use crate::report::{Status, Verdict};

#[derive(Debug)]
pub enum Failure {
    Input(InputError),
    Usage(String),
    Core(Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Failure {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Core(e)
    }
}

pub struct Outcome {
    pub status: Status,
    pub verdicts: Vec<Verdict>,
    pub certificate: Value,
}

impl Outcome {
    /// Pass when every verdict passed, otherwise fail.
    pub fn from_verdicts(verdicts: Vec<Verdict>, certificate: Value) -> Outcome {
        let status = if verdicts.iter().all(|v| v.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        Outcome {
            status,
            verdicts,
            certificate,
        }
    }
}

pub type CmdResult = Result<Outcome, Failure>;

fn sections_json(rep: &SheafRep, s: &SectionSet) -> Value {
    let q = rep.quiver();
    let mut out = serde_json::Map::new();
    for (i, gens) in s.iter().enumerate() {
        let ring = q.ring(i).poly_ring();
        let g: Vec<Vec<String>> = gens
            .iter()
            .map(|g| g.iter().map(|p| ring.format(p)).collect())
            .collect();
        out.insert(q.vertices()[i].to_string(), json!(g));
    }
    Value::Object(out)
}

pub fn check_qc(text: &str, field: Option<Field>) -> CmdResult {
    let input = format::parse_sheaf(text, field)?;
    let rep = &input.rep;
    let report = is_quasi_coherent(rep)?;
    let q = rep.quiver();
    let verdicts = report
        .edges
        .iter()
        .map(|c| {
            let s = if c.surjective { "surjective" } else { "not surjective" };
            let i = if c.injective { "injective" } else { "not injective" };
            Verdict::new(format!("edge {}", c.edge), c.passes(), format!("{s}, {i}"))
        })
        .collect();
    let edges: Vec<Value> = report
        .edges
        .iter()
        .map(|c| json!({"edge": c.edge.to_string(), "surjective": c.surjective, "injective": c.injective}))
        .collect();
    Ok(Outcome::from_verdicts(
        verdicts,
        json!({
            "field": format::field_name(q.field()),
            "n": q.n(),
            "vertices": q.vertices().len(),
            "edges": edges,
            "failing_edges": report.failures().iter().map(|c| c.edge.to_string()).collect::<Vec<_>>(),
        }),
    ))
}

pub fn closure(text: &str, seed_text: &str, field: Option<Field>, max_cycles: usize) -> CmdResult {
    let input = format::parse_sheaf(text, field)?;
    let seed = format::parse_sections(seed_text, &input.rep)?;
    let ambient = Arc::new(input.rep);
    let out = qc_closure(ambient.clone(), &seed, max_cycles, WitnessMode::Generators)?;
    let trace = json!(out.trace());
    match out {
        ClosureOutcome::NotStabilized { cycles, .. } => Ok(Outcome {
            status: Status::BudgetExhausted,
            verdicts: vec![Verdict::new(
                "stabilized",
                false,
                format!("spans still growing after {cycles} cycles"),
            )],
            certificate: json!({"stabilized": false, "cycles": cycles, "trace": trace}),
        }),
        ClosureOutcome::Stabilized { sub, cycles, .. } => {
            let r = verify_subrep(&sub);
            let verdicts = vec![
                Verdict::new("stabilized", true, format!("after {cycles} cycles")),
                Verdict::new("contains seed", r.contains_seed, ""),
                Verdict::new("closed under edge maps", r.edge_closed, ""),
                Verdict::new("quasi-coherent", r.quasi_coherent, r.failures.join("; ")),
            ];
            Ok(Outcome::from_verdicts(
                verdicts,
                json!({
                    "stabilized": true,
                    "cycles": cycles,
                    "trace": trace,
                    "generators": sections_json(&ambient, &sub.gens),
                    "sections_file": format::serialize_sections(&ambient, &sub.gens),
                }),
            ))
        }
    }
}

fn certificate_json(c: &ProjectivityCertificate) -> Value {
    let ring = c.fitting.first().map(|f| f.ring.clone());
    let fitting: Vec<Value> = c
        .fitting
        .iter()
        .map(|f| {
            let basis: Vec<String> = f
                .ideal()
                .groebner()
                .elements()
                .iter()
                .map(|e| f.ring.format(&e[0]))
                .collect();
            let minors: Vec<String> = f.minors.iter().map(|p| f.ring.format(p)).collect();
            json!({"index": f.index, "minors": minors, "groebner_basis": basis})
        })
        .collect();
    let verdict = match c.verdict {
        Projectivity::Projective { rank } => json!({"projective": true, "rank": rank}),
        Projectivity::NotProjective { index } => json!({"projective": false, "nonzero_fitting_index": index}),
        Projectivity::Inconclusive => json!({"projective": null}),
    };
    json!({
        "chart": c.vertex.to_string(),
        "variables": ring.map(|r| r.poly_ring().names.clone()),
        "verdict": verdict,
        "connected_assumed": c.connected_assumed,
        "fitting": fitting,
    })
}

fn bundle_verdicts(report: &BundleReport, prefix: &str) -> Vec<Verdict> {
    report
        .certificates
        .iter()
        .map(|c| {
            let detail = match c.verdict {
                Projectivity::Projective { rank } => format!("projective of rank {rank}"),
                Projectivity::NotProjective { index } => {
                    format!(
                        "not projective: Fitting ideal {index} is nonzero while ideal {} is the unit ideal",
                        index + 1
                    )
                }
                Projectivity::Inconclusive => "inconclusive".into(),
            };
            Verdict::new(format!("{prefix}chart {}", c.vertex), c.is_projective(), detail)
        })
        .collect()
}

pub fn is_bundle(text: &str, field: Option<Field>) -> CmdResult {
    let input = format::parse_sheaf(text, field)?;
    let report = is_vector_bundle(&input.rep)?;
    let mut verdicts = bundle_verdicts(&report, "");
    verdicts.push(Verdict::new(
        "certificates re-derive",
        report.certificates.iter().all(ProjectivityCertificate::recheck),
        "",
    ));
    Ok(Outcome::from_verdicts(
        verdicts,
        json!({
            "is_bundle": report.is_bundle,
            "ranks": report.ranks(),
            "charts": report.certificates.iter().map(certificate_json).collect::<Vec<_>>(),
        }),
    ))
}

fn graded(text: &str, field: Option<Field>, command: &str) -> Result<format::GradedInput, Failure> {
    match format::file_kind(text)?.as_str() {
        "graded" => Ok(format::parse_graded(text, field)?),
        k => Err(Failure::Usage(format!(
            "{command} needs a graded presentation (kind = \"graded\"), found kind `{k}`"
        ))),
    }
}

fn map_json(phi: &SheafMap) -> Value {
    let q = phi.source().quiver();
    let mut out = serde_json::Map::new();
    for (i, v) in q.vertices().iter().enumerate() {
        let ring = q.ring(i).poly_ring();
        let rows: Vec<Vec<String>> = phi
            .matrix(i)
            .rows
            .iter()
            .map(|r| r.iter().map(|p| ring.format(p)).collect())
            .collect();
        out.insert(v.to_string(), json!(rows));
    }
    Value::Object(out)
}

pub fn serre_cover_cmd(text: &str, field: Option<Field>) -> CmdResult {
    let g = graded(text, field, "serre-cover")?;
    let c = serre_cover(&g.quiver, &g.module)?;
    let bad = qcquiver::bundles::non_surjective_vertices(&c.cover);
    let q = &g.quiver;
    let qc = is_quasi_coherent(&c.sheaf)?.is_quasi_coherent();
    let verdicts = vec![
        Verdict::new(
            "cover is surjective on every chart",
            bad.is_empty(),
            bad.iter().map(|v| q.vertices()[*v].to_string()).collect::<Vec<_>>().join(", "),
        ),
        Verdict::new("sheaf is quasi-coherent", qc, ""),
    ];
    Ok(Outcome::from_verdicts(
        verdicts,
        json!({
            "twists": c.twists,
            "cover": map_json(&c.cover),
            "sheaf_file": format::serialize_sheaf(&c.sheaf),
        }),
    ))
}

fn witness_verdicts(out: &VdimOutcome) -> (Vec<Verdict>, Value) {
    match out {
        VdimOutcome::Witness(w) => {
            let e = &w.exactness;
            let mut verdicts = vec![
                Verdict::new("kernel inclusion is injective", e.injective, ""),
                Verdict::new("exact in the middle", e.middle, ""),
                Verdict::new("cover is surjective", e.surjective, ""),
            ];
            verdicts.extend(bundle_verdicts(&w.kernel_certificates, "kernel "));
            verdicts.extend(bundle_verdicts(&w.middle_certificates, "middle "));
            verdicts.push(Verdict::new("witness re-verifies", w.recheck(), ""));
            let cert = json!({
                "witness": true,
                "kernel_ranks": w.kernel_certificates.ranks(),
                "middle_ranks": w.middle_certificates.ranks(),
                "kernel_file": format::serialize_sheaf(&w.kernel),
                "inclusion": map_json(&w.inclusion),
                "kernel_certificates": w.kernel_certificates.certificates.iter().map(certificate_json).collect::<Vec<_>>(),
                "middle_certificates": w.middle_certificates.certificates.iter().map(certificate_json).collect::<Vec<_>>(),
            });
            (verdicts, cert)
        }
        VdimOutcome::Failure {
            vertex,
            in_kernel,
            certificate,
        } => {
            let which = if *in_kernel { "kernel" } else { "middle term" };
            let verdicts = vec![Verdict::new(
                format!("{which} is a vector bundle"),
                false,
                format!("not projective at chart {vertex}"),
            )];
            let cert = json!({"witness": false, "chart": vertex.to_string(), "in_kernel": in_kernel,
                "certificate": certificate_json(certificate)});
            (verdicts, cert)
        }
    }
}

pub fn vdim_witness(text: &str, field: Option<Field>) -> CmdResult {
    let g = graded(text, field, "vdim-witness")?;
    let c = serre_cover(&g.quiver, &g.module)?;
    let out = vdim_le_one_witness(&c.cover)?;
    let (verdicts, mut cert) = witness_verdicts(&out);
    cert["twists"] = json!(c.twists);
    Ok(Outcome::from_verdicts(verdicts, cert))
}

fn same_sub(a: &SubRep, b: &SubRep) -> bool {
    a.gens
        .iter()
        .zip(&b.gens)
        .enumerate()
        .all(|(v, (x, y))| a.ambient.module(v).same_span(x, y))
}

pub fn lazard(text: &str, field: Option<Field>, max_cycles: usize) -> CmdResult {
    let g = graded(text, field, "lazard")?;
    let c = serre_cover(&g.quiver, &g.module)?;
    let (_, inclusion) = kernel_with_inclusion(&c.cover)?;
    let kernel = inclusion.source().clone();
    let q = g.quiver.clone();
    let top = q.vertices().len() - 1;
    // nested subs: zero, closures of growing sets of kernel generators on the
    // largest chart, then the whole kernel
    let zero = SubRep {
        ambient: kernel.clone(),
        gens: vec![Vec::new(); q.vertices().len()],
        seed: vec![Vec::new(); q.vertices().len()],
    };
    let mut subs = vec![zero];
    let m = kernel.module(top).ngens();
    for k in 1..m {
        let mut seed: SectionSet = vec![Vec::new(); q.vertices().len()];
        seed[top] = (0..k).map(|i| kernel.module(top).generator(i)).collect();
        let out = qc_closure(kernel.clone(), &seed, max_cycles, WitnessMode::Generators)?;
        if let ClosureOutcome::Stabilized { sub, .. } = out {
            let bundle = is_vector_bundle(&sub.induced_rep()?)?.is_bundle;
            if bundle && !same_sub(subs.last().unwrap(), &sub) {
                subs.push(sub);
            }
        }
    }
    let full = SubRep::full(kernel.clone());
    if !same_sub(subs.last().unwrap(), &full) {
        subs.push(full);
    }
    let block: Vec<usize> = (0..c.twists.len()).collect();
    let stages = lazard_chain(&c.cover, &inclusion, &subs, &block)?;
    let mut verdicts = Vec::new();
    let mut stage_json = Vec::new();
    for (i, s) in stages.iter().enumerate() {
        let w = s.witness.witness();
        verdicts.push(Verdict::new(format!("stage {i} quasi-coherent"), s.quasi_coherent, ""));
        verdicts.push(Verdict::new(
            format!("stage {i} has a re-verified kernel witness"),
            w.is_some_and(|w| w.recheck()),
            "",
        ));
        let bad: Vec<String> = non_isomorphic_vertices(&s.to_target)
            .iter()
            .map(|v| q.vertices()[*v].to_string())
            .collect();
        stage_json.push(json!({
            "sub_generators": subs[i].gens.iter().map(Vec::len).collect::<Vec<_>>(),
            "quasi_coherent": s.quasi_coherent,
            "is_isomorphism": s.is_isomorphism,
            "non_isomorphic_charts": bad,
            "sheaf_file": format::serialize_sheaf(&s.sheaf),
        }));
    }
    let last = stages.last().expect("the chain is never empty");
    verdicts.push(Verdict::new(
        "final stage maps isomorphically onto the input",
        last.is_isomorphism,
        format!("{} stages", stages.len()),
    ));
    Ok(Outcome::from_verdicts(
        verdicts,
        json!({"twists": c.twists, "block": block, "stages": stage_json}),
    ))
}

fn matrix_strings(m: &LMatrix) -> Vec<Vec<String>> {
    m.rows.iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect()
}

pub fn split_p1(text: &str, field: Option<Field>) -> CmdResult {
    let t = format::parse_laurent_matrix(text, field)?;
    let sp = birkhoff_split(&t)?;
    let deg = t.det().as_monomial().map(|(_, e)| e);
    let sum: i64 = sp.exponents.iter().sum();
    let verdicts = vec![
        Verdict::new("L * T * R is diagonal", sp.verify(&t), format!("type {:?}", sp.exponents)),
        Verdict::new(
            "exponents sum to the determinant degree",
            deg == Some(sum),
            format!("sum {sum}, det degree {deg:?}"),
        ),
    ];
    Ok(Outcome::from_verdicts(
        verdicts,
        json!({
            "type": sp.exponents,
            "det_degree": deg,
            "left": matrix_strings(&sp.left),
            "right": matrix_strings(&sp.right),
        }),
    ))
}

fn p1_bundle(text: &str, field: Option<Field>) -> Result<SheafRep, Failure> {
    if format::file_kind(text)? == "laurent-matrix" {
        let t = format::parse_laurent_matrix(text, field)?;
        let q = Arc::new(build_proj_quiver(t.field, 1, &[])?);
        return Ok(bundle_from_transition(&q, &t)?);
    }
    Ok(format::parse_sheaf(text, field)?.rep)
}

pub fn filter_p1(text: &str, field: Option<Field>) -> CmdResult {
    let rep = Arc::new(p1_bundle(text, field)?);
    let f = line_bundle_filtration(rep.clone())?;
    let degrees = f.quotient_degrees();
    let mut verdicts: Vec<Verdict> = f
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let r = verify_subrep(s);
            Verdict::new(format!("step {} is a quasi-coherent subsheaf", i + 1), r.passes(), r.failures.join("; "))
        })
        .collect();
    for (i, (d, a)) in degrees.iter().zip(&f.splitting.exponents).enumerate() {
        verdicts.push(Verdict::new(
            format!("quotient {} is O({a})", i + 1),
            *d == Some(*a),
            format!("transition {}", f.quotient_transitions[i]),
        ));
    }
    let steps: Vec<Value> = f.steps.iter().map(|s| sections_json(&rep, &s.gens)).collect();
    Ok(Outcome::from_verdicts(
        verdicts,
        json!({
            "type": f.splitting.exponents,
            "quotient_degrees": degrees,
            "steps": steps,
        }),
    ))
}

fn subspace_json(s: &Subspace) -> Value {
    json!({"dimension": s.dimension(), "basis": s.basis()})
}

pub fn hill_verify(text: &str, field: Option<Field>, seed: u64) -> CmdResult {
    let input = format::parse_filtered(text, field)?;
    let m = &input.module;
    let mut l = build_hill_family(m)?;
    let mut removed = Vec::new();
    for s in &input.remove {
        let gens: Vec<Vec<u32>> = s.iter().flat_map(|&a| m.blocks()[a].iter().cloned()).collect();
        let space = m.module_span(&gens);
        match l.position(&space) {
            Some(i) => {
                removed.push(subspace_json(&l.remove(i)?.space));
            }
            None => {
                return Err(Failure::Usage(format!("blocks {s:?} do not generate a member of the family")))
            }
        }
    }
    let r = verify_hill_properties_seeded(&l, seed);
    let support = |i: usize| l.members[i].support.iter().copied().collect::<Vec<_>>();
    let lattice_detail = match &r.lattice_witness {
        None => String::new(),
        Some((i, j, op)) => {
            let what = match op {
                SetOp::Sum => "sum",
                SetOp::Intersection => "intersection",
            };
            format!(
                "{what} of members {i} (blocks {:?}) and {j} (blocks {:?}) is missing",
                support(*i),
                support(*j)
            )
        }
    };
    let verdicts = vec![
        Verdict::new(
            "every stage of the filtration is a member",
            r.stages_found,
            r.missing_stage.map(|a| format!("stage {a} missing")).unwrap_or_default(),
        ),
        Verdict::new("closed under sums and intersections", r.lattice_closed, lattice_detail),
        Verdict::new(
            "quotients between nested members are filtered by blocks",
            r.filtrations_ok,
            r.filtration_failure
                .map(|(i, j)| format!("members {i} and {j}"))
                .unwrap_or_else(|| format!("{} nested pairs", r.chains.len())),
        ),
        Verdict::new(
            "every element lies in a small extension",
            r.small_extensions_ok,
            match &r.extension_failure {
                Some((i, x)) => format!("member {i}, element {x:?}"),
                None => format!(
                    "{} elements checked{}",
                    r.elements_checked,
                    if r.exhaustive { " exhaustively" } else { " by sampling" }
                ),
            },
        ),
    ];
    let family: Vec<Value> = l
        .members
        .iter()
        .map(|x| json!({"blocks": x.support, "subspace": subspace_json(&x.space)}))
        .collect();
    Ok(Outcome::from_verdicts(
        verdicts,
        json!({
            "p": m.p(),
            "dim": m.dim(),
            "blocks": m.sigma(),
            "dependencies": l.dependencies,
            "family": family,
            "removed": removed,
            "largest_extension": r.largest_extension,
            "elements_checked": r.elements_checked,
            "exhaustive": r.exhaustive,
            "lattice_witness": r.lattice_witness.as_ref().map(|(i, j, op)| json!({
                "first": i, "second": j,
                "operation": if *op == SetOp::Sum { "sum" } else { "intersection" },
            })),
        }),
    ))
}
