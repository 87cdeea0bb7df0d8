//! Engine invariants plus round-trip and determinism checks over the shipped corpus.

use qcquiver::invariants;
use serde_json::json;

use crate::commands::Outcome;
use crate::corpus::{self, CORPUS};
use crate::format::{self, InputError};
use crate::report::{Status, Verdict};
use crate::{Command, JobSpec};

fn round_trip(name: &str, text: &str) -> Result<(), String> {
    let kind = format::file_kind(text).map_err(|e| e.to_string())?;
    let ok = match kind.as_str() {
        "sheaf" => {
            let a = format::parse_sheaf(text, None).map_err(|e| e.to_string())?;
            let again = format::parse_sheaf(&format::serialize_sheaf(&a.rep), None)
                .map_err(|e| e.to_string())?;
            format::same_rep(&a.rep, &again.rep)
        }
        "graded" => {
            let a = format::parse_graded(text, None).map_err(|e| e.to_string())?;
            let again = format::parse_graded(&format::serialize_graded(&a.quiver, &a.module), None)
                .map_err(|e| e.to_string())?;
            a.module == again.module
        }
        "laurent-matrix" => {
            let a = format::parse_laurent_matrix(text, None).map_err(|e| e.to_string())?;
            a == format::parse_laurent_matrix(&format::serialize_laurent_matrix(&a), None)
                .map_err(|e| e.to_string())?
        }
        "filtered-module" => {
            let a = format::parse_filtered(text, None).map_err(|e| e.to_string())?;
            a == format::parse_filtered(&format::serialize_filtered(&a), None)
                .map_err(|e| e.to_string())?
        }
        // sections are read relative to an ambient sheaf; checked below
        "sections" => true,
        k => return Err(format!("unknown kind `{k}`")),
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{name} does not survive serialization"))
    }
}

fn sections_round_trip() -> Result<(), String> {
    let amb = format::parse_sheaf(corpus::lookup("o1_p1").unwrap(), None).map_err(|e| e.to_string())?;
    let s = format::parse_sections(corpus::lookup("sections_e01").unwrap(), &amb.rep)
        .map_err(|e| e.to_string())?;
    let again = format::parse_sections(&format::serialize_sections(&amb.rep, &s), &amb.rep)
        .map_err(|e| e.to_string())?;
    (s == again).then_some(()).ok_or_else(|| "sections differ".into())
}

/// Jobs run twice by the determinism check, with their expected exit codes.
pub fn determinism_jobs() -> Vec<(JobSpec, i32)> {
    let mut closure = JobSpec::new(Command::Closure, &["o1_p1"]);
    closure.options.seed_file = Some("sections_e01".into());
    vec![
        (JobSpec::new(Command::CheckQc, &["structure_p1"]), 0),
        (JobSpec::new(Command::CheckQc, &["twist_p2_k2"]), 0),
        (closure, 0),
        (JobSpec::new(Command::IsBundle, &["graded_skyscraper_p1"]), 1),
        (JobSpec::new(Command::VdimWitness, &["graded_o1_p1"]), 0),
        (JobSpec::new(Command::SplitP1, &["matrix_s2_s"]), 0),
        (JobSpec::new(Command::FilterP1, &["matrix_s2_s"]), 0),
        (JobSpec::new(Command::HillVerify, &["hill_dependent_f2"]), 0),
        (JobSpec::new(Command::HillVerify, &["hill_broken_f2"]), 1),
    ]
}

pub fn run(seed: u64) -> Outcome {
    let mut verdicts = Vec::new();
    let mut cases = serde_json::Map::new();
    for r in invariants::run_all(seed) {
        cases.insert(r.name.into(), json!(r.cases));
        verdicts.push(Verdict::new(
            r.name,
            r.passes(),
            if r.passes() {
                format!("{} random cases", r.cases)
            } else {
                r.failures.join("; ")
            },
        ));
    }
    let failures: Vec<String> = CORPUS
        .iter()
        .filter(|(n, _)| *n != "bad_square_p2")
        .filter_map(|(n, t)| round_trip(n, t).err().map(|e| format!("{n}: {e}")))
        .chain(sections_round_trip().err())
        .collect();
    verdicts.push(Verdict::new(
        "corpus round trip",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} files", CORPUS.len())
        } else {
            failures.join("; ")
        },
    ));
    let bad = format::parse_sheaf(corpus::lookup("bad_square_p2").unwrap(), None);
    verdicts.push(Verdict::new(
        "non-commuting square is a semantic error",
        matches!(&bad, Err(InputError::Semantic { message, .. }) if message.contains("square")),
        bad.err().map(|e| e.to_string()).unwrap_or_default(),
    ));
    let mut unstable = Vec::new();
    for (job, code) in determinism_jobs() {
        let (a, b) = (crate::run(&job), crate::run(&job));
        if a.body() != b.body() || a.exit_code != code {
            unstable.push(format!("{} {}", job.command.name(), job.inputs.join(" ")));
        }
    }
    verdicts.push(Verdict::new(
        "reports are deterministic",
        unstable.is_empty(),
        unstable.join("; "),
    ));
    let mut out = Outcome::from_verdicts(verdicts, json!({ "seed": seed, "cases": cases }));
    if out.verdicts.iter().any(|v| !v.passed) {
        out.status = Status::Fail;
    }
    out
}
