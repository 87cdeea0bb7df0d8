//! Command line front end: reads input files, runs one operation of the toolkit and
//! produces a [`Report`] with verdicts, certificates and an input digest.

pub mod commands;
pub mod corpus;
pub mod format;
pub mod report;
pub mod selftest;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qcquiver::Field;
use serde_json::Value;

use commands::Failure;
use report::{ErrorInfo, InputDigest, Report, Status, SCHEMA_VERSION};

pub const DEFAULT_MAX_CYCLES: usize = 5;
pub const DEFAULT_RAND_SEED: u64 = qcquiver::invariants::DEFAULT_SEED;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    CheckQc,
    Closure,
    IsBundle,
    SerreCover,
    VdimWitness,
    Lazard,
    SplitP1,
    FilterP1,
    HillVerify,
    Selftest,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::CheckQc,
        Command::Closure,
        Command::IsBundle,
        Command::SerreCover,
        Command::VdimWitness,
        Command::Lazard,
        Command::SplitP1,
        Command::FilterP1,
        Command::HillVerify,
        Command::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CheckQc => "check-qc",
            Command::Closure => "closure",
            Command::IsBundle => "is-bundle",
            Command::SerreCover => "serre-cover",
            Command::VdimWitness => "vdim-witness",
            Command::Lazard => "lazard",
            Command::SplitP1 => "split-p1",
            Command::FilterP1 => "filter-p1",
            Command::HillVerify => "hill-verify",
            Command::Selftest => "selftest",
        }
    }

    pub fn from_name(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }

    fn inputs(self) -> usize {
        if self == Command::Selftest {
            0
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub field: Option<Field>,
    pub max_cycles: usize,
    pub seed_file: Option<String>,
    pub out: Option<PathBuf>,
    pub machine: bool,
    pub rand_seed: u64,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            field: None,
            max_cycles: DEFAULT_MAX_CYCLES,
            seed_file: None,
            out: None,
            machine: false,
            rand_seed: DEFAULT_RAND_SEED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSpec {
    pub command: Command,
    pub inputs: Vec<String>,
    pub options: Options,
}

impl JobSpec {
    pub fn new(command: Command, inputs: &[&str]) -> JobSpec {
        JobSpec {
            command,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            options: Options::default(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let want = self.command.inputs();
        if self.inputs.len() != want {
            return Err(format!(
                "{} takes {want} input file(s), got {}",
                self.command.name(),
                self.inputs.len()
            ));
        }
        if self.options.max_cycles == 0 {
            return Err("--max-cycles must be positive".into());
        }
        match (self.command, &self.options.seed_file) {
            (Command::Closure, None) => Err("closure needs --seed-file".into()),
            (Command::Closure, Some(_)) | (_, None) => Ok(()),
            (c, Some(_)) => Err(format!("{} does not take --seed-file", c.name())),
        }
    }
}

/// Text of an input: a file on disk, or else a corpus entry of that name.
pub fn load_input(path: &str) -> Result<String, String> {
    if Path::new(path).exists() {
        return std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"));
    }
    corpus::lookup(path)
        .map(str::to_string)
        .ok_or_else(|| format!("{path}: no such file or corpus entry"))
}

fn option_map(job: &JobSpec) -> BTreeMap<String, String> {
    let o = &job.options;
    let mut m = BTreeMap::new();
    if let Some(f) = o.field {
        m.insert("field".into(), format::field_name(f));
    }
    match job.command {
        Command::Closure | Command::Lazard => {
            m.insert("max_cycles".into(), o.max_cycles.to_string());
        }
        Command::HillVerify | Command::Selftest => {
            m.insert("rand_seed".into(), o.rand_seed.to_string());
        }
        _ => {}
    }
    m
}

fn error_report(job: &JobSpec, inputs: Vec<InputDigest>, code: &str, line: Option<usize>, message: String) -> Report {
    Report {
        schema_version: SCHEMA_VERSION,
        tool_version: qcquiver::VERSION.into(),
        command: job.command.name().into(),
        options: option_map(job),
        inputs,
        status: Status::Error,
        exit_code: Status::Error.exit_code(),
        verdicts: Vec::new(),
        certificate: Value::Null,
        error: Some(ErrorInfo {
            code: code.into(),
            line,
            message,
        }),
        elapsed: Default::default(),
    }
}

pub fn run(job: &JobSpec) -> Report {
    let start = Instant::now();
    let mut report = run_inner(job);
    report.elapsed = start.elapsed();
    report
}

fn run_inner(job: &JobSpec) -> Report {
    if let Err(m) = job.validate() {
        return error_report(job, Vec::new(), "usage", None, m);
    }
    let mut digests = Vec::new();
    let mut texts = Vec::new();
    let sources = job
        .inputs
        .iter()
        .map(|p| ("input", p.as_str()))
        .chain(job.options.seed_file.as_deref().map(|p| ("seed", p)));
    for (role, path) in sources {
        match load_input(path) {
            Ok(t) => {
                digests.push(InputDigest::new(role, path, &t));
                texts.push(t);
            }
            Err(m) => return error_report(job, digests, "io", None, m),
        }
    }
    let o = &job.options;
    let text = texts.first().map(String::as_str).unwrap_or("");
    let result = match job.command {
        Command::CheckQc => commands::check_qc(text, o.field),
        Command::Closure => commands::closure(text, &texts[1], o.field, o.max_cycles),
        Command::IsBundle => commands::is_bundle(text, o.field),
        Command::SerreCover => commands::serre_cover_cmd(text, o.field),
        Command::VdimWitness => commands::vdim_witness(text, o.field),
        Command::Lazard => commands::lazard(text, o.field, o.max_cycles),
        Command::SplitP1 => commands::split_p1(text, o.field),
        Command::FilterP1 => commands::filter_p1(text, o.field),
        Command::HillVerify => commands::hill_verify(text, o.field, o.rand_seed),
        Command::Selftest => Ok(selftest::run(o.rand_seed)),
    };
    match result {
        Ok(out) => Report {
            schema_version: SCHEMA_VERSION,
            tool_version: qcquiver::VERSION.into(),
            command: job.command.name().into(),
            options: option_map(job),
            inputs: digests,
            status: out.status,
            exit_code: out.status.exit_code(),
            verdicts: out.verdicts,
            certificate: out.certificate,
            error: None,
            elapsed: Default::default(),
        },
        Err(Failure::Input(e)) => error_report(job, digests, e.code(), Some(e.line()), e.message().to_string()),
        Err(Failure::Usage(m)) => error_report(job, digests, "usage", None, m),
        Err(Failure::Core(e)) => {
            // the operation ran but its preconditions or checks failed
            let mut r = error_report(job, digests, core_code(&e), None, e.to_string());
            r.status = Status::Fail;
            r.exit_code = Status::Fail.exit_code();
            r
        }
    }
}

fn core_code(e: &qcquiver::Error) -> &'static str {
    use qcquiver::Error::*;
    match e {
        Precondition(_) => "precondition",
        NotInvertible(_) => "not-invertible",
        MalformedRep(_) => "malformed",
        SizeBound(_) | QuiverTooLarge { .. } => "size-bound",
        Internal(_) => "internal",
        _ => "invalid",
    }
}
