use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    BudgetExhausted,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
            Status::BudgetExhausted => 3,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::BudgetExhausted => "BUDGET EXHAUSTED",
            Status::Error => "ERROR",
        }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(check: impl Into<String>, passed: bool, detail: impl Into<String>) -> Verdict {
        Verdict {
            check: check.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(role: &str, path: &str, text: &str) -> InputDigest {
        let digest = Sha256::digest(text.as_bytes());
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        InputDigest {
            role: role.into(),
            path: path.into(),
            sha256,
        }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
pub struct ErrorInfo {
    pub code: String,
    pub line: Option<usize>,
    pub message: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub options: BTreeMap<String, String>,
    pub inputs: Vec<InputDigest>,
    pub status: Status,
    pub exit_code: i32,
    pub verdicts: Vec<Verdict>,
    pub certificate: Value,
    pub error: Option<ErrorInfo>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    /// Everything except timing; identical inputs give identical bodies.
    pub fn body(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn machine(&self) -> String {
        let mut v = self.body();
        v["timing"] = json!({ "elapsed_ms": self.elapsed.as_secs_f64() * 1000.0 });
        serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "qcquiver {} {} (report schema {})",
            self.tool_version, self.command, self.schema_version
        );
        for i in &self.inputs {
            let _ = writeln!(out, "{} {} sha256:{}", i.role, i.path, &i.sha256[..16]);
        }
        for v in &self.verdicts {
            let mark = if v.passed { "ok  " } else { "FAIL" };
            if v.detail.is_empty() {
                let _ = writeln!(out, "{mark} {}", v.check);
            } else {
                let _ = writeln!(out, "{mark} {}: {}", v.check, v.detail);
            }
        }
        if let Some(e) = &self.error {
            match e.line {
                Some(l) => {
                    let _ = writeln!(out, "error [{}] line {l}: {}", e.code, e.message);
                }
                None => {
                    let _ = writeln!(out, "error [{}]: {}", e.code, e.message);
                }
            }
        }
        let _ = writeln!(
            out,
            "result: {} (exit {}) in {:.1} ms",
            self.status.label(),
            self.exit_code,
            self.elapsed.as_secs_f64() * 1000.0
        );
        out
    }
}
