//! Certificate files: a verdict bound to the fingerprint of the problem it answers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use homfib::engine::{
    verify, BlockProblem, CandidateSolution, EngineError, FiberType, ObstructionCertificate, ObstructionKind,
    Provenance, Verdict,
};
use homfib::IntMatrix;
use num_bigint::BigInt;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::json::{array, field, index, int, int_value, join, matrix, matrix_value, object, parse_text, small, DocError};

pub const CERT_SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `M0:rxc:e,e,…|W:rxc:e,…|g:G|n:N` with row-major decimal entries.
pub fn canonical_problem(p: &BlockProblem) -> String {
    let enc = |name: &str, m: &IntMatrix| {
        let entries: Vec<String> = m.entries().iter().map(BigInt::to_string).collect();
        format!("{name}:{}x{}:{}", m.rows(), m.cols(), entries.join(","))
    };
    format!("{}|{}|g:{}|n:{}", enc("M0", p.m0()), enc("W", p.w()), p.fiber().g, p.fiber().n)
}

pub fn fingerprint(p: &BlockProblem) -> String {
    hex::encode(Sha256::digest(canonical_problem(p).as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateFile {
    pub tool_version: String,
    pub fingerprint: String,
    pub problem: BlockProblem,
    pub verdict: Verdict,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Valid(String),
    Invalid(String),
    /// The stored fingerprint does not name the problem it is checked against.
    Stale { stored: String, actual: String },
}

impl CertificateFile {
    pub fn new(problem: BlockProblem, verdict: Verdict, elapsed_ms: u64) -> Self {
        Self { tool_version: TOOL_VERSION.to_string(), fingerprint: fingerprint(&problem), problem, verdict, elapsed_ms }
    }

    pub fn to_value(&self) -> Value {
        let p = &self.problem;
        json!({
            "schema_version": CERT_SCHEMA_VERSION,
            "tool_version": self.tool_version,
            "fingerprint": self.fingerprint,
            "problem": {
                "m0": matrix_value(p.m0()),
                "w": matrix_value(p.w()),
                "fiber": {"g": p.fiber().g, "n": p.fiber().n},
            },
            "verdict": verdict_value(&self.verdict),
            "timing": {"elapsed_ms": self.elapsed_ms},
        })
    }

    pub fn parse(text: &str) -> Result<Self, DocError> {
        let v = parse_text(text)?;
        let map = object(&v, "", &["schema_version", "tool_version", "fingerprint", "problem", "verdict", "timing"])?;
        let version: u32 = small(field(map, "", "schema_version")?, "schema_version", "a schema version")?;
        if version != CERT_SCHEMA_VERSION {
            return Err(DocError::new("schema_version", format!("unsupported version {version}")));
        }
        let tool_version = string(field(map, "", "tool_version")?, "tool_version")?;
        let fingerprint = string(field(map, "", "fingerprint")?, "fingerprint")?;
        let problem = problem(field(map, "", "problem")?, "problem")?;
        let verdict = verdict(field(map, "", "verdict")?, "verdict", &problem)?;
        let timing = object(field(map, "", "timing")?, "timing", &["elapsed_ms"])?;
        let elapsed_ms: u64 = small(field(timing, "timing", "elapsed_ms")?, "timing.elapsed_ms", "milliseconds")?;
        Ok(Self { tool_version, fingerprint, problem, verdict, elapsed_ms })
    }

    pub fn read(path: &Path) -> Result<Self, DocError> {
        let text = fs::read_to_string(path).map_err(|e| DocError::new("", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Writes `<dir>/<fingerprint prefix>-<fiber>.cert.json` via a temporary file and a rename.
    pub fn write_atomic(&self, dir: &Path) -> std::io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let f = self.problem.fiber();
        let name = format!("{}-g{}n{}.cert.json", &self.fingerprint[..16], f.g, f.n);
        let target = dir.join(&name);
        let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
        let mut text = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        text.push('\n');
        {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(text.as_bytes())?;
            file.sync_all()?;
        }
        fs::rename(&tmp, &target)?;
        Ok(target)
    }

    /// Rechecks the verdict. With `expected`, the certificate must also be for that problem.
    pub fn check(&self, expected: Option<&BlockProblem>, budget: u64) -> Result<CheckOutcome, EngineError> {
        let actual = fingerprint(&self.problem);
        if actual != self.fingerprint {
            return Ok(CheckOutcome::Stale { stored: self.fingerprint.clone(), actual });
        }
        if let Some(e) = expected {
            let wanted = fingerprint(e);
            if wanted != self.fingerprint {
                return Ok(CheckOutcome::Stale { stored: self.fingerprint.clone(), actual: wanted });
            }
        }
        Ok(match &self.verdict {
            Verdict::Exists { solution, det } => {
                let v = verify(&self.problem, solution)?;
                if !v.is_solution() {
                    CheckOutcome::Invalid(format!("determinant is {}, not ±1", v.det))
                } else if v.det != *det {
                    CheckOutcome::Invalid(format!("determinant is {}, certificate says {det}", v.det))
                } else {
                    CheckOutcome::Valid(format!("determinant {det} recomputed"))
                }
            }
            Verdict::NotExists(cert) => {
                if cert.recheck(&self.problem, budget)? {
                    CheckOutcome::Valid(format!("residues mod {} recomputed; ±1 unattainable", cert.modulus))
                } else {
                    CheckOutcome::Invalid(format!("residue set mod {} does not match a fresh enumeration", cert.modulus))
                }
            }
            Verdict::Unknown { .. } => CheckOutcome::Valid("unknown verdict; nothing to recheck".into()),
        })
    }
}

pub fn verdict_value(v: &Verdict) -> Value {
    match v {
        Verdict::Exists { solution, det } => json!({
            "kind": "exists",
            "x": matrix_value(solution.x()),
            "y": matrix_value(solution.y()),
            "det": int_value(det),
        }),
        Verdict::NotExists(c) => obstruction_value(c),
        Verdict::Unknown { completed_bound, moduli } => json!({
            "kind": "unknown",
            "completed_bound": completed_bound,
            "moduli": moduli,
        }),
    }
}

pub fn obstruction_value(c: &ObstructionCertificate) -> Value {
    let mut v = json!({
        "kind": "not_exists",
        "modulus": c.modulus,
        "attainable": c.attainable,
    });
    match c.kind {
        ObstructionKind::FullModular => v["rule"] = json!("full_modular"),
        ObstructionKind::SquareBlock { det_w } => {
            v["rule"] = json!("square_block");
            v["det_w"] = json!(det_w);
        }
    }
    v
}

fn string(v: &Value, path: &str) -> Result<String, DocError> {
    v.as_str().map(str::to_string).ok_or_else(|| DocError::new(path, "expected a string"))
}

/// A matrix whose shape is known in advance; `[]` stands for any matrix with no rows.
fn shaped(v: &Value, path: &str, rows: usize, cols: usize) -> Result<IntMatrix, DocError> {
    let m = matrix(v, path)?;
    if rows == 0 && m.rows() == 0 {
        return Ok(IntMatrix::zeros(0, cols));
    }
    if (m.rows(), m.cols()) != (rows, cols) {
        return Err(DocError::new(path, format!("is {}x{}, expected {rows}x{cols}", m.rows(), m.cols())));
    }
    Ok(m)
}

fn problem(v: &Value, path: &str) -> Result<BlockProblem, DocError> {
    let map = object(v, path, &["m0", "w", "fiber"])?;
    let m0 = matrix(field(map, path, "m0")?, &join(path, "m0"))?;
    let w = shaped(field(map, path, "w")?, &join(path, "w"), m0.rows(), m0.rows())?;
    let fp = join(path, "fiber");
    let f = object(field(map, path, "fiber")?, &fp, &["g", "n"])?;
    let g: usize = small(field(f, &fp, "g")?, &join(&fp, "g"), "a genus")?;
    let n: usize = small(field(f, &fp, "n")?, &join(&fp, "n"), "a boundary count")?;
    BlockProblem::new(m0, w, FiberType::new(g, n), Provenance::Custom).map_err(|e| DocError::new(path, e.to_string()))
}

fn verdict(v: &Value, path: &str, p: &BlockProblem) -> Result<Verdict, DocError> {
    let kind = v.get("kind").and_then(Value::as_str).unwrap_or_default();
    match kind {
        "exists" => {
            let map = object(v, path, &["kind", "x", "y", "det"])?;
            let x = shaped(field(map, path, "x")?, &join(path, "x"), p.m(), p.d())?;
            let y = shaped(field(map, path, "y")?, &join(path, "y"), p.d(), p.d())?;
            let det = int(field(map, path, "det")?, &join(path, "det"))?;
            let solution = CandidateSolution::new(x, y).map_err(|e| DocError::new(join(path, "y"), e.to_string()))?;
            Ok(Verdict::Exists { solution, det })
        }
        "not_exists" => {
            let map = object(v, path, &["kind", "rule", "det_w", "modulus", "attainable"])?;
            let modulus: u64 = small(field(map, path, "modulus")?, &join(path, "modulus"), "a modulus")?;
            let ap = join(path, "attainable");
            let attainable = array(field(map, path, "attainable")?, &ap)?
                .iter()
                .enumerate()
                .map(|(i, r)| small::<u64>(r, &index(&ap, i), "a residue"))
                .collect::<Result<Vec<_>, _>>()?;
            let kind = match string(field(map, path, "rule")?, &join(path, "rule"))?.as_str() {
                "full_modular" => ObstructionKind::FullModular,
                "square_block" => ObstructionKind::SquareBlock {
                    det_w: small(field(map, path, "det_w")?, &join(path, "det_w"), "a residue")?,
                },
                other => return Err(DocError::new(join(path, "rule"), format!("unknown rule {other:?}"))),
            };
            Ok(Verdict::NotExists(ObstructionCertificate { kind, modulus, attainable }))
        }
        "unknown" => {
            let map = object(v, path, &["kind", "completed_bound", "moduli"])?;
            let completed_bound = match field(map, path, "completed_bound")? {
                Value::Null => None,
                b => Some(small(b, &join(path, "completed_bound"), "a bound")?),
            };
            let mp = join(path, "moduli");
            let moduli = array(field(map, path, "moduli")?, &mp)?
                .iter()
                .enumerate()
                .map(|(i, q)| small::<u64>(q, &index(&mp, i), "a modulus"))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Verdict::Unknown { completed_bound, moduli })
        }
        _ => Err(DocError::new(join(path, "kind"), "expected \"exists\", \"not_exists\" or \"unknown\"")),
    }
}
