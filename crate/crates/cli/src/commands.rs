//! Command bodies. Each returns a [`Report`] holding the exit code, a rendered
//! table for people and one JSON record per line for scripts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use homfib::engine::{
    decide, modular_obstruction, search, square_block_obstruction, stabilization_reduce, verify, BlockProblem,
    DecideOptions, EngineError, FiberType, ObstructionCertificate, ObstructionKind, SearchOutcome, Verdict,
    DEFAULT_MODULI,
};
use homfib::hc::{hc_compute, Evidence, HcBounds, HcError, HcOptions, ManifoldSpec};
use homfib::linking::{
    gram_equivalent, gram_of_generator, heegaard_pairing, linking_form_from_heegaard, GeneratorTerm,
    LinkingDecomposition, LinkingError, LinkingGram,
};
use homfib::surgery::SurgeryError;
use homfib::IntMatrix;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::certificate::{fingerprint, obstruction_value, verdict_value, CertificateFile, CheckOutcome};
use crate::document::{Payload, SpecDocument};
use crate::json::{int_value, matrix_value, DocError};

pub const EXIT_EXISTS: i32 = 0;
pub const EXIT_NOT_EXISTS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Capacity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Capacity(_) => EXIT_CAPACITY,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "error: {m}"),
            CliError::Capacity(m) => write!(f, "capacity exceeded: {m}"),
        }
    }
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Capacity { .. } | EngineError::Linking(LinkingError::Capacity { .. }) => {
                CliError::Capacity(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<LinkingError> for CliError {
    fn from(e: LinkingError) -> Self {
        EngineError::from(e).into()
    }
}

impl From<SurgeryError> for CliError {
    fn from(e: SurgeryError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<HcError> for CliError {
    fn from(e: HcError) -> Self {
        match e {
            HcError::Engine(e) => e.into(),
            HcError::Linking(e) => e.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub code: i32,
    pub human: String,
    pub records: Vec<Value>,
}

impl Report {
    pub fn render_records(&self) -> String {
        self.records.iter().map(|r| format!("{r}\n")).collect()
    }
}

/// Two-column `key  value` table.
fn key_values(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let mut lines = v.lines();
        out += &format!("{k:<width$}  {}\n", lines.next().unwrap_or(""));
        for l in lines {
            out += &format!("{:<width$}  {l}\n", "");
        }
    }
    out
}

fn grid(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut out = line(header.iter().map(|h| h.to_string()).collect());
    out += &line(widths.iter().map(|w| "-".repeat(*w)).collect());
    for r in rows {
        out += &line(r.clone());
    }
    out
}

fn show_matrix(m: &IntMatrix) -> String {
    if m.rows() == 0 {
        return format!("(0x{})", m.cols());
    }
    let rows: Vec<String> = m.to_rows().iter().map(|r| r.iter().map(BigInt::to_string).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join("; "))
}

fn residues(set: &[u64]) -> String {
    format!("{{{}}}", set.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
}

pub fn load_spec(path: &Path) -> Result<SpecDocument, CliError> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Input(format!("stdin: {e}")))?
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    };
    SpecDocument::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn homology(doc: &SpecDocument) -> Report {
    let h = doc.homology();
    let factors: Vec<Value> = h.invariant_factors().iter().map(int_value).collect();
    Report {
        code: 0,
        human: key_values(&[("input", doc.describe()), ("H1", h.to_string())]),
        records: vec![json!({
            "record": "homology",
            "free_rank": h.free_rank(),
            "invariant_factors": factors,
            "display": h.to_string(),
        })],
    }
}

fn gram_strings(g: &[Vec<num_rational::BigRational>]) -> Vec<Vec<String>> {
    g.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

/// Single generator terms whose group matches `form`'s cyclic orders.
fn generator_candidates(form: &LinkingGram) -> Vec<GeneratorTerm> {
    match form.orders() {
        [p] => {
            let Some(p) = p.to_i64() else { return vec![] };
            (1..p).filter(|q| num_integer::Integer::gcd(q, &p).is_one()).map(|q| GeneratorTerm::a(p, q)).collect()
        }
        [a, b] if a == b && *a > BigInt::one() && a.magnitude().count_ones() == 1 => {
            let k = a.trailing_zeros().expect("nonzero") as u32;
            let mut out = vec![GeneratorTerm::E0 { k }];
            if k >= 2 {
                out.push(GeneratorTerm::E1 { k });
            }
            out
        }
        _ => vec![],
    }
}

pub fn linking_form(doc: &SpecDocument, order_bound: u64) -> Result<Report, CliError> {
    let (form, standard) = match &doc.payload {
        Payload::Heegaard(h) => (linking_form_from_heegaard(h)?, Some(heegaard_pairing(h)?.to_rows())),
        Payload::Decomposition(d) => (d.gram()?, None),
        Payload::Diagram(_) => {
            return Err(CliError::Input("linking-form needs a heegaard or decomposition payload".into()));
        }
    };
    let mut matched = None;
    let mut note = None;
    if form.order() > BigInt::from(order_bound) {
        note = Some(format!("group order {} exceeds bound {order_bound}; no matching attempted", form.order()));
    } else {
        for t in generator_candidates(&form) {
            if gram_equivalent(&form, &gram_of_generator(&t)?, order_bound)? {
                matched = Some(t);
                break;
            }
        }
    }
    let orders: Vec<Value> = form.orders().iter().map(int_value).collect();
    let mut rows = vec![
        ("input", doc.describe()),
        ("group", form.group().to_string()),
        ("gram", format!("{form}")),
    ];
    if let Some(s) = &standard {
        let shown: Vec<String> = gram_strings(s).iter().map(|r| format!("[{}]", r.join(", "))).collect();
        rows.push(("-B^-1 A", shown.join(" ")));
    }
    rows.push(("generator", matched.as_ref().map_or_else(|| "none found".into(), |t| t.to_string())));
    if let Some(n) = &note {
        rows.push(("note", n.clone()));
    }
    Ok(Report {
        code: 0,
        human: key_values(&rows),
        records: vec![json!({
            "record": "linking_form",
            "orders": orders,
            "gram": gram_strings(form.entries()),
            "standard_basis": standard.as_deref().map(gram_strings),
            "generator": matched.map(|t| t.to_string()),
            "note": note,
        })],
    })
}

pub struct SearchSettings {
    pub bound: u32,
    pub budget: u64,
}

pub enum CertTarget<'a> {
    Dir(&'a Path),
    Skip,
}

fn persist(cert: &CertificateFile, target: &CertTarget) -> Result<Option<PathBuf>, CliError> {
    match target {
        CertTarget::Dir(d) => cert
            .write_atomic(d)
            .map(Some)
            .map_err(|e| CliError::Input(format!("writing certificate to {}: {e}", d.display()))),
        CertTarget::Skip => Ok(None),
    }
}

fn problem_rows(p: &BlockProblem) -> Vec<(&'static str, String)> {
    vec![
        ("fiber", format!("{}: genus {}, boundary components {}", p.fiber(), p.fiber().g, p.fiber().n + 1)),
        ("M0", show_matrix(p.m0())),
        ("W", show_matrix(p.w())),
        ("unknowns", p.variable_count().to_string()),
        ("fingerprint", fingerprint(p)),
    ]
}

fn problem_value(p: &BlockProblem) -> Value {
    json!({
        "m0": matrix_value(p.m0()),
        "w": matrix_value(p.w()),
        "fiber": {"g": p.fiber().g, "n": p.fiber().n},
        "fingerprint": fingerprint(p),
    })
}

fn obstruction_text(c: &ObstructionCertificate) -> String {
    let rule = match c.kind {
        ObstructionKind::FullModular => "full enumeration".to_string(),
        ObstructionKind::SquareBlock { det_w } => format!("square block, det W = {det_w}"),
    };
    format!("{rule}: residues mod {} are {}; ±1 unreachable", c.modulus, residues(&c.attainable))
}

pub fn decide_cmd(
    doc: &SpecDocument,
    fiber: FiberType,
    disk: bool,
    settings: &SearchSettings,
    target: &CertTarget,
) -> Result<Report, CliError> {
    if fiber == FiberType::new(0, 0) {
        if !disk {
            return Err(CliError::Input("fiber (0,0) is the disk case; pass --disk to ask it".into()));
        }
        let h = doc.homology();
        let yes = homfib::engine::disk_case(&h);
        let answer = if yes { "yes: integral homology sphere".to_string() } else { format!("no: H1 = {h}") };
        return Ok(Report {
            code: if yes { EXIT_EXISTS } else { EXIT_NOT_EXISTS },
            human: key_values(&[("input", doc.describe()), ("disk fiber", answer)]),
            records: vec![json!({"record": "disk", "exists": yes, "homology": h.to_string()})],
        });
    }
    let p = doc.manifold()?.problem(fiber)?;
    let start = Instant::now();
    let opts = DecideOptions { bound: settings.bound, budget: settings.budget, moduli: DEFAULT_MODULI.to_vec() };
    let verdict = decide(&p, &opts)?;
    let elapsed = start.elapsed().as_millis() as u64;
    let code = match verdict {
        Verdict::Exists { .. } => EXIT_EXISTS,
        Verdict::NotExists(_) => EXIT_NOT_EXISTS,
        Verdict::Unknown { .. } => EXIT_UNKNOWN,
    };
    let detail = match &verdict {
        Verdict::Exists { solution, det } => {
            format!("X = {}\nY = {}\ndet = {det}", show_matrix(solution.x()), show_matrix(solution.y()))
        }
        Verdict::NotExists(c) => obstruction_text(c),
        Verdict::Unknown { completed_bound, moduli } => format!(
            "no obstruction found for moduli {:?} within budget; searched exhaustively up to entry bound {}",
            moduli,
            completed_bound.map_or("none".into(), |b| b.to_string())
        ),
    };
    let cert = CertificateFile::new(p.clone(), verdict.clone(), elapsed);
    let path = persist(&cert, target)?;
    let mut rows = vec![("input", doc.describe())];
    rows.extend(problem_rows(&p));
    rows.push(("verdict", verdict.label().to_string()));
    rows.push(("detail", detail));
    if let Some(path) = &path {
        rows.push(("certificate", path.display().to_string()));
    }
    Ok(Report {
        code,
        human: key_values(&rows),
        records: vec![json!({
            "record": "verdict",
            "problem": problem_value(&p),
            "verdict": verdict_value(&verdict),
            "certificate": path.map(|p| p.display().to_string()),
        })],
    })
}

fn evidence_text(e: &Evidence) -> String {
    match e {
        Evidence::IntegralHomologySphere => "H1 is trivial".into(),
        Evidence::RankBound { genus, generators } => {
            format!("H1 needs {generators} generators, so genus >= {genus}")
        }
        Evidence::Witness { problem, det, origin, .. } => {
            format!("genus {} witness, det {det} ({origin})", problem.fiber().g)
        }
        Evidence::Obstruction { problem, certificate } => {
            format!("no genus {} fiber: {}", problem.fiber().g, obstruction_text(certificate))
        }
        Evidence::Table { genus, chain } => format!("value table gives {genus}: {}", chain.join(", ")),
        Evidence::Unresolved { fiber, completed_bound } => format!(
            "genus {} unresolved (searched to entry bound {})",
            fiber.g,
            completed_bound.map_or("none".into(), |b| b.to_string())
        ),
    }
}

fn evidence_kind(e: &Evidence) -> &'static str {
    match e {
        Evidence::IntegralHomologySphere => "trivial_homology",
        Evidence::RankBound { .. } => "rank_bound",
        Evidence::Witness { .. } => "witness",
        Evidence::Obstruction { .. } => "obstruction",
        Evidence::Table { .. } => "table",
        Evidence::Unresolved { .. } => "unresolved",
    }
}

fn hc_summary(b: &HcBounds) -> String {
    match (b.exact, b.upper) {
        (Some(v), _) => format!("hc = {v}"),
        (None, Some(u)) => format!("{} <= hc <= {u}", b.lower),
        (None, None) => format!("hc >= {}", b.lower),
    }
}

fn hc_record(label: &str, b: &HcBounds) -> Value {
    let evidence: Vec<Value> = b
        .evidence
        .iter()
        .map(|e| json!({"kind": evidence_kind(e), "detail": evidence_text(e)}))
        .collect();
    json!({
        "record": "hc",
        "input": label,
        "lower": b.lower,
        "upper": b.upper,
        "exact": b.exact,
        "evidence": evidence,
    })
}

pub fn hc_cmd(doc: &SpecDocument, max_genus: Option<usize>, settings: &SearchSettings) -> Result<Report, CliError> {
    let spec = doc.manifold()?;
    let opts = HcOptions { bound: settings.bound, budget: settings.budget, max_genus, ..Default::default() };
    let b = hc_compute(&spec, &opts)?;
    let mut rows = vec![("input", doc.describe()), ("H1", spec.homology().to_string()), ("result", hc_summary(&b))];
    let evidence: Vec<String> = b.evidence.iter().map(evidence_text).collect();
    rows.push(("evidence", evidence.join("\n")));
    Ok(Report {
        code: if b.exact.is_some() { EXIT_EXISTS } else { EXIT_UNKNOWN },
        human: key_values(&rows),
        records: vec![hc_record(&doc.describe(), &b)],
    })
}

pub fn obstruct_cmd(
    doc: &SpecDocument,
    fiber: FiberType,
    modulus: u64,
    budget: u64,
    target: &CertTarget,
) -> Result<Report, CliError> {
    let p = doc.manifold()?.problem(fiber)?;
    let start = Instant::now();
    let cert = match square_block_obstruction(&p, modulus) {
        Ok(Some(c)) => Some(c),
        Ok(None) | Err(EngineError::Inapplicable(_)) => modular_obstruction(&p, modulus, budget)?,
        Err(e) => return Err(e.into()),
    };
    let elapsed = start.elapsed().as_millis() as u64;
    let mut rows = vec![("input", doc.describe())];
    rows.extend(problem_rows(&p));
    let Some(c) = cert else {
        rows.push(("result", format!("±1 is attained mod {modulus}; no obstruction")));
        return Ok(Report {
            code: EXIT_UNKNOWN,
            human: key_values(&rows),
            records: vec![json!({"record": "obstruction", "problem": problem_value(&p), "modulus": modulus, "obstruction": null})],
        });
    };
    let file = CertificateFile::new(p.clone(), Verdict::NotExists(c.clone()), elapsed);
    let path = persist(&file, target)?;
    rows.push(("result", obstruction_text(&c)));
    if let Some(path) = &path {
        rows.push(("certificate", path.display().to_string()));
    }
    Ok(Report {
        code: EXIT_NOT_EXISTS,
        human: key_values(&rows),
        records: vec![json!({
            "record": "obstruction",
            "problem": problem_value(&p),
            "modulus": modulus,
            "obstruction": obstruction_value(&c),
            "certificate": path.map(|p| p.display().to_string()),
        })],
    })
}

pub fn verify_cmd(cert_path: &Path, spec: Option<&SpecDocument>, budget: u64) -> Result<Report, CliError> {
    let cert = CertificateFile::read(cert_path)?;
    let expected = match spec {
        Some(doc) => Some(doc.manifold()?.problem(cert.problem.fiber())?),
        None => None,
    };
    let outcome = cert.check(expected.as_ref(), budget)?;
    let (code, status, detail) = match &outcome {
        CheckOutcome::Valid(d) => (0, "valid", d.clone()),
        CheckOutcome::Invalid(d) => (1, "invalid", d.clone()),
        CheckOutcome::Stale { stored, actual } => {
            (1, "stale certificate", format!("fingerprint {stored} does not match problem fingerprint {actual}"))
        }
    };
    Ok(Report {
        code,
        human: key_values(&[
            ("certificate", cert_path.display().to_string()),
            ("verdict", cert.verdict.label().to_string()),
            ("status", status.to_string()),
            ("detail", detail.clone()),
        ]),
        records: vec![json!({
            "record": "verification",
            "fingerprint": cert.fingerprint,
            "verdict": cert.verdict.label(),
            "status": status,
            "detail": detail,
        })],
    })
}

pub fn reduce_cmd(
    doc: &SpecDocument,
    fiber: FiberType,
    settings: &SearchSettings,
    from_cert: Option<&Path>,
) -> Result<Report, CliError> {
    let p = doc.manifold()?.problem(fiber)?;
    let (solution, source) = match from_cert {
        Some(path) => {
            let cert = CertificateFile::read(path)?;
            if cert.fingerprint != fingerprint(&p) {
                return Err(CliError::Input(format!(
                    "stale certificate: {} is for fingerprint {}, not {}",
                    path.display(),
                    cert.fingerprint,
                    fingerprint(&p)
                )));
            }
            match cert.verdict {
                Verdict::Exists { solution, .. } => (solution, format!("certificate {}", path.display())),
                other => {
                    return Err(CliError::Input(format!("certificate verdict is {}, not exists", other.label())));
                }
            }
        }
        None => match search(&p, settings.bound, settings.budget)? {
            SearchOutcome::Found { solution, .. } => (solution, format!("search, entry bound {}", settings.bound)),
            SearchOutcome::Exhausted { completed_bound } => {
                let searched = completed_bound.map_or("none".into(), |b| b.to_string());
                return Ok(Report {
                    code: EXIT_UNKNOWN,
                    human: key_values(&[
                        ("input", doc.describe()),
                        ("result", format!("no {fiber} solution up to entry bound {searched}; nothing to reduce")),
                    ]),
                    records: vec![json!({"record": "reduction", "problem": problem_value(&p), "reduced": null})],
                });
            }
        },
    };
    let (q, c) = stabilization_reduce(&p, &solution)?;
    let det = verify(&q, &c)?.det;
    let mut rows = vec![("input", doc.describe())];
    rows.extend(problem_rows(&p));
    rows.push(("solution", format!("X = {}\nY = {}\n({source})", show_matrix(solution.x()), show_matrix(solution.y()))));
    rows.push(("reduced fiber", q.fiber().to_string()));
    rows.push(("reduced M0", show_matrix(q.m0())));
    rows.push(("reduced W", show_matrix(q.w())));
    rows.push(("reduced X", show_matrix(c.x())));
    rows.push(("reduced Y", show_matrix(c.y())));
    rows.push(("det", det.to_string()));
    Ok(Report {
        code: EXIT_EXISTS,
        human: key_values(&rows),
        records: vec![json!({
            "record": "reduction",
            "problem": problem_value(&p),
            "reduced": {
                "problem": problem_value(&q),
                "x": matrix_value(c.x()),
                "y": matrix_value(c.y()),
                "det": int_value(&det),
            },
        })],
    })
}

/// `hc` over `#^r(S²×S¹) # M(t)` for the small generators.
pub fn table_cmd(max_r: usize, settings: &SearchSettings) -> Result<Report, CliError> {
    let terms = [
        GeneratorTerm::E0 { k: 1 },
        GeneratorTerm::E0 { k: 2 },
        GeneratorTerm::E0 { k: 3 },
        GeneratorTerm::E0 { k: 4 },
        GeneratorTerm::E1 { k: 2 },
        GeneratorTerm::E1 { k: 3 },
    ];
    let opts = HcOptions { bound: settings.bound, budget: settings.budget, ..Default::default() };
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut all_exact = true;
    for t in &terms {
        for r in 0..=max_r {
            let d = LinkingDecomposition::new(r, vec![t.clone()]);
            let b = hc_compute(&ManifoldSpec::Decomposition(d.clone()), &opts)?;
            all_exact &= b.exact.is_some();
            let kinds: Vec<&str> = b.evidence.iter().map(evidence_kind).collect();
            rows.push(vec![
                t.to_string(),
                r.to_string(),
                b.lower.to_string(),
                b.upper.map_or("-".into(), |u| u.to_string()),
                b.exact.map_or("?".into(), |v| v.to_string()),
                kinds.join(","),
            ]);
            records.push(hc_record(&d.to_string(), &b));
        }
    }
    Ok(Report {
        code: if all_exact { EXIT_EXISTS } else { EXIT_UNKNOWN },
        human: grid(&["term", "r", "lower", "upper", "hc", "evidence"], &rows),
        records,
    })
}
