//! Input documents: a schema version and exactly one manifold payload.

use homfib::hc::ManifoldSpec;
use homfib::linking::{heegaard_pairing, normalize, GeneratorTerm, HeegaardGluingData, LinkingDecomposition, LinkingError};
use homfib::surgery::{SurgeryComponent, SurgeryDiagram, SurgeryError};
use homfib::AbelianGroup;
use serde_json::{json, Value};

use crate::json::{array, field, index, int, int_value, join, matrix, matrix_value, object, parse_text, small, DocError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Decomposition(LinkingDecomposition),
    Diagram(SurgeryDiagram),
    Heegaard(HeegaardGluingData),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecDocument {
    pub schema_version: u32,
    pub payload: Payload,
}

const PAYLOADS: [&str; 3] = ["decomposition", "diagram", "heegaard"];

impl SpecDocument {
    pub fn new(payload: Payload) -> Self {
        Self { schema_version: SCHEMA_VERSION, payload }
    }

    pub fn parse(text: &str) -> Result<Self, DocError> {
        Self::from_value(&parse_text(text)?)
    }

    pub fn from_value(v: &Value) -> Result<Self, DocError> {
        let map = object(v, "", &["schema_version", "decomposition", "diagram", "heegaard"])?;
        let schema_version: u32 = small(field(map, "", "schema_version")?, "schema_version", "a schema version")?;
        if schema_version != SCHEMA_VERSION {
            return Err(DocError::new("schema_version", format!("unsupported version {schema_version}, expected {SCHEMA_VERSION}")));
        }
        let present: Vec<&str> = PAYLOADS.iter().copied().filter(|k| map.contains_key(*k)).collect();
        let payload = match present.as_slice() {
            ["decomposition"] => Payload::Decomposition(decomposition(&map["decomposition"], "decomposition")?),
            ["diagram"] => Payload::Diagram(diagram(&map["diagram"], "diagram")?),
            ["heegaard"] => Payload::Heegaard(heegaard(&map["heegaard"], "heegaard")?),
            [] => return Err(DocError::new("", "expected one of decomposition, diagram, heegaard")),
            several => return Err(DocError::new("", format!("payloads {} are mutually exclusive", several.join(", ")))),
        };
        Ok(Self { schema_version, payload })
    }

    pub fn to_value(&self) -> Value {
        let payload = match &self.payload {
            Payload::Decomposition(d) => json!({
                "decomposition": {
                    "free_rank": d.free_rank,
                    "terms": d.terms.iter().map(term_value).collect::<Vec<_>>(),
                }
            }),
            Payload::Diagram(d) => json!({
                "diagram": {
                    "components": d.components().iter().map(|c| json!({"p": int_value(&c.p), "q": int_value(&c.q)})).collect::<Vec<_>>(),
                    "lk": matrix_value(d.linking()),
                }
            }),
            Payload::Heegaard(h) => json!({"heegaard": {"A": matrix_value(&h.a), "B": matrix_value(&h.b)}}),
        };
        let mut out = payload;
        out["schema_version"] = json!(self.schema_version);
        out
    }

    /// Decomposition terms sorted with trivial ones dropped; other payloads unchanged.
    pub fn normalized(&self) -> Self {
        let payload = match &self.payload {
            Payload::Decomposition(d) => Payload::Decomposition(normalize(d).expect("validated on load")),
            other => other.clone(),
        };
        Self { schema_version: self.schema_version, payload }
    }

    pub fn homology(&self) -> AbelianGroup {
        match &self.payload {
            Payload::Decomposition(d) => d.homology(),
            Payload::Diagram(d) => homfib::surgery::first_homology(d),
            Payload::Heegaard(h) => homfib::linalg::cokernel(&h.b),
        }
    }

    /// The manifold as the engine sees it; Heegaard data carries no surgery description.
    pub fn manifold(&self) -> Result<ManifoldSpec, DocError> {
        match &self.payload {
            Payload::Decomposition(d) => Ok(ManifoldSpec::Decomposition(d.clone())),
            Payload::Diagram(d) => Ok(ManifoldSpec::Diagram(d.clone())),
            Payload::Heegaard(_) => {
                Err(DocError::new("heegaard", "this command needs a decomposition or diagram payload"))
            }
        }
    }

    pub fn describe(&self) -> String {
        match &self.payload {
            Payload::Decomposition(d) => d.to_string(),
            Payload::Diagram(d) => {
                let coeffs: Vec<String> = d.components().iter().map(|c| format!("{}/{}", c.p, c.q)).collect();
                format!("diagram [{}]", coeffs.join(", "))
            }
            Payload::Heegaard(h) => format!("Heegaard data of genus {}", h.genus()),
        }
    }
}

fn term_value(t: &GeneratorTerm) -> Value {
    match t {
        GeneratorTerm::A { p, q } => json!({"kind": "A", "p": int_value(p), "q": int_value(q)}),
        GeneratorTerm::E0 { k } => json!({"kind": "E0", "k": k}),
        GeneratorTerm::E1 { k } => json!({"kind": "E1", "k": k}),
    }
}

fn decomposition(v: &Value, path: &str) -> Result<LinkingDecomposition, DocError> {
    let map = object(v, path, &["free_rank", "terms"])?;
    let free_rank: usize = small(field(map, path, "free_rank")?, &join(path, "free_rank"), "a free rank")?;
    let tp = join(path, "terms");
    let terms = match map.get("terms") {
        Some(t) => array(t, &tp)?.iter().enumerate().map(|(i, t)| term(t, &index(&tp, i))).collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let d = LinkingDecomposition::new(free_rank, terms);
    normalize(&d).map_err(|e| match e {
        LinkingError::InvalidTerm { index: i, reason } => DocError::new(index(&tp, i), reason),
        other => DocError::new(path, other.to_string()),
    })?;
    Ok(d)
}

fn term(v: &Value, path: &str) -> Result<GeneratorTerm, DocError> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| DocError::new(join(path, "kind"), "expected \"A\", \"E0\" or \"E1\""))?;
    match kind {
        "A" => {
            let map = object(v, path, &["kind", "p", "q"])?;
            let p = int(field(map, path, "p")?, &join(path, "p"))?;
            let q = int(field(map, path, "q")?, &join(path, "q"))?;
            Ok(GeneratorTerm::A { p, q })
        }
        "E0" | "E1" => {
            let map = object(v, path, &["kind", "k"])?;
            let k: u32 = small(field(map, path, "k")?, &join(path, "k"), "an exponent")?;
            if k == 0 || k > 4096 {
                return Err(DocError::new(join(path, "k"), format!("k = {k} must lie in 1..=4096")));
            }
            Ok(if kind == "E0" { GeneratorTerm::E0 { k } } else { GeneratorTerm::E1 { k } })
        }
        other => Err(DocError::new(join(path, "kind"), format!("unknown kind {other:?}"))),
    }
}

fn diagram(v: &Value, path: &str) -> Result<SurgeryDiagram, DocError> {
    let map = object(v, path, &["components", "lk"])?;
    let cp = join(path, "components");
    let components: Vec<SurgeryComponent> = array(field(map, path, "components")?, &cp)?
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let ip = index(&cp, i);
            let m = object(c, &ip, &["p", "q"])?;
            Ok(SurgeryComponent::new(int(field(m, &ip, "p")?, &join(&ip, "p"))?, int(field(m, &ip, "q")?, &join(&ip, "q"))?))
        })
        .collect::<Result<_, DocError>>()?;
    let lp = join(path, "lk");
    let lk = match map.get("lk") {
        Some(v) => matrix(v, &lp)?,
        None if components.len() <= 1 => homfib::IntMatrix::zeros(components.len(), components.len()),
        None => return Err(DocError::new(lp, "missing field")),
    };
    SurgeryDiagram::new(components, lk).map_err(|e| match e {
        SurgeryError::InvalidComponent { index: i, .. } => DocError::new(index(&cp, i), e.to_string()),
        SurgeryError::Asymmetric(i, j) => DocError::new(format!("{lp}[{i}][{j}]"), e.to_string()),
        SurgeryError::NonzeroDiagonal(i) => DocError::new(format!("{lp}[{i}][{i}]"), e.to_string()),
        other => DocError::new(lp, other.to_string()),
    })
}

fn heegaard(v: &Value, path: &str) -> Result<HeegaardGluingData, DocError> {
    let map = object(v, path, &["A", "B"])?;
    let a = matrix(field(map, path, "A")?, &join(path, "A"))?;
    let b = matrix(field(map, path, "B")?, &join(path, "B"))?;
    let h = HeegaardGluingData::new(a, b).map_err(|e| DocError::new(path, e.to_string()))?;
    heegaard_pairing(&h).map_err(|e| DocError::new(path, e.to_string()))?;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positional_errors() {
        let e = SpecDocument::parse(r#"{"schema_version":1,"decomposition":{"free_rank":0,"terms":[{"kind":"E0","k":1},{"kind":"A","p":4,"q":2}]}}"#)
            .unwrap_err();
        assert_eq!(e.path, "decomposition.terms[1]");
        let e = SpecDocument::parse(r#"{"schema_version":1,"diagram":{"components":[{"p":0,"q":1},{"p":0,"q":1}],"lk":[[0,1],[2,0]]}}"#)
            .unwrap_err();
        assert_eq!(e.path, "diagram.lk[0][1]");
        let e = SpecDocument::parse(r#"{"schema_version":1,"decomposition":{"free_rank":0},"diagram":{"components":[]}}"#).unwrap_err();
        assert!(e.message.contains("mutually exclusive"));
        let e = SpecDocument::parse(r#"{"schema_version":1,"decomposition":{"free_rank":0,"extra":1}}"#).unwrap_err();
        assert_eq!(e.path, "decomposition.extra");
        let e = SpecDocument::parse(r#"{"schema_version":2,"decomposition":{"free_rank":0}}"#).unwrap_err();
        assert_eq!(e.path, "schema_version");
        let e = SpecDocument::parse("{\"schema_version\":1,\n\"decomposition\":").unwrap_err();
        assert!(e.path.starts_with("line 2"));
        let e = SpecDocument::parse(r#"{"schema_version":1,"heegaard":{"A":[[1,0],[0,1]],"B":[[1,1],[0,1]]}}"#).unwrap_err();
        assert_eq!(e.path, "heegaard");
    }

    #[test]
    fn round_trip() {
        let docs = [
            r#"{"schema_version":1,"decomposition":{"free_rank":2,"terms":[{"kind":"A","p":5,"q":2},{"kind":"E0","k":3},{"kind":"E1","k":2}]}}"#,
            r#"{"schema_version":1,"diagram":{"components":[{"p":5,"q":-2},{"p":0,"q":1}],"lk":[[0,3],[3,0]]}}"#,
            r#"{"schema_version":1,"heegaard":{"A":[[0,1],[1,1]],"B":[[4,0],[-4,4]]}}"#,
            r#"{"schema_version":1,"decomposition":{"free_rank":0,"terms":[{"kind":"A","p":"123456789012345678901","q":2}]}}"#,
        ];
        for text in docs {
            let v: Value = serde_json::from_str(text).unwrap();
            let d = SpecDocument::from_value(&v).unwrap();
            assert_eq!(d.to_value(), v);
            assert_eq!(SpecDocument::from_value(&d.to_value()).unwrap(), d);
        }
    }
}
