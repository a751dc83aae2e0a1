//! Model, step and cut documents.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use hkmod_core::exact::{Rat, RatVec};
use hkmod_core::modify::{Polytope, Step};
use hkmod_core::toric::{Flat, Level3, ToricHKData};

/// A document that failed to parse, located by field path and, for syntax
/// and value errors, by line and column (zero when unknown).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{path}: {message}{}", location(*.line, *.column))]
pub struct ParseError {
    pub path: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn location(line: usize, column: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" (line {line}, column {column})")
    }
}

impl ParseError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError { path: path.into(), line: 0, column: 0, message: message.into() }
    }
}

fn json_location(err: &serde_json::Error, path: String) -> ParseError {
    let (line, column) = (err.line(), err.column());
    let full = err.to_string();
    let suffix = format!(" at line {line} column {column}");
    let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
    ParseError { path, line, column, message }
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, ParseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = match err.path().to_string() {
            p if p == "." => "document".to_string(),
            p => p,
        };
        json_location(err.inner(), path)
    })?;
    de.end().map_err(|err| json_location(&err, "document".into()))?;
    Ok(value)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatDoc {
    u: Vec<i64>,
    lambda: Level3,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    n: usize,
    flats: Vec<FlatDoc>,
}

/// Reads a model document. Every normal must have `n` entries; the remaining
/// structural checks are left to the analysis, which reports them.
pub fn parse_model(text: &str) -> Result<ToricHKData, ParseError> {
    let doc: ModelDoc = parse_json(text)?;
    for (k, f) in doc.flats.iter().enumerate() {
        if f.u.len() != doc.n {
            return Err(ParseError::at(
                format!("flats[{k}].u"),
                format!("expected {} entries, found {}", doc.n, f.u.len()),
            ));
        }
    }
    Ok(ToricHKData::new(doc.n, doc.flats.into_iter().map(|f| Flat::new(f.u, f.lambda)).collect()))
}

/// Canonical model document: two-space indentation, fields in grammar order,
/// rationals in lowest terms, trailing newline.
pub fn serialize_model(data: &ToricHKData) -> String {
    let doc = ModelDoc {
        n: data.n,
        flats: data.flats.iter().map(|f| FlatDoc { u: f.u.clone(), lambda: f.level.clone() }).collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("model documents always serialize");
    out.push('\n');
    out
}

/// A single step document or a list of them.
pub fn parse_steps(text: &str) -> Result<Vec<Step>, ParseError> {
    if text.trim_start().starts_with('[') {
        parse_json(text)
    } else {
        parse_json(text).map(|s| vec![s])
    }
}

pub fn serialize_steps(steps: &[Step]) -> String {
    let mut out = serde_json::to_string_pretty(steps).expect("steps always serialize");
    out.push('\n');
    out
}

/// What to cut a polytope with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CutOperation {
    /// Keep `⟨x, a⟩ ≥ epsilon`.
    HalfSpace { a: RatVec, epsilon: Rat },
    /// Keep the part inside `delta + shift`.
    Polytope { delta: Polytope, shift: RatVec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutDocument {
    pub polytope: Polytope,
    pub operation: CutOperation,
}

pub fn parse_cut(text: &str) -> Result<CutDocument, ParseError> {
    parse_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hkmod_core::toric::examples::cotangent_p2;

    const P2: &str = r#"{
  "n": 2,
  "flats": [
    {"u": [1, 0], "lambda": ["0", "0", "0"]},
    {"u": [0, 1], "lambda": ["0", "0", "0"]},
    {"u": [-1, -1], "lambda": ["-1", "0", "0"]}
  ]
}"#;

    #[test]
    fn parses_the_cotangent_fixture() {
        assert_eq!(parse_model(P2).unwrap(), cotangent_p2());
    }

    #[test]
    fn canonical_round_trip() {
        let once = serialize_model(&parse_model(P2).unwrap());
        let twice = serialize_model(&parse_model(&once).unwrap());
        assert_eq!(once, twice);
        assert!(once.contains("\"-1\""));
        let scaled = P2.replace("\"-1\", \"0\"", "\"-2/2\", \"0/5\"");
        assert_eq!(serialize_model(&parse_model(&scaled).unwrap()), once);
    }

    #[test]
    fn zero_denominator_is_located() {
        let bad = P2.replacen("[\"0\", \"0\", \"0\"]", "[\"1/0\", \"0\", \"0\"]", 1);
        let err = parse_model(&bad).unwrap_err();
        assert_eq!(err.path, "flats[0].lambda[0]");
        assert_eq!(err.line, 4);
        assert!(err.message.contains("denominator"), "{err}");
    }

    #[test]
    fn missing_n_is_rejected() {
        let err = parse_model(r#"{"flats": []}"#).unwrap_err();
        assert!(err.message.contains("missing field `n`"), "{err}");
    }

    #[test]
    fn wrong_shapes_are_rejected() {
        assert_eq!(parse_model(&P2.replace("[1, 0]", "[1, 0, 0]")).unwrap_err().path, "flats[0].u");
        assert!(parse_model(&P2.replacen("[\"0\", \"0\", \"0\"]", "[\"0\", \"0\"]", 1)).is_err());
        assert!(parse_model(&P2.replace("\"n\"", "\"m\"")).is_err());
        assert!(parse_model(&format!("{P2} {{}}")).is_err());
    }

    #[test]
    fn steps_single_or_list() {
        let one = r#"{"xi": [1, 1, 0], "epsilon": ["1/2", "0", "0"]}"#;
        let steps = parse_steps(one).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].epsilon, Level3::new(Rat::new(1, 2), Rat::zero(), Rat::zero()));
        let list = format!("[{one}, {one}]");
        assert_eq!(parse_steps(&list).unwrap().len(), 2);
        assert_eq!(parse_steps(&serialize_steps(&steps)).unwrap(), steps);
    }

    #[test]
    fn cut_documents() {
        let doc = r#"{
            "polytope": {"dim": 1, "constraints": [{"normal": ["1"], "offset": "0"}]},
            "operation": {"kind": "half_space", "a": ["1"], "epsilon": "1/2"}
        }"#;
        let cut = parse_cut(doc).unwrap();
        assert_eq!(cut.operation, CutOperation::HalfSpace { a: RatVec::from_ints(&[1]), epsilon: Rat::new(1, 2) });
        assert!(parse_cut(&doc.replace("half_space", "slab")).is_err());
    }
}
