//! Analysis reports and their two output formats.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use hkmod_core::modify::GoodnessReport;
use hkmod_core::toric::{smoothness_defects, validate, Diagnostic, Topology, ToricHKData};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub input_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_sha256: Option<String>,
    pub tool_version: &'static str,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn for_input(input: Option<&[u8]>, seed: Option<u64>) -> Self {
        Provenance { input_sha256: input.map(sha256_hex), steps_sha256: None, tool_version: TOOL_VERSION, seed }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepGoodness {
    pub step: usize,
    pub good: bool,
    #[serde(flatten)]
    pub report: GoodnessReport,
}

/// Topology of one model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub n: usize,
    pub flats: usize,
    pub axis: u8,
    /// Quaternion of the level rotation that made the slice faithful.
    pub rotation: Option<[i64; 4]>,
    pub d: Vec<usize>,
    pub betti: Vec<u64>,
    pub euler: u64,
    pub orbifold: bool,
    pub diagnostics: Vec<Diagnostic>,
    pub smoothness_defects: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goodness: Option<Vec<StepGoodness>>,
    pub provenance: Provenance,
}

impl Report {
    /// `top` must be the topology of `data` on `axis`.
    pub fn new(data: &ToricHKData, axis: u8, top: &Topology, provenance: Provenance) -> Self {
        Report {
            n: data.n,
            flats: data.d(),
            axis,
            rotation: top.rotation,
            d: top.counts().to_vec(),
            betti: top.betti().to_vec(),
            euler: top.euler(),
            orbifold: hkmod_core::toric::orbifold_check(data),
            diagnostics: validate(data),
            smoothness_defects: smoothness_defects(data),
            goodness: None,
            provenance,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let tuple = |xs: Vec<String>| format!("({})", xs.join(", "));
        let _ = writeln!(out, "model: n = {}, {} flats, sliced on axis {}", self.n, self.flats, self.axis);
        if let Some(q) = self.rotation {
            let _ = writeln!(out, "levels rotated by quaternion {q:?}");
        }
        let _ = writeln!(out, "face counts d = {}", tuple(self.d.iter().map(ToString::to_string).collect()));
        let _ = writeln!(out, "betti (b0, b2, ...) = {}", tuple(self.betti.iter().map(ToString::to_string).collect()));
        let _ = writeln!(out, "euler characteristic = {}", self.euler);
        let _ = writeln!(out, "orbifold: {}", if self.orbifold { "yes" } else { "no" });
        if self.diagnostics.is_empty() {
            let _ = writeln!(out, "diagnostics: none");
        }
        for diag in &self.diagnostics {
            let _ = writeln!(out, "diagnostic: {diag}");
        }
        if !self.smoothness_defects.is_empty() {
            let _ = writeln!(out, "orbifold points at flat sets {:?}", self.smoothness_defects);
        }
        for g in self.goodness.iter().flatten() {
            let _ = writeln!(
                out,
                "step {}: new normal {:?}, epsilon {}, {}",
                g.step,
                g.report.new_normal,
                g.report.epsilon,
                if g.good { "good" } else { "not good" }
            );
        }
        if let Some(h) = &self.provenance.input_sha256 {
            let _ = writeln!(out, "input sha256 {h}");
        }
        let _ = writeln!(out, "hkmod {}", self.provenance.tool_version);
        out
    }
}

/// Pretty JSON with object keys in sorted order and a trailing newline.
pub fn to_structured<T: Serialize>(value: &T) -> String {
    // `serde_json::Value` keeps objects in a sorted map.
    let value = serde_json::to_value(value).expect("reports always serialize");
    let mut out = serde_json::to_string_pretty(&value).expect("values always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use hkmod_core::toric::examples::cotangent_p2;
    use hkmod_core::toric::topology;

    fn p2_report() -> Report {
        let data = cotangent_p2();
        Report::new(&data, 1, &topology(&data).unwrap(), Provenance::for_input(Some(b"x"), None))
    }

    #[test]
    fn structured_is_stable_and_sorted() {
        let a = to_structured(&p2_report());
        assert_eq!(a, to_structured(&p2_report()));
        let keys: Vec<&str> = a
            .lines()
            .filter(|l| l.starts_with("  \""))
            .map(|l| l.trim().split('"').nth(1).unwrap())
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn cotangent_counts_and_empty_lists() {
        let s = to_structured(&p2_report());
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["d"], serde_json::json!([3, 3, 1]));
        assert_eq!(v["betti"], serde_json::json!([1, 1, 1]));
        assert_eq!(v["diagnostics"], serde_json::json!([]));
        assert!(v.get("goodness").is_none());
        assert_eq!(v["provenance"]["seed"], serde_json::Value::Null);
    }

    #[test]
    fn text_format_mentions_counts() {
        let t = p2_report().to_text();
        assert!(t.contains("d = (3, 3, 1)"));
        assert!(t.contains("betti (b0, b2, ...) = (1, 1, 1)"));
    }

    #[test]
    fn hash_is_hex_sha256() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
