//! The `hkmod` command line: argument grammar, document formats and the
//! command implementations behind the binary.

pub mod model;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hkmod_core::arrangement::{render_svg, ArrangementError};
use hkmod_core::flatlab::{run_lab, LabReport, SampleConfig};
use hkmod_core::modify::suite::{verify, SuiteReport};
use hkmod_core::modify::{generalized_cut, goodness, modify, symplectic_cut_polytope, ModifyError, Polytope};
use hkmod_core::toric::{self, topology_on_axis, SliceAxis, ToricError, ToricHKData};

use model::{parse_cut, parse_model, parse_steps, serialize_model, CutOperation, ParseError};
use report::{to_structured, Provenance, Report, StepGoodness};

#[derive(Parser, Debug)]
#[command(name = "hkmod", version, about = "Topology and modifications of toric hyperkahler spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Structured,
    Text,
}

#[derive(clap::Args, Debug)]
pub struct Emit {
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Structured)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Face counts, Betti numbers and Euler characteristic of a model.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Component of the levels used for the hyperplane slice.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        axis: u8,
        #[command(flatten)]
        emit: Emit,
    },
    /// Apply modification steps; writes the new model to --output and prints its report.
    Modify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        steps: PathBuf,
        /// Where to write the modified model.
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        axis: u8,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
    },
    /// Cut a polytope by a half-space or by a translated polytope.
    Cut {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        emit: Emit,
    },
    /// Run the seeded suite of random good modifications.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: u64,
        #[command(flatten)]
        emit: Emit,
    },
    /// Draw the bounded complex of a two-dimensional slice as SVG.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        axis: u8,
        /// Write the picture here instead of standard output.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Sampled checks of the flat moment-map formulas.
    Lab {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        emit: Emit,
    },
}

/// Exit status for failures in the mathematics rather than the input.
pub const EXIT_DOMAIN: i32 = 1;
/// Exit status for unreadable or malformed input.
pub const EXIT_PARSE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Parse { file: PathBuf, error: ParseError },
    Io { file: PathBuf, message: String },
    Usage(String),
    Domain { kind: &'static str, message: String, details: serde_json::Value },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain { .. } => EXIT_DOMAIN,
            _ => EXIT_PARSE,
        }
    }

    /// Machine-readable form written to the error stream.
    pub fn document(&self) -> serde_json::Value {
        let (kind, message, details) = match self {
            CliError::Parse { file, error } => ("ParseError", error.to_string(), json!({ "file": file, "location": error })),
            CliError::Io { file, message } => ("IoError", message.clone(), json!({ "file": file })),
            CliError::Usage(message) => ("UsageError", message.clone(), json!({})),
            CliError::Domain { kind, message, details } => (*kind, message.clone(), details.clone()),
        };
        json!({ "error": { "kind": kind, "message": message, "details": details } })
    }
}

impl From<ToricError> for CliError {
    fn from(e: ToricError) -> Self {
        let (kind, details) = match &e {
            ToricError::Invalid(diags) => ("InvalidModel", json!({ "diagnostics": diags })),
            ToricError::NotOrbifold(size) => ("NotOrbifold", json!({ "meeting_flats": size })),
            ToricError::SliceUnfixable(attempts) => ("SliceUnfixable", json!({ "attempts": attempts })),
            ToricError::Arrangement(a) => return a.clone().into(),
            ToricError::InvariantViolation(_) => ("InvariantViolation", json!({})),
            _ => ("ToricError", json!({})),
        };
        CliError::Domain { kind, message: e.to_string(), details }
    }
}

impl From<ArrangementError> for CliError {
    fn from(e: ArrangementError) -> Self {
        let kind = match e {
            ArrangementError::UnsupportedDimension(_) => "UnsupportedDimension",
            ArrangementError::CapacityExceeded { .. } => "CapacityExceeded",
            _ => "ArrangementError",
        };
        CliError::Domain { kind, message: e.to_string(), details: json!({}) }
    }
}

impl From<ModifyError> for CliError {
    fn from(e: ModifyError) -> Self {
        match e {
            ModifyError::Toric(t) => t.into(),
            ModifyError::GoodnessViolation { step, ref report } => CliError::Domain {
                kind: "GoodnessViolation",
                message: e.to_string(),
                details: json!({ "step": step, "report": report }),
            },
            ModifyError::ZeroCircle => CliError::Domain { kind: "ZeroCircle", message: e.to_string(), details: json!({}) },
            ModifyError::BettiIncrementViolation { before, after } => CliError::Domain {
                kind: "BettiIncrementViolation",
                message: e.to_string(),
                details: json!({ "before": before, "after": after }),
            },
            _ => CliError::Domain { kind: "ModifyError", message: e.to_string(), details: json!({}) },
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { file: path.to_owned(), message: e.to_string() })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io { file: path.to_owned(), message: e.to_string() })
}

fn load_model(path: &Path) -> Result<(ToricHKData, String), CliError> {
    let text = read(path)?;
    let data = parse_model(&text).map_err(|error| CliError::Parse { file: path.to_owned(), error })?;
    Ok((data, text))
}

fn axis_of(axis: u8) -> SliceAxis {
    SliceAxis::from_number(axis).expect("clap restricts the axis to 1..=3")
}

/// Topology of `data` on `axis`, with both consistency checks applied.
fn analyze_data(data: &ToricHKData, axis: u8, provenance: Provenance) -> Result<Report, CliError> {
    let top = topology_on_axis(data, axis_of(axis))?;
    toric::check_betti(&top)?;
    toric::check_euler(&top)?;
    Ok(Report::new(data, axis, &top, provenance))
}

fn emit<T: Serialize>(value: &T, text: impl FnOnce(&T) -> String, emit: &Emit, out: &mut dyn Write) -> Result<(), CliError> {
    let doc = match emit.format {
        Format::Structured => to_structured(value),
        Format::Text => text(value),
    };
    match &emit.output {
        Some(path) => write_file(path, &doc),
        None => out.write_all(doc.as_bytes()).map_err(|e| CliError::Io { file: "-".into(), message: e.to_string() }),
    }
}

#[derive(Serialize)]
struct CutReport {
    result: Polytope,
    empty: bool,
    witness: Option<hkmod_core::exact::RatVec>,
    contained_in_input: bool,
    provenance: Provenance,
}

#[derive(Serialize)]
struct VerifyReport {
    #[serde(flatten)]
    suite: SuiteReport,
    passed: bool,
    provenance: Provenance,
}

#[derive(Serialize)]
struct LabDocument {
    #[serde(flatten)]
    lab: LabReport,
    passed: bool,
    provenance: Provenance,
}

fn suite_text(r: &VerifyReport) -> String {
    let s = &r.suite;
    format!(
        "{} random good modifications, seed {}\nb2 increased by one: {}/{}\neuler non-decreasing: {}/{}\nalternating face sum 1: {}/{}\n{}\n",
        s.count,
        s.seed,
        s.count as usize - s.b2_increment_failures.len(),
        s.count,
        s.count as usize - s.euler_decreases.len(),
        s.count,
        s.count as usize - s.alternating_sum_failures.len(),
        s.count,
        if r.passed { "PASS" } else { "FAIL" }
    )
}

fn lab_text(r: &LabDocument) -> String {
    let mut out = format!("moment-map lab, seed {}, {} samples\n", r.lab.seed, r.lab.count);
    for c in &r.lab.checks {
        let range = match (c.min, c.max) {
            (Some(lo), Some(hi)) => format!("in [{lo:e}, {hi:e}]"),
            (Some(lo), None) => format!(">= {lo:e}"),
            (None, Some(hi)) => format!("<= {hi:e}"),
            (None, None) => String::new(),
        };
        out.push_str(&format!("{} {:<30} {:e} {}\n", if c.passed { "ok  " } else { "FAIL" }, c.property, c.value, range));
    }
    out
}

fn cut_text(r: &CutReport) -> String {
    let mut out = format!("cut in dimension {}: ", r.result.dim);
    match &r.witness {
        Some(w) => out.push_str(&format!("nonempty, contains {:?}\n", w.iter().map(ToString::to_string).collect::<Vec<_>>())),
        None => out.push_str("empty\n"),
    }
    out.push_str(&format!("{} constraints, inside the input: {}\n", r.result.constraints.len(), r.contained_in_input));
    out
}

/// Runs one command, writing documents to `out`. Errors carry their exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze { input, axis, emit: e } => {
            let (data, text) = load_model(input)?;
            let report = analyze_data(&data, *axis, Provenance::for_input(Some(text.as_bytes()), None))?;
            emit(&report, Report::to_text, e, out)
        }
        Command::Modify { input, steps, output, axis, format } => {
            let (data, text) = load_model(input)?;
            let steps_text = read(steps)?;
            let steps_list = parse_steps(&steps_text).map_err(|error| CliError::Parse { file: steps.clone(), error })?;
            let mut current = data;
            let mut goodness_reports = Vec::with_capacity(steps_list.len());
            for (i, step) in steps_list.iter().enumerate() {
                let g = goodness(&current, &step.xi, &step.epsilon)?;
                goodness_reports.push(StepGoodness { step: i, good: g.is_good(), report: g });
                current = modify(&current, &step.xi, &step.epsilon).map_err(|e| match e {
                    ModifyError::GoodnessViolation { report, .. } => ModifyError::GoodnessViolation { step: Some(i), report },
                    other => other,
                })?;
            }
            let mut provenance = Provenance::for_input(Some(text.as_bytes()), None);
            provenance.steps_sha256 = Some(report::sha256_hex(steps_text.as_bytes()));
            let mut report = analyze_data(&current, *axis, provenance)?;
            report.goodness = Some(goodness_reports);
            write_file(output, &serialize_model(&current))?;
            emit(&report, Report::to_text, &Emit { output: None, format: *format }, out)
        }
        Command::Cut { input, emit: e } => {
            let text = read(input)?;
            let doc = parse_cut(&text).map_err(|error| CliError::Parse { file: input.clone(), error })?;
            let p = Polytope::new(doc.polytope.dim, doc.polytope.constraints)?;
            let result = match &doc.operation {
                CutOperation::HalfSpace { a, epsilon } => symplectic_cut_polytope(&p, a, epsilon)?,
                CutOperation::Polytope { delta, shift } => {
                    let delta = Polytope::new(delta.dim, delta.constraints.clone())?;
                    generalized_cut(&p, &delta, shift)?
                }
            };
            let witness = result.witness();
            let report = CutReport {
                empty: witness.is_none(),
                contained_in_input: p.contains(&result),
                witness,
                result,
                provenance: Provenance::for_input(Some(text.as_bytes()), None),
            };
            emit(&report, cut_text, e, out)
        }
        Command::Verify { seed, count, emit: e } => {
            let suite = verify(*seed, *count)?;
            let passed = suite.passed();
            let report = VerifyReport { suite, passed, provenance: Provenance::for_input(None, Some(*seed)) };
            emit(&report, suite_text, e, out)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Domain {
                    kind: "SuiteFailure",
                    message: "a modification broke an invariant".into(),
                    details: json!({
                        "b2_increment_failures": report.suite.b2_increment_failures,
                        "euler_decreases": report.suite.euler_decreases,
                        "alternating_sum_failures": report.suite.alternating_sum_failures,
                    }),
                })
            }
        }
        Command::Render { input, axis, svg } => {
            let (data, _) = load_model(input)?;
            if data.n != 2 {
                return Err(ArrangementError::UnsupportedDimension(data.n).into());
            }
            let top = topology_on_axis(&data, axis_of(*axis))?;
            let picture = render_svg(&top.slice, &top.complex)?;
            match svg {
                Some(path) => write_file(path, &picture),
                None => out.write_all(picture.as_bytes()).map_err(|e| CliError::Io { file: "-".into(), message: e.to_string() }),
            }
        }
        Command::Lab { seed, count, tol, emit: e } => {
            let defaults = SampleConfig::default();
            let config = SampleConfig::new(*tol, defaults.fd_step, *seed, *count)
                .map_err(|err| CliError::Usage(err.to_string()))?;
            let lab = run_lab(&config);
            let passed = lab.passed();
            let failing: Vec<&str> = lab.checks.iter().filter(|c| !c.passed).map(|c| c.property).collect();
            let failing = json!(failing);
            let doc = LabDocument { lab, passed, provenance: Provenance::for_input(None, Some(*seed)) };
            emit(&doc, lab_text, e, out)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Domain { kind: "LabFailure", message: "a sampled property failed".into(), details: json!({ "failing": failing }) })
            }
        }
    }
}

/// Runs `cli`, writing the error document to `err` on failure, and returns the
/// process exit status.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = err.write_all(to_structured(&e.document()).as_bytes());
            e.exit_code()
        }
    }
}
