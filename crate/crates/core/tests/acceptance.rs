//! One line per acceptance criterion. Runs without the test harness so the
//! lines are always printed; exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use hkmod_core::exact::Rat;
use hkmod_core::flatlab::{run_lab, LabReport, SampleConfig};
use hkmod_core::modify::suite::{verify, SuiteReport};
use hkmod_core::modify::{modify, real_level, CirclePick};
use hkmod_core::toric::examples::{cotangent_p2, multi_instanton};
use hkmod_core::toric::{topology, PoincarePoly, ToricHKData};

const SUITE_SEED: u64 = 0;
const SUITE_COUNT: u64 = 200;

struct Outcome {
    id: u8,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Face counts of every model seen, for the invariants that apply to all.
#[derive(Default)]
struct Seen(Vec<Vec<usize>>);

impl Seen {
    fn record(&mut self, data: &ToricHKData) -> (Vec<usize>, Vec<u64>, u64) {
        let top = topology(data).expect("model is usable");
        self.0.push(top.counts().to_vec());
        (top.counts().to_vec(), top.betti().to_vec(), top.euler())
    }
}

fn alternating(counts: &[usize]) -> i64 {
    counts.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
}

fn criterion_1(seen: &mut Seen) -> Outcome {
    let ((d, b, _), t) = timed(|| seen.record(&cotangent_p2()));
    Outcome {
        id: 1,
        name: "cotangent bundle of the projective plane",
        passed: d == [3, 3, 1] && b == [1, 1, 1] && t < Duration::from_secs(1),
        detail: format!("d = {d:?}, betti = {b:?}, {t:.2?}"),
    }
}

fn criterion_2(seen: &mut Seen) -> Outcome {
    let (results, t) = timed(|| {
        let data = cotangent_p2();
        let parallel = modify(&data, &CirclePick::new(vec![1, 1, 0]), &real_level(Rat::new(1, 2))).expect("good step");
        let generic = modify(&data, &CirclePick::new(vec![1, 2, 0]), &real_level(Rat::new(1, 3))).expect("good step");
        (seen.record(&parallel), seen.record(&generic))
    });
    let ((dp, bp, _), (dg, bg, _)) = results;
    Outcome {
        id: 2,
        name: "modifications of the cotangent bundle",
        passed: dp[1..] == [6, 2] && bp == [1, 2, 2] && dg[1..] == [8, 3] && bg == [1, 2, 3] && t < Duration::from_secs(1),
        detail: format!("parallel d = {dp:?} betti = {bp:?}; generic d = {dg:?} betti = {bg:?}; {t:.2?}"),
    }
}

fn criterion_3(seen: &mut Seen) -> Outcome {
    let (rows, t) = timed(|| {
        (1..=6)
            .map(|k| {
                let (_, b, chi) = seen.record(&multi_instanton(k));
                (k, b[1], chi)
            })
            .collect::<Vec<_>>()
    });
    let ok = rows.iter().all(|&(k, b2, chi)| b2 == k as u64 - 1 && chi == k as u64);
    Outcome {
        id: 3,
        name: "multi-instanton chain",
        passed: ok && t < Duration::from_secs(1),
        detail: format!("(k, b2, chi) = {rows:?}, {t:.2?}"),
    }
}

fn criterion_4(report: &SuiteReport, t: Duration) -> Outcome {
    Outcome {
        id: 4,
        name: "b2 increment on seeded good modifications",
        passed: report.outcomes.len() as u64 == SUITE_COUNT
            && report.b2_increment_failures.is_empty()
            && t < Duration::from_secs(60),
        detail: format!(
            "{} instances, {} failures, max n = {}, max d = {}, {t:.2?}",
            report.outcomes.len(),
            report.b2_increment_failures.len(),
            report.outcomes.iter().map(|o| o.n).max().unwrap_or(0),
            report.outcomes.iter().map(|o| o.d + 1).max().unwrap_or(0),
        ),
    }
}

fn all_counts(seen: &Seen, report: &SuiteReport) -> Vec<Vec<usize>> {
    let mut out = seen.0.clone();
    for o in &report.outcomes {
        out.push(o.counts_before.clone());
        out.push(o.counts_after.clone());
    }
    out
}

fn criterion_5(counts: &[Vec<usize>]) -> Outcome {
    let bad = counts.iter().filter(|d| alternating(d) != 1).count();
    Outcome {
        id: 5,
        name: "alternating face count is one",
        passed: bad == 0,
        detail: format!("{} complexes, {bad} failures", counts.len()),
    }
}

fn criterion_6(counts: &[Vec<usize>], report: &SuiteReport) -> Outcome {
    let mut bad = 0;
    for d in counts {
        let p = PoincarePoly::from_counts(d).expect("nonnegative Betti numbers");
        let chi: i64 = p.coeffs.iter().map(|&b| b as i64).sum();
        if chi != p.eval(1) || chi != p.eval(-1) || chi != d[0] as i64 {
            bad += 1;
        }
    }
    // The recorded Euler characteristics must agree with the counts too.
    for o in &report.outcomes {
        if o.euler_before != o.counts_before[0] as u64 || o.euler_after != o.counts_after[0] as u64 {
            bad += 1;
        }
    }
    Outcome {
        id: 6,
        name: "Euler characteristic bookkeeping",
        passed: bad == 0,
        detail: format!("{} complexes, {bad} failures", counts.len()),
    }
}

fn lab_checks(lab: &LabReport, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        match lab.check(name) {
            Some(c) => {
                ok &= c.passed;
                parts.push(format!("{name} = {:.3e}", c.value));
            }
            None => {
                ok = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    (ok, parts.join(", "))
}

fn criterion_lab(id: u8, name: &'static str, lab: &LabReport, t: Duration, limit: u64, names: &[&str]) -> Outcome {
    let (ok, detail) = lab_checks(lab, names);
    Outcome {
        id,
        name,
        passed: ok && lab.count >= 10_000 && lab.tol <= 1e-9 && t < Duration::from_secs(limit),
        detail: format!("{detail}; {} samples, {t:.2?}", lab.count),
    }
}

fn criterion_10(suite: &SuiteReport, lab: &LabReport) -> Outcome {
    let first = (serde_json::to_string(suite).unwrap(), serde_json::to_string(lab).unwrap());
    let suite_again = verify(SUITE_SEED, SUITE_COUNT).expect("suite runs");
    let lab_again = run_lab(&SampleConfig::default());
    let second = (serde_json::to_string(&suite_again).unwrap(), serde_json::to_string(&lab_again).unwrap());
    Outcome {
        id: 10,
        name: "determinism",
        passed: first == second,
        detail: format!("{} + {} report bytes compared", first.0.len(), first.1.len()),
    }
}

fn main() {
    let mut seen = Seen::default();
    let mut outcomes = vec![criterion_1(&mut seen), criterion_2(&mut seen), criterion_3(&mut seen)];

    let (suite, suite_time) = timed(|| verify(SUITE_SEED, SUITE_COUNT).expect("suite runs"));
    outcomes.push(criterion_4(&suite, suite_time));
    let counts = all_counts(&seen, &suite);
    outcomes.push(criterion_5(&counts));
    outcomes.push(criterion_6(&counts, &suite));

    let (lab, lab_time) = timed(|| run_lab(&SampleConfig::default()));
    outcomes.push(criterion_lab(
        7,
        "moment-map lab",
        &lab,
        lab_time,
        10,
        &[
            "mu_h_preimage_residual",
            "fibre_align_angle_error",
            "triham_residual",
            "richardson_ratio_min",
            "richardson_ratio_max",
            "richardson_sample_fraction",
        ],
    ));
    outcomes.push(criterion_lab(
        8,
        "hypersymplectic images and orbits",
        &lab,
        lab_time,
        5,
        &["hs_partner_image_difference", "hs_cone_excess", "hs_branch_orbit_mismatches"],
    ));
    outcomes.push(criterion_lab(
        9,
        "3-Sasaki bound and weights",
        &lab,
        lab_time,
        5,
        &["sasaki_residual", "sasaki_bound_margin", "sasaki_weights_exact"],
    ));
    outcomes.push(criterion_10(&suite, &lab));

    for o in &outcomes {
        println!("criterion {:>2} {}: {} ({})", o.id, if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed", outcomes.len());
}
