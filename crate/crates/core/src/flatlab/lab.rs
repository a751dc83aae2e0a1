use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::*;

/// Step at which the finite-difference claims are made.
pub const TRIHAM_STEP: f64 = 1e-4;
/// Tolerance for the finite-difference residual at [`TRIHAM_STEP`].
pub const TRIHAM_TOL: f64 = 1e-6;
/// Slack on the `t²` bound.
pub const SASAKI_SLACK: f64 = 1e-12;
/// Sphere samples drawn per sample of the other properties.
pub const SASAKI_OVERSAMPLE: usize = 10;

/// Sample `index` of property `tag` draws from `seed ⊕ index` on its own
/// stream, so no sample depends on the evaluation order.
fn sample_rng(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index);
    rng.set_stream(tag);
    rng
}

fn complex_in(rng: &mut impl Rng, r: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}

fn point_in(rng: &mut impl Rng, r: f64) -> HPoint {
    HPoint::new(complex_in(rng, r), complex_in(rng, r))
}

/// A point `(z, w)` with `mu_h(z, w) = v`, with `z` real and nonnegative.
///
/// `|z|² − |w|² = 2r` and `|z| |w| = |c|`, so `|z|², |w|² = ±r + √(r² + |c|²)`;
/// the smaller root is taken as `|c|²` over the larger one to avoid
/// cancellation.
pub fn mu_h_preimage(v: &R3Val) -> HPoint {
    let c2 = v.c.norm_sqr();
    let s = v.r.hypot(v.c.norm());
    let (a2, b2) = if v.r >= 0.0 {
        let a2 = v.r + s;
        (a2, if a2 > 0.0 { c2 / a2 } else { 0.0 })
    } else {
        let b2 = -v.r + s;
        (c2 / b2, b2)
    };
    let z = a2.sqrt();
    // i z w = c, so w = −i c / z.
    let w = if z > 0.0 { -I * v.c / z } else { Complex64::new(b2.sqrt(), 0.0) };
    HPoint::new(Complex64::new(z, 0.0), w)
}

/// `Σ p_k μ_H(q_k)` on `ℍ^m`.
pub fn sphere_moment_map(weights: &[i64], q: &[HPoint]) -> R3Val {
    super::weighted_mu(weights, q)
}

/// A solution of the modified level set over a sampled sphere point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SasakiSample {
    pub mu_s: R3Val,
    pub t: f64,
    pub p: HPoint,
}

/// Unit-sphere samples `x ∈ S^{4m−1}` with the cone solution over each:
/// `t² = 1/(1 + 2|μ_S(x)|)` and `p` the preimage of `t² μ_S(x)`, using
/// `|z|² + |w|² = 2|μ_H(z, w)|`.
pub fn sasaki_samples(weights: &[i64], seed: u64, count: usize) -> Vec<SasakiSample> {
    (0..count as u64)
        .map(|i| {
            let mut rng = sample_rng(seed, 9, i);
            let x: Vec<HPoint> = loop {
                let x: Vec<HPoint> = weights.iter().map(|_| point_in(&mut rng, 1.0)).collect();
                let r: f64 = x.iter().map(HPoint::norm_sqr).sum::<f64>().sqrt();
                if r > 1e-3 {
                    break x.iter().map(|q| q.scale(1.0 / r)).collect();
                }
            };
            let mu_s = sphere_moment_map(weights, &x);
            let t2 = 1.0 / (1.0 + 2.0 * mu_s.norm());
            SasakiSample { mu_s, t: t2.sqrt(), p: mu_h_preimage(&mu_s.scale(t2)) }
        })
        .collect()
}

/// One property of the lab: the worst observed value and its admissible range.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub property: &'static str,
    pub value: f64,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub passed: bool,
}

impl Check {
    fn at_most(property: &'static str, value: f64, max: f64) -> Check {
        Check { property, value, min: None, max: Some(max), passed: value <= max }
    }

    fn at_least(property: &'static str, value: f64, min: f64) -> Check {
        Check { property, value, min: Some(min), max: None, passed: value >= min }
    }

    fn within(property: &'static str, value: f64, min: f64, max: f64) -> Check {
        Check { property, value, min: Some(min), max: Some(max), passed: (min..=max).contains(&value) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LabReport {
    pub seed: u64,
    pub count: usize,
    pub tol: f64,
    pub fd_step: f64,
    pub sasaki_k: f64,
    pub checks: Vec<Check>,
}

impl LabReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, property: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.property == property)
    }
}

fn max_over(count: usize, f: impl Fn(u64) -> f64) -> f64 {
    (0..count as u64).map(f).fold(0.0, f64::max)
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

struct TrihamSample {
    weights: Vec<i64>,
    p: Vec<HPoint>,
    v: Vec<HPoint>,
}

fn triham_sample(seed: u64, i: u64) -> TrihamSample {
    let mut rng = sample_rng(seed, 4, i);
    let d = rng.gen_range(1..=3);
    let weights = (0..d)
        .map(|_| {
            let a: i64 = rng.gen_range(1..=3);
            if rng.gen_bool(0.5) {
                a
            } else {
                -a
            }
        })
        .collect();
    let p = (0..d).map(|_| point_in(&mut rng, 1.0)).collect();
    let v = (0..d).map(|_| point_in(&mut rng, 1.0)).collect();
    TrihamSample { weights, p, v }
}

/// Runs every property on seeded samples and records the worst case of each.
pub fn run_lab(config: &SampleConfig) -> LabReport {
    let SampleConfig { tol, fd_step, seed, count } = *config;
    let mut checks = Vec::new();

    let preimage = max_over(count, |i| {
        let v = {
            let mut rng = sample_rng(seed, 1, i);
            R3Val::new(rng.gen_range(-5.0..=5.0), complex_in(&mut rng, 5.0))
        };
        (mu_h(&mu_h_preimage(&v)) - v).norm()
    });
    checks.push(Check::at_most("mu_h_preimage_residual", preimage, tol));

    let mut invariance = 0.0f64;
    let mut align = 0.0f64;
    for i in 0..count as u64 {
        let mut rng = sample_rng(seed, 2, i);
        let p = loop {
            let p = point_in(&mut rng, 2.0);
            if mu_h(&p).norm() > 1e-3 {
                break p;
            }
        };
        let theta = rng.gen_range(0.0..TAU);
        let q = act_h(theta, &p);
        invariance = invariance.max((mu_h(&q) - mu_h(&p)).norm());
        let err = fibre_align(&p, &q, tol).map_or(f64::INFINITY, |got| angle_gap(got, theta));
        align = align.max(err);
    }
    checks.push(Check::at_most("action_invariance", invariance, tol));
    checks.push(Check::at_most("fibre_align_angle_error", align, tol));

    let mut triham = 0.0f64;
    let mut triham_fd_step = 0.0f64;
    let mut origin = 0.0f64;
    let (mut ratio_lo, mut ratio_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ratio_used = 0usize;
    for i in 0..count as u64 {
        let s = triham_sample(seed, i);
        let zeros = vec![HPoint::ORIGIN; s.p.len()];
        for k in 1..=3 {
            let res = |p: &[HPoint], h: f64| triham_residual(&s.weights, p, &s.v, k, h).expect("well-formed sample");
            triham = triham.max(res(&s.p, TRIHAM_STEP));
            triham_fd_step = triham_fd_step.max(res(&s.p, fd_step));
            origin = origin.max(res(&zeros, TRIHAM_STEP));
            if let Some(r) = richardson_ratio(&s.weights, &s.p, &s.v, k, TRIHAM_STEP).expect("well-formed sample") {
                ratio_used += 1;
                ratio_lo = ratio_lo.min(r);
                ratio_hi = ratio_hi.max(r);
            }
        }
    }
    checks.push(Check::at_most("triham_residual", triham, TRIHAM_TOL));
    checks.push(Check::at_most("triham_residual_at_fd_step", triham_fd_step, TRIHAM_TOL));
    checks.push(Check::at_most("triham_residual_at_origin", origin, 0.0));
    checks.push(Check::at_least("richardson_ratio_min", ratio_lo, 3.5));
    checks.push(Check::at_most("richardson_ratio_max", ratio_hi, 4.5));
    // Samples whose derivative is too small to rise above round-off are
    // skipped; most must remain.
    let used = ratio_used as f64 / (3 * count) as f64;
    checks.push(Check::at_least("richardson_sample_fraction", used, 0.5));

    let mut partner = 0.0f64;
    let mut cone = 0.0f64;
    let mut branch_mismatches = 0usize;
    for i in 0..count as u64 {
        let mut rng = sample_rng(seed, 6, i);
        let p = point_in(&mut rng, 2.0);
        let image = hs_mu(&p);
        partner = partner.max((image - hs_mu(&hs_partner(&p))).norm());
        cone = cone.max(image.c.norm() - image.r);
        let radius = rng.gen_range(0.1..2.0);
        let on = HPoint::new(
            Complex64::from_polar(radius, rng.gen_range(0.0..TAU)),
            Complex64::from_polar(radius, rng.gen_range(0.0..TAU)),
        );
        if !hs_same_orbit(&on, &hs_partner(&on), tol) {
            branch_mismatches += 1;
        }
        if (p.z.norm() - p.w.norm()).abs() > 1e-6 && hs_same_orbit(&p, &hs_partner(&p), tol) {
            branch_mismatches += 1;
        }
    }
    checks.push(Check::at_most("hs_partner_image_difference", partner, tol));
    checks.push(Check::at_most("hs_cone_excess", cone, tol));
    checks.push(Check::at_most("hs_branch_orbit_mismatches", branch_mismatches as f64, 0.0));

    let weights = [1, 1];
    let samples = sasaki_samples(&weights, seed, count * SASAKI_OVERSAMPLE);
    let k = samples.iter().map(|s| s.mu_s.norm()).fold(0.0, f64::max);
    let bound = sasaki_t_bound(k).expect("norms are nonnegative");
    let mut residual = 0.0f64;
    let mut margin = f64::INFINITY;
    for s in &samples {
        let (level, unit) = sasaki_residual(s.t, &s.mu_s, &s.p).expect("t is positive");
        residual = residual.max(level.norm()).max(unit.abs());
        margin = margin.min(s.t * s.t - bound);
    }
    checks.push(Check::at_most("sasaki_residual", residual, tol));
    checks.push(Check::at_least("sasaki_bound_margin", margin, -SASAKI_SLACK));
    let weight_ok = sasaki_modify_weights(&weights) == Ok(vec![1, 1, -1]);
    checks.push(Check::within("sasaki_weights_exact", if weight_ok { 0.0 } else { 1.0 }, 0.0, 0.0));

    LabReport { seed, count, tol, fd_step, sasaki_k: k, checks }
}
