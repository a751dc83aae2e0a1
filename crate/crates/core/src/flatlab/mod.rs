//! Floating-point checks of the flat-model moment-map formulas.
//!
//! A quaternion is a pair `(z, w)` with `q = z + j w`. The circle acts by
//! `(e^{iθ} z, e^{−iθ} w)` with moment map `(½(|z|² − |w|²), i z w)` in
//! `ℝ × ℂ ≅ ℝ³`. For that to be the moment map, the Kähler forms are
//! `F_I = −(i/2)(dz∧dz̄ + dw∧dw̄)` and `F_J + i F_K = dz∧dw`, with
//! `dμ(v) = F(ξ, v)` for the generating vector field `ξ`.

mod lab;

use std::f64::consts::TAU;
use std::ops::{Add, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

pub use lab::{mu_h_preimage, run_lab, sasaki_samples, sphere_moment_map, Check, LabReport, SasakiSample};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LabError {
    #[error("tolerance and step must be positive and the sample count nonzero")]
    InvalidConfig,
    #[error("bound K = {0} is negative")]
    NegativeBound(f64),
    #[error("cone coordinate t = {0} must be positive")]
    NonPositiveT(f64),
    #[error("finite-difference step h = {0} must be positive")]
    NonPositiveStep(f64),
    #[error("component {0} is not one of 1, 2, 3")]
    BadComponent(u8),
    #[error("weights, points and tangent vectors have lengths {weights}, {points}, {tangents}")]
    LengthMismatch { weights: usize, points: usize, tangents: usize },
    #[error("weight {index} is zero")]
    ZeroWeight { index: usize },
    #[error("weights {first} and {second} share a factor")]
    WeightsNotCoprime { first: i64, second: i64 },
}

/// `(z, w) ∈ ℂ²`, the quaternion `z + j w`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct HPoint {
    pub z: Complex64,
    pub w: Complex64,
}

impl HPoint {
    pub const ORIGIN: HPoint = HPoint { z: Complex64::new(0.0, 0.0), w: Complex64::new(0.0, 0.0) };

    pub fn new(z: Complex64, w: Complex64) -> Self {
        HPoint { z, w }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }

    pub fn scale(&self, s: f64) -> HPoint {
        HPoint { z: self.z * s, w: self.w * s }
    }

    pub fn dist(&self, other: &HPoint) -> f64 {
        (*self - *other).norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.z.is_finite() && self.w.is_finite()
    }
}

impl Add for HPoint {
    type Output = HPoint;
    fn add(self, o: HPoint) -> HPoint {
        HPoint { z: self.z + o.z, w: self.w + o.w }
    }
}

impl Sub for HPoint {
    type Output = HPoint;
    fn sub(self, o: HPoint) -> HPoint {
        HPoint { z: self.z - o.z, w: self.w - o.w }
    }
}

/// A point of `ℝ × ℂ ≅ ℝ³`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct R3Val {
    pub r: f64,
    pub c: Complex64,
}

impl R3Val {
    pub const ZERO: R3Val = R3Val { r: 0.0, c: Complex64::new(0.0, 0.0) };

    pub fn new(r: f64, c: Complex64) -> Self {
        R3Val { r, c }
    }

    pub fn norm(&self) -> f64 {
        (self.r * self.r + self.c.norm_sqr()).sqrt()
    }

    pub fn scale(&self, s: f64) -> R3Val {
        R3Val { r: self.r * s, c: self.c * s }
    }

    pub fn component(&self, k: u8) -> Option<f64> {
        match k {
            1 => Some(self.r),
            2 => Some(self.c.re),
            3 => Some(self.c.im),
            _ => None,
        }
    }
}

impl Add for R3Val {
    type Output = R3Val;
    fn add(self, o: R3Val) -> R3Val {
        R3Val { r: self.r + o.r, c: self.c + o.c }
    }
}

impl Sub for R3Val {
    type Output = R3Val;
    fn sub(self, o: R3Val) -> R3Val {
        R3Val { r: self.r - o.r, c: self.c - o.c }
    }
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct SampleConfig {
    pub tol: f64,
    pub fd_step: f64,
    pub seed: u64,
    pub count: usize,
}

impl SampleConfig {
    pub fn new(tol: f64, fd_step: f64, seed: u64, count: usize) -> Result<Self, LabError> {
        if !(tol > 0.0 && fd_step > 0.0 && count >= 1) {
            return Err(LabError::InvalidConfig);
        }
        Ok(SampleConfig { tol, fd_step, seed, count })
    }

    pub fn with_seed(seed: u64) -> Self {
        SampleConfig { seed, ..SampleConfig::default() }
    }
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { tol: 1e-9, fd_step: 1e-5, seed: 0, count: 10_000 }
    }
}

pub fn mu_h(p: &HPoint) -> R3Val {
    R3Val::new(0.5 * (p.z.norm_sqr() - p.w.norm_sqr()), I * p.z * p.w)
}

pub fn act_h(theta: f64, p: &HPoint) -> HPoint {
    let e = Complex64::from_polar(1.0, theta);
    HPoint::new(e * p.z, e.conj() * p.w)
}

/// Defect of `(m, z, w)` from the level `eps` of the diagonal moment map.
pub fn phi_residual(mu_m: &R3Val, p: &HPoint, eps: &R3Val) -> R3Val {
    *mu_m - mu_h(p) - *eps
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// The angle in `[0, 2π)` carrying `p` to `q`, when both sit on the same
/// nonzero fibre of [`mu_h`].
///
/// The phase is read off the larger of the two components, which keeps it
/// well conditioned. Fibre distance grows like the square root of a moment
/// discrepancy, so the final check on `act_h(θ, p) ≈ q` uses `√tol` relative
/// to `|p|`.
pub fn fibre_align(p: &HPoint, q: &HPoint, tol: f64) -> Option<f64> {
    let (mp, mq) = (mu_h(p), mu_h(q));
    if (mp - mq).norm() > tol || mp.norm() <= tol {
        return None;
    }
    let theta = if p.z.norm_sqr() >= p.w.norm_sqr() { (q.z / p.z).arg() } else { -(q.w / p.w).arg() };
    let theta = wrap_angle(theta);
    let scale = p.norm_sqr().sqrt().max(1.0);
    (act_h(theta, p).dist(q) <= tol.sqrt() * scale).then_some(theta)
}

fn weighted_mu(weights: &[i64], p: &[HPoint]) -> R3Val {
    weights.iter().zip(p).fold(R3Val::ZERO, |acc, (&a, q)| acc + mu_h(q).scale(a as f64))
}

/// `F_component(X, Y)` on one copy of `ℍ`.
fn kahler_form(component: u8, x: &HPoint, y: &HPoint) -> f64 {
    match component {
        // −(i/2)(dz∧dz̄ + dw∧dw̄)(X, Y) = Im(X_z Ȳ_z + X_w Ȳ_w)
        1 => (x.z * y.z.conj() + x.w * y.w.conj()).im,
        2 => (x.z * y.w - y.z * x.w).re,
        _ => (x.z * y.w - y.z * x.w).im,
    }
}

/// Generating vector field of the weighted action at `p`.
fn killing_field(weights: &[i64], p: &[HPoint]) -> Vec<HPoint> {
    weights
        .iter()
        .zip(p)
        .map(|(&a, q)| HPoint::new(I * (a as f64) * q.z, -I * (a as f64) * q.w))
        .collect()
}

/// Central difference of one moment-map component along `v` against
/// `F(ξ_p, v)` on `ℍ^d` with the weighted circle action.
///
/// The difference is taken along `s ↦ cos(s) p + sin(s) v`, which leaves `p`
/// with velocity `v`. On a straight line a quadratic map has an exact central
/// difference, so this path is what gives the residual a genuine `h²` term.
pub fn triham_residual(weights: &[i64], p: &[HPoint], v: &[HPoint], component: u8, h: f64) -> Result<f64, LabError> {
    if weights.len() != p.len() || p.len() != v.len() {
        return Err(LabError::LengthMismatch { weights: weights.len(), points: p.len(), tangents: v.len() });
    }
    if !(1..=3).contains(&component) {
        return Err(LabError::BadComponent(component));
    }
    if h.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(LabError::NonPositiveStep(h));
    }
    let along = |s: f64| -> Vec<HPoint> { p.iter().zip(v).map(|(a, b)| a.scale(s.cos()) + b.scale(s.sin())).collect() };
    let at = |s: f64| weighted_mu(weights, &along(s)).component(component).expect("checked component");
    let fd = (at(h) - at(-h)) / (2.0 * h);
    let exact: f64 = killing_field(weights, p).iter().zip(v).map(|(x, y)| kahler_form(component, x, y)).sum();
    Ok((fd - exact).abs())
}

/// `residual(h) / residual(h/2)`, or `None` when the finer residual is not
/// clear of round-off: the truncation term is `|dμ(v)| (1 − sin(2h)/(2h))`,
/// while the difference quotient carries an error of order `ε_mach |μ| / h`,
/// and a ratio against noise says nothing about the order.
pub fn richardson_ratio(weights: &[i64], p: &[HPoint], v: &[HPoint], component: u8, h: f64) -> Result<Option<f64>, LabError> {
    let coarse = triham_residual(weights, p, v, component, h)?;
    let fine = triham_residual(weights, p, v, component, h / 2.0)?;
    let scale: f64 = weights.iter().zip(p.iter().zip(v)).map(|(&a, (x, y))| a.unsigned_abs() as f64 * (x.norm_sqr() + y.norm_sqr())).sum();
    let noise = f64::EPSILON * scale / h;
    Ok((fine > 20.0 * noise).then(|| coarse / fine))
}

pub fn hs_mu(p: &HPoint) -> R3Val {
    R3Val::new(0.5 * (p.z.norm_sqr() + p.w.norm_sqr()), I * p.z * p.w.conj())
}

/// `v` lies in the cone `a ≥ |b|`.
pub fn hs_in_cone(v: &R3Val, tol: f64) -> bool {
    v.r >= v.c.norm() - tol
}

pub fn hs_phi_residual(mu_m: &R3Val, p: &HPoint, eps: &R3Val) -> R3Val {
    *mu_m - hs_mu(p) - *eps
}

pub fn hs_cut_image_member(mu_m: &R3Val, eps: &R3Val, tol: f64) -> bool {
    hs_in_cone(&(*mu_m - *eps), tol)
}

/// The other preimage `(w̄, z̄)` of `hs_mu(z, w)`.
pub fn hs_partner(p: &HPoint) -> HPoint {
    HPoint::new(p.w.conj(), p.z.conj())
}

/// Hypersymplectic circle action `(e^{−iθ} z, e^{−iθ} w)`.
pub fn hs_act(theta: f64, p: &HPoint) -> HPoint {
    let e = Complex64::from_polar(1.0, -theta);
    HPoint::new(e * p.z, e * p.w)
}

/// Whether `q = hs_act(θ, p)` for some `θ`, up to `tol`.
pub fn hs_same_orbit(p: &HPoint, q: &HPoint, tol: f64) -> bool {
    if (p.z.norm() - q.z.norm()).abs() > tol || (p.w.norm() - q.w.norm()).abs() > tol {
        return false;
    }
    let (lead_p, lead_q) = if p.z.norm_sqr() >= p.w.norm_sqr() { (p.z, q.z) } else { (p.w, q.w) };
    if lead_p.norm() <= tol {
        return q.norm_sqr().sqrt() <= tol;
    }
    let theta = -(lead_q / lead_p).arg();
    hs_act(theta, p).dist(q) <= tol
}

/// Level-set defect `t² μ_S − μ_H(p)` and unit-constraint defect
/// `t² + |z|² + |w|² − 1` for a cone point at radius `t`.
pub fn sasaki_residual(t: f64, mu_s: &R3Val, p: &HPoint) -> Result<(R3Val, f64), LabError> {
    if t.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(LabError::NonPositiveT(t));
    }
    let t2 = t * t;
    Ok((mu_s.scale(t2) - mu_h(p), t2 + p.norm_sqr() - 1.0))
}

/// Lower bound `1/(1 + 2K)` for `t²` when `|μ_S| ≤ K`.
pub fn sasaki_t_bound(k: f64) -> Result<f64, LabError> {
    if k.is_nan() || k < 0.0 {
        return Err(LabError::NegativeBound(k));
    }
    Ok(1.0 / (1.0 + 2.0 * k))
}

/// Weights of the modifying circle on `S × ℍ`: the sphere weights then `−1`.
pub fn sasaki_modify_weights(p: &[i64]) -> Result<Vec<i64>, LabError> {
    if let Some(index) = p.iter().position(|&x| x == 0) {
        return Err(LabError::ZeroWeight { index });
    }
    for (i, &a) in p.iter().enumerate() {
        for &b in &p[i + 1..] {
            if a.gcd(&b) != 1 {
                return Err(LabError::WeightsNotCoprime { first: a, second: b });
            }
        }
    }
    let mut out = p.to_vec();
    out.push(-1);
    Ok(out)
}
