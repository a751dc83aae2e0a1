//! Defining data of a toric hyperkähler space and its topology.
//!
//! The space is fixed by normals `u_k ∈ ℤⁿ` and levels `λ_k ∈ ℚ³`. Each pair
//! defines a flat `{y ∈ ℝⁿ ⊗ ℝ³ : ⟨y, u_k⟩ = λ_k}` of codimension three. The
//! Betti numbers come from the bounded complex of the hyperplane slice
//! `⟨x, u_k⟩ = λ_k¹`, via `P_t = Σ_k d_k (t² − 1)^k`.

mod rotation;

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::arrangement::{bounded_complex, enumerate_faces, Arrangement, ArrangementError, BoundedComplex, Hyperplane};
use crate::exact::{determinant, nullspace, rank, Rat, RatMat, RatVec};

pub use rotation::{rotation_sequence, Rotation3, MAX_ROTATION_ATTEMPTS};

/// Most flats a model may carry.
pub const MAX_FLATS: usize = crate::arrangement::MAX_HYPERPLANES;
/// Largest quaternionic dimension a model may have.
pub const MAX_QUATERNIONIC_DIM: usize = crate::arrangement::MAX_DIM;

/// A level `(λ¹, λ², λ³) ∈ ℚ³`, ordered lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Level3 {
    pub l1: Rat,
    pub l2: Rat,
    pub l3: Rat,
}

impl Level3 {
    pub fn new(l1: Rat, l2: Rat, l3: Rat) -> Self {
        Level3 { l1, l2, l3 }
    }

    pub fn from_ints(l1: i64, l2: i64, l3: i64) -> Self {
        Level3::new(Rat::from(l1), Rat::from(l2), Rat::from(l3))
    }

    pub fn zero() -> Self {
        Level3::default()
    }

    pub fn components(&self) -> [&Rat; 3] {
        [&self.l1, &self.l2, &self.l3]
    }

    pub fn component(&self, axis: SliceAxis) -> &Rat {
        self.components()[axis.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.l1.is_zero() && self.l2.is_zero() && self.l3.is_zero()
    }

    pub fn scale(&self, factor: &Rat) -> Level3 {
        Level3::new(&self.l1 * factor, &self.l2 * factor, &self.l3 * factor)
    }

    pub fn add(&self, other: &Level3) -> Level3 {
        Level3::new(&self.l1 + &other.l1, &self.l2 + &other.l2, &self.l3 + &other.l3)
    }
}

impl fmt::Display for Level3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.l1, self.l2, self.l3)
    }
}

impl Serialize for Level3 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [&self.l1, &self.l2, &self.l3].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Level3 {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [l1, l2, l3] = <[Rat; 3]>::deserialize(deserializer)?;
        Ok(Level3 { l1, l2, l3 })
    }
}

/// Which coordinate of `ℝ³` the hyperplane slice uses.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum SliceAxis {
    #[default]
    First,
    Second,
    Third,
}

impl SliceAxis {
    /// Axis from its one-based number.
    pub fn from_number(axis: u8) -> Option<SliceAxis> {
        match axis {
            1 => Some(SliceAxis::First),
            2 => Some(SliceAxis::Second),
            3 => Some(SliceAxis::Third),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            SliceAxis::First => 0,
            SliceAxis::Second => 1,
            SliceAxis::Third => 2,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Flat {
    pub u: Vec<i64>,
    pub level: Level3,
}

impl Flat {
    pub fn new(u: Vec<i64>, level: Level3) -> Self {
        Flat { u, level }
    }

    pub fn normal(&self) -> RatVec {
        RatVec::from_ints(&self.u)
    }
}

/// Normals and levels of a toric hyperkähler space of quaternionic
/// dimension `n`. Construction does not validate; see [`validate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ToricHKData {
    pub n: usize,
    pub flats: Vec<Flat>,
}

impl ToricHKData {
    pub fn new(n: usize, flats: Vec<Flat>) -> Self {
        ToricHKData { n, flats }
    }

    pub fn d(&self) -> usize {
        self.flats.len()
    }

    pub fn with_flat(&self, flat: Flat) -> ToricHKData {
        let mut out = self.clone();
        out.flats.push(flat);
        out
    }

    fn normals_matrix(&self, subset: &[usize]) -> RatMat {
        RatMat::new(subset.iter().map(|&k| self.flats[k].normal()).collect(), self.n)
            .expect("normals validated to dimension n")
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum Diagnostic {
    WrongDimension { flat: usize, expected: usize, found: usize },
    ZeroNormal { flat: usize },
    SpanFailure { rank: usize, n: usize },
    DuplicateFlat { first: usize, second: usize },
    CapacityExceeded { flats: usize, n: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::WrongDimension { flat, expected, found } => {
                write!(f, "flat {flat}: normal has {found} entries, expected {expected}")
            }
            Diagnostic::ZeroNormal { flat } => write!(f, "flat {flat}: zero normal"),
            Diagnostic::SpanFailure { rank, n } => write!(f, "normals span rank {rank}, need {n}"),
            Diagnostic::DuplicateFlat { first, second } => write!(f, "flats {first} and {second} coincide"),
            Diagnostic::CapacityExceeded { flats, n } => write!(
                f,
                "{flats} flats in dimension {n} exceeds capacity ({MAX_FLATS} flats, dimension {MAX_QUATERNIONIC_DIM})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ToricError {
    #[error("invalid toric data: {}", .0.iter().map(ToString::to_string).join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("flat index {index} out of range for {len} flats")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("flat subset is empty")]
    EmptySubset,
    #[error("point has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0} flats meet: the space is not an orbifold")]
    NotOrbifold(usize),
    #[error("no rotation among {0} attempts makes the hyperplane slice faithful")]
    SliceUnfixable(usize),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

/// Structural checks. An empty list means the data is usable.
pub fn validate(data: &ToricHKData) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut dims_ok = true;
    for (k, flat) in data.flats.iter().enumerate() {
        if flat.u.len() != data.n {
            diags.push(Diagnostic::WrongDimension { flat: k, expected: data.n, found: flat.u.len() });
            dims_ok = false;
        } else if flat.u.iter().all(|&x| x == 0) {
            diags.push(Diagnostic::ZeroNormal { flat: k });
        }
    }
    if dims_ok {
        let all: Vec<usize> = (0..data.d()).collect();
        let r = rank(&data.normals_matrix(&all));
        if r < data.n {
            diags.push(Diagnostic::SpanFailure { rank: r, n: data.n });
        }
    }
    for (i, j) in (0..data.d()).tuple_combinations() {
        if data.flats[i] == data.flats[j] {
            diags.push(Diagnostic::DuplicateFlat { first: i, second: j });
        }
    }
    if data.d() > MAX_FLATS || data.n > MAX_QUATERNIONIC_DIM {
        diags.push(Diagnostic::CapacityExceeded { flats: data.d(), n: data.n });
    }
    diags
}

fn check_subset(data: &ToricHKData, subset: &[usize]) -> Result<(), ToricError> {
    if subset.is_empty() {
        return Err(ToricError::EmptySubset);
    }
    if let Some(&index) = subset.iter().find(|&&k| k >= data.d()) {
        return Err(ToricError::IndexOutOfRange { index, len: data.d() });
    }
    Ok(())
}

/// Whether `⟨y, u_k⟩ = value_k` is solvable, given per-flat values in each
/// `ℝ³` slot: every linear dependency `Σ c_k u_k = 0` must annihilate the
/// values.
fn consistent<'a>(data: &ToricHKData, subset: &[usize], values: impl Fn(usize) -> Vec<&'a Rat>) -> bool {
    let deps = nullspace(&data.normals_matrix(subset).transpose());
    let vals: Vec<Vec<&Rat>> = subset.iter().map(|&k| values(k)).collect();
    let slots = vals.first().map_or(0, Vec::len);
    deps.iter().all(|c| {
        (0..slots).all(|slot| {
            let s: Rat = c.iter().zip(&vals).map(|(ck, v)| ck * v[slot]).sum();
            s.is_zero()
        })
    })
}

/// Whether the flats indexed by `subset` have a common point in `ℝⁿ ⊗ ℝ³`.
pub fn flats_meet(data: &ToricHKData, subset: &[usize]) -> Result<bool, ToricError> {
    check_subset(data, subset)?;
    Ok(consistent(data, subset, |k| data.flats[k].level.components().to_vec()))
}

fn slice_meets(data: &ToricHKData, levels: &[Level3], axis: SliceAxis, subset: &[usize]) -> bool {
    consistent(data, subset, |k| vec![levels[k].component(axis)])
}

/// True when no `n + 1` flats meet, i.e. the space has at worst orbifold
/// singularities.
pub fn orbifold_check(data: &ToricHKData) -> bool {
    first_meeting_subset(data, data.n + 1).is_none()
}

fn first_meeting_subset(data: &ToricHKData, size: usize) -> Option<Vec<usize>> {
    (0..data.d())
        .combinations(size)
        .find(|s| flats_meet(data, s).expect("indices in range"))
}

/// Meeting `n`-subsets whose normals are not a `ℤ`-basis of `ℤⁿ`. Empty for
/// smooth data; nonempty entries mark orbifold points.
pub fn smoothness_defects(data: &ToricHKData) -> Vec<Vec<usize>> {
    (0..data.d())
        .combinations(data.n)
        .filter(|s| flats_meet(data, s).expect("indices in range"))
        .filter(|s| determinant(&data.normals_matrix(s)).expect("square").abs() != Rat::one())
        .collect()
}

/// Flats containing `y` (laid out as three blocks of `n` coordinates, one per
/// `ℝ³` slot) and the dimension of the span of their normals.
pub fn stabilizer_span(data: &ToricHKData, y: &RatVec) -> Result<(Vec<usize>, usize), ToricError> {
    let n = data.n;
    if y.dim() != 3 * n {
        return Err(ToricError::DimensionMismatch { expected: 3 * n, found: y.dim() });
    }
    let blocks: Vec<RatVec> = (0..3).map(|j| y.entries()[j * n..(j + 1) * n].iter().cloned().collect()).collect();
    let indices: Vec<usize> = (0..data.d())
        .filter(|&k| {
            let u = data.flats[k].normal();
            let lvl = data.flats[k].level.components();
            (0..3).all(|j| blocks[j].dot(&u) == *lvl[j])
        })
        .collect();
    let dim = if indices.is_empty() { 0 } else { rank(&data.normals_matrix(&indices)) };
    Ok((indices, dim))
}

/// Even Betti numbers `b_0, b_2, …, b_2n`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(transparent)]
pub struct PoincarePoly {
    pub coeffs: Vec<u64>,
}

impl PoincarePoly {
    /// Expands `Σ_k d_k (t² − 1)^k` in powers of `t²`.
    pub fn from_counts(counts: &[usize]) -> Result<PoincarePoly, ToricError> {
        let mut signed = vec![0i64; counts.len()];
        for (k, &dk) in counts.iter().enumerate() {
            let mut binom = 1i64;
            for (j, slot) in signed.iter_mut().enumerate().take(k + 1) {
                let sign = if (k - j) % 2 == 0 { 1 } else { -1 };
                *slot += sign * binom * dk as i64;
                binom = binom * (k - j) as i64 / (j + 1) as i64;
            }
        }
        if signed.first() != Some(&1) {
            return Err(ToricError::InvariantViolation(format!("b_0 = {:?}, expected 1", signed.first())));
        }
        let coeffs = signed
            .iter()
            .map(|&b| u64::try_from(b))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ToricError::InvariantViolation(format!("negative Betti number in {signed:?}")))?;
        Ok(PoincarePoly { coeffs })
    }

    /// Value at `t` of `Σ b_2k t^2k`.
    pub fn eval(&self, t: i64) -> i64 {
        self.coeffs.iter().rev().fold(0i64, |acc, &b| acc * t * t + b as i64)
    }

    pub fn b2(&self) -> u64 {
        self.coeffs.get(1).copied().unwrap_or(0)
    }
}

/// Everything derived from the bounded complex of a faithful slice.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Topology {
    pub complex: BoundedComplex,
    pub poincare: PoincarePoly,
    /// Quaternion of the level rotation applied before slicing, if any.
    pub rotation: Option<[i64; 4]>,
    pub slice: Arrangement,
}

impl Topology {
    pub fn counts(&self) -> &[usize] {
        &self.complex.counts
    }

    pub fn betti(&self) -> &[u64] {
        &self.poincare.coeffs
    }

    pub fn euler(&self) -> u64 {
        self.poincare.coeffs.iter().sum()
    }
}

fn require_usable(data: &ToricHKData) -> Result<(), ToricError> {
    let diags = validate(data);
    if !diags.is_empty() {
        return Err(ToricError::Invalid(diags));
    }
    if !orbifold_check(data) {
        return Err(ToricError::NotOrbifold(data.n + 1));
    }
    Ok(())
}

/// Whether the hyperplane slice of the (rotated) levels meets exactly where
/// the flats do, for every subset of at most `n + 1` flats.
fn slice_is_faithful(data: &ToricHKData, levels: &[Level3], axis: SliceAxis, meets: &[(Vec<usize>, bool)]) -> bool {
    meets.iter().all(|(s, m)| slice_meets(data, levels, axis, s) == *m)
}

/// Slices along `axis`, repairing an unfaithful slice by rotating all levels.
pub fn topology_on_axis(data: &ToricHKData, axis: SliceAxis) -> Result<Topology, ToricError> {
    require_usable(data)?;
    let meets: Vec<(Vec<usize>, bool)> = (2..=data.n + 1)
        .flat_map(|size| (0..data.d()).combinations(size))
        .map(|s| {
            let m = flats_meet(data, &s).expect("indices in range");
            (s, m)
        })
        .collect();
    let original: Vec<Level3> = data.flats.iter().map(|f| f.level.clone()).collect();
    let candidates = std::iter::once(None).chain(rotation_sequence().into_iter().map(Some));
    for rot in candidates {
        let levels: Vec<Level3> = match rot {
            None => original.clone(),
            Some(q) => {
                let r = Rotation3::from_quaternion(q);
                original.iter().map(|l| r.apply(l)).collect()
            }
        };
        if !slice_is_faithful(data, &levels, axis, &meets) {
            continue;
        }
        let hyperplanes = data
            .flats
            .iter()
            .zip(&levels)
            .map(|(f, l)| Hyperplane::new(f.normal(), l.component(axis).clone()))
            .collect();
        let slice = Arrangement::new(data.n, hyperplanes)?;
        let complex = bounded_complex(&enumerate_faces(&slice))?;
        if complex.euler_sum() != 1 {
            return Err(ToricError::InvariantViolation(format!(
                "alternating face count {} of {:?}, expected 1",
                complex.euler_sum(),
                complex.counts
            )));
        }
        let poincare = PoincarePoly::from_counts(&complex.counts)?;
        return Ok(Topology { complex, poincare, rotation: rot, slice });
    }
    Err(ToricError::SliceUnfixable(MAX_ROTATION_ATTEMPTS))
}

pub fn topology(data: &ToricHKData) -> Result<Topology, ToricError> {
    topology_on_axis(data, SliceAxis::First)
}

pub fn poincare_polynomial(data: &ToricHKData) -> Result<PoincarePoly, ToricError> {
    Ok(topology(data)?.poincare)
}

/// Betti numbers `b_0, b_2, …`; for `n = 2` also checks `b_2 = d_1 − 2d_2`
/// and `b_4 = d_2` against the raw counts.
pub fn betti(data: &ToricHKData) -> Result<Vec<u64>, ToricError> {
    let top = topology(data)?;
    check_betti(&top)?;
    Ok(top.poincare.coeffs)
}

/// For `n = 2`, `b_2 = d_1 − 2d_2` and `b_4 = d_2`.
pub fn check_betti(top: &Topology) -> Result<(), ToricError> {
    if top.complex.n == 2 {
        let d = top.counts();
        let (b2, b4) = (d[1] as i64 - 2 * d[2] as i64, d[2] as i64);
        let got = top.betti();
        if got[1] as i64 != b2 || got[2] as i64 != b4 {
            return Err(ToricError::InvariantViolation(format!(
                "n = 2 Betti numbers {got:?} disagree with counts {d:?}"
            )));
        }
    }
    Ok(())
}

/// `χ = Σ b_2k`, checked against `P(−1)` and the vertex count `d_0`.
pub fn euler_characteristic(data: &ToricHKData) -> Result<u64, ToricError> {
    let top = topology(data)?;
    check_euler(&top)?;
    Ok(top.euler())
}

/// `χ = P(−1) = d_0`.
pub fn check_euler(top: &Topology) -> Result<(), ToricError> {
    let chi = top.euler();
    let at_minus_one = top.poincare.eval(-1);
    let d0 = top.counts()[0] as u64;
    if chi as i64 != at_minus_one || chi != d0 {
        return Err(ToricError::InvariantViolation(format!(
            "Euler characteristic {chi}, P(-1) = {at_minus_one}, d_0 = {d0}"
        )));
    }
    Ok(())
}

/// The standard examples used throughout tests and fixtures.
pub mod examples {
    use super::*;

    /// `T*ℙ²`: `u = e₁, e₂, −e₁−e₂`, levels `0, 0, (−1, 0, 0)`.
    pub fn cotangent_p2() -> ToricHKData {
        ToricHKData::new(
            2,
            vec![
                Flat::new(vec![1, 0], Level3::zero()),
                Flat::new(vec![0, 1], Level3::zero()),
                Flat::new(vec![-1, -1], Level3::from_ints(-1, 0, 0)),
            ],
        )
    }

    /// Multi-instanton data: `n = 1`, `u_k = 1`, levels `(k, 0, 0)` for `k = 0..points`.
    pub fn multi_instanton(points: usize) -> ToricHKData {
        ToricHKData::new(1, (0..points).map(|k| Flat::new(vec![1], Level3::from_ints(k as i64, 0, 0))).collect())
    }

    /// Flat `ℍⁿ`: the standard basis at level zero.
    pub fn flat_space(n: usize) -> ToricHKData {
        ToricHKData::new(
            n,
            (0..n)
                .map(|i| {
                    let mut u = vec![0; n];
                    u[i] = 1;
                    Flat::new(u, Level3::zero())
                })
                .collect(),
        )
    }
}
