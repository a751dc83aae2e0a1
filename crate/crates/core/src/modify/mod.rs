//! Modification of toric data by a circle `ξ` at a level `ε`, and the
//! symplectic-cut counterparts on polytopes.
//!
//! Modifying appends the flat `(Σ ξ_i u_i, ε)`. The level is good when no
//! flat intersection with nontrivial stabilizer containing the new normal
//! sits at height `ε`: on an intersection of flats `S` with
//! `u_new = Σ_S c_k u_k`, the pairing `⟨y, u_new⟩` is the constant
//! `Σ_S c_k λ_k`, so the new flat either contains that intersection or misses
//! it.

mod polytope;
pub mod suite;

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::exact::{solve_affine, Rat, RatMat, RatVec};
use crate::toric::{self, flats_meet, orbifold_check, Flat, Level3, ToricError, ToricHKData};

pub use polytope::{generalized_cut, symplectic_cut_polytope, HalfSpace, Polytope};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModifyError {
    #[error("circle has {found} coefficients, data has {expected} flats")]
    PickLength { expected: usize, found: usize },
    #[error("circle coefficients sum the normals to zero")]
    ZeroCircle,
    #[error("level {} is not good{}: {}", .report.epsilon, step_suffix(.step), .report.reason())]
    GoodnessViolation { step: Option<usize>, report: Box<GoodnessReport> },
    #[error("b_2 went from {before} to {after}, expected an increase by one")]
    BettiIncrementViolation { before: u64, after: u64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Toric(#[from] ToricError),
}

fn step_suffix(step: &Option<usize>) -> String {
    step.map(|s| format!(" at step {s}")).unwrap_or_default()
}

/// Circle subgroup of the torus, as integer coefficients on the flats.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CirclePick {
    pub xi: Vec<i64>,
}

impl CirclePick {
    pub fn new(xi: Vec<i64>) -> Self {
        CirclePick { xi }
    }

    /// The `i`-th coordinate circle of a `d`-flat model.
    pub fn coordinate(d: usize, i: usize) -> Self {
        let mut xi = vec![0; d];
        xi[i] = 1;
        CirclePick { xi }
    }
}

/// One modification: circle and level.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Step {
    pub xi: CirclePick,
    pub epsilon: Level3,
}

impl Step {
    pub fn new(xi: CirclePick, epsilon: Level3) -> Self {
        Step { xi, epsilon }
    }
}

/// `u_{d+1} = Σ ξ_i u_i`.
pub fn new_flat_normal(data: &ToricHKData, pick: &CirclePick) -> Result<Vec<i64>, ModifyError> {
    if pick.xi.len() != data.d() {
        return Err(ModifyError::PickLength { expected: data.d(), found: pick.xi.len() });
    }
    let mut u = vec![0i64; data.n];
    for (xi, flat) in pick.xi.iter().zip(&data.flats) {
        if flat.u.len() != data.n {
            return Err(ModifyError::DimensionMismatch { expected: data.n, found: flat.u.len() });
        }
        for (acc, uk) in u.iter_mut().zip(&flat.u) {
            *acc += xi * uk;
        }
    }
    if u.iter().all(|&x| x == 0) {
        return Err(ModifyError::ZeroCircle);
    }
    Ok(u)
}

/// Values of `⟨y, u_new⟩` forced on flat intersections whose span contains
/// `u_new`, sorted and without repeats.
///
/// Subsets of at most `n` flats suffice: a meeting set contains an
/// independent meeting subset with the same span and the same forced value.
pub fn forced_levels(data: &ToricHKData, pick: &CirclePick) -> Result<Vec<Level3>, ModifyError> {
    let u_new = RatVec::from_ints(&new_flat_normal(data, pick)?);
    let mut forced = BTreeSet::new();
    for size in 1..=data.n.min(data.d()) {
        for subset in (0..data.d()).combinations(size) {
            if !flats_meet(data, &subset)? {
                continue;
            }
            let columns = RatMat::new(subset.iter().map(|&k| data.flats[k].normal()).collect(), data.n)
                .expect("validated normals")
                .transpose();
            let Some(sol) = solve_affine(&columns, &u_new).expect("shapes agree") else {
                continue;
            };
            let value = subset
                .iter()
                .zip(sol.witness.iter())
                .fold(Level3::zero(), |acc, (&k, c)| acc.add(&data.flats[k].level.scale(c)));
            forced.insert(value);
        }
    }
    Ok(forced.into_iter().collect())
}

/// Both halves of the goodness test, reported separately.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct GoodnessReport {
    pub epsilon: Level3,
    pub new_normal: Vec<i64>,
    pub forced_levels: Vec<Level3>,
    /// `ε` is one of the forced levels.
    pub epsilon_forced: bool,
    /// No `n + 1` flats of the extended data meet.
    pub extended_orbifold: bool,
}

impl GoodnessReport {
    pub fn is_good(&self) -> bool {
        !self.epsilon_forced && self.extended_orbifold
    }

    fn reason(&self) -> String {
        match (self.epsilon_forced, self.extended_orbifold) {
            (false, true) => "good".into(),
            (true, true) => "level is forced on a fixed locus".into(),
            (false, false) => "extended data is not an orbifold".into(),
            (true, false) => "level is forced on a fixed locus and extended data is not an orbifold".into(),
        }
    }
}

pub fn goodness(data: &ToricHKData, pick: &CirclePick, eps: &Level3) -> Result<GoodnessReport, ModifyError> {
    let new_normal = new_flat_normal(data, pick)?;
    let forced = forced_levels(data, pick)?;
    let epsilon_forced = forced.binary_search(eps).is_ok();
    let extended = data.with_flat(Flat::new(new_normal.clone(), eps.clone()));
    Ok(GoodnessReport {
        epsilon: eps.clone(),
        new_normal,
        forced_levels: forced,
        epsilon_forced,
        extended_orbifold: orbifold_check(&extended),
    })
}

pub fn is_good(data: &ToricHKData, pick: &CirclePick, eps: &Level3) -> Result<bool, ModifyError> {
    Ok(goodness(data, pick, eps)?.is_good())
}

/// A modification together with the topology on either side of it.
pub struct Modified {
    pub data: ToricHKData,
    pub before: toric::Topology,
    pub after: toric::Topology,
}

fn modify_step(data: &ToricHKData, pick: &CirclePick, eps: &Level3, step: Option<usize>) -> Result<Modified, ModifyError> {
    let report = goodness(data, pick, eps)?;
    if !report.is_good() {
        return Err(ModifyError::GoodnessViolation { step, report: Box::new(report) });
    }
    let before = toric::topology(data)?;
    toric::check_betti(&before)?;
    let out = data.with_flat(Flat::new(report.new_normal, eps.clone()));
    let after = toric::topology(&out)?;
    toric::check_betti(&after)?;
    let (b_before, b_after) = (before.poincare.b2(), after.poincare.b2());
    if b_after != b_before + 1 {
        return Err(ModifyError::BettiIncrementViolation { before: b_before, after: b_after });
    }
    if !orbifold_check(&out) {
        return Err(ModifyError::Toric(ToricError::NotOrbifold(out.n + 1)));
    }
    Ok(Modified { data: out, before, after })
}

/// [`modify`], keeping both topologies.
pub fn modify_with_topology(data: &ToricHKData, pick: &CirclePick, eps: &Level3) -> Result<Modified, ModifyError> {
    modify_step(data, pick, eps, None)
}

/// Appends the flat `(Σ ξ_i u_i, ε)`, checking goodness first and the
/// increase of `b_2` by exactly one afterwards.
pub fn modify(data: &ToricHKData, pick: &CirclePick, eps: &Level3) -> Result<ToricHKData, ModifyError> {
    Ok(modify_step(data, pick, eps, None)?.data)
}

/// Applies the steps in order; each circle is sized to the data at that point.
pub fn iterate(data: &ToricHKData, steps: &[Step]) -> Result<ToricHKData, ModifyError> {
    steps
        .iter()
        .enumerate()
        .try_fold(data.clone(), |acc, (i, s)| Ok(modify_step(&acc, &s.xi, &s.epsilon, Some(i))?.data))
}

/// Convenience for callers holding a single rational level component.
pub fn real_level(r: Rat) -> Level3 {
    Level3::new(r, Rat::zero(), Rat::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::examples::{cotangent_p2, flat_space, multi_instanton};
    use crate::toric::topology;

    #[test]
    fn new_normals() {
        let data = cotangent_p2();
        assert_eq!(new_flat_normal(&data, &CirclePick::new(vec![1, 1, 0])), Ok(vec![1, 1]));
        assert_eq!(new_flat_normal(&data, &CirclePick::new(vec![0, 0, -1])), Ok(vec![1, 1]));
        assert_eq!(new_flat_normal(&data, &CirclePick::new(vec![1, 1, 1])), Err(ModifyError::ZeroCircle));
        assert!(matches!(
            new_flat_normal(&data, &CirclePick::new(vec![1, 1])),
            Err(ModifyError::PickLength { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn forced_levels_examples() {
        let forced = forced_levels(&cotangent_p2(), &CirclePick::new(vec![1, 1, 0])).unwrap();
        assert_eq!(forced, vec![Level3::zero(), Level3::from_ints(1, 0, 0)]);

        let chain = multi_instanton(4);
        let forced = forced_levels(&chain, &CirclePick::coordinate(4, 0)).unwrap();
        let expected: Vec<Level3> = (0..4).map(|k| Level3::from_ints(k, 0, 0)).collect();
        assert_eq!(forced, expected);

        let single = ToricHKData::new(1, vec![Flat::new(vec![1], Level3::from_ints(2, 1, 0))]);
        assert_eq!(forced_levels(&single, &CirclePick::new(vec![1])).unwrap(), vec![Level3::from_ints(2, 1, 0)]);
    }

    #[test]
    fn goodness_examples() {
        let data = cotangent_p2();
        let pick = CirclePick::new(vec![1, 1, 0]);
        assert_eq!(is_good(&data, &pick, &real_level(Rat::new(1, 2))), Ok(true));
        let forced = goodness(&data, &pick, &Level3::zero()).unwrap();
        assert!(forced.epsilon_forced);
        assert!(!forced.is_good());

        let chain = multi_instanton(3);
        assert_eq!(is_good(&chain, &CirclePick::coordinate(3, 0), &Level3::zero()), Ok(false));
    }

    #[test]
    fn eguchi_hanson_from_flat_space() {
        let h = flat_space(1);
        let eh = modify(&h, &CirclePick::new(vec![1]), &Level3::from_ints(1, 0, 0)).unwrap();
        assert_eq!(eh.d(), 2);
        assert_eq!(toric::betti(&h).unwrap()[1], 0);
        assert_eq!(toric::betti(&eh).unwrap()[1], 1);
    }

    #[test]
    fn cotangent_p2_modifications() {
        let data = cotangent_p2();
        let parallel = modify(&data, &CirclePick::new(vec![1, 1, 0]), &real_level(Rat::new(1, 2))).unwrap();
        let top = topology(&parallel).unwrap();
        assert_eq!(top.counts(), &[5, 6, 2]);
        assert_eq!(top.betti(), &[1, 2, 2]);

        let generic = modify(&data, &CirclePick::new(vec![1, 2, 0]), &real_level(Rat::new(1, 3))).unwrap();
        assert_eq!(generic.flats[3].u, vec![1, 2]);
        let top = topology(&generic).unwrap();
        assert_eq!(top.counts(), &[6, 8, 3]);
        assert_eq!(top.betti(), &[1, 2, 3]);
    }

    #[test]
    fn forced_level_rejected() {
        let err = modify(&cotangent_p2(), &CirclePick::new(vec![1, 1, 0]), &Level3::zero()).unwrap_err();
        assert!(matches!(err, ModifyError::GoodnessViolation { step: None, .. }));
    }

    #[test]
    fn iterate_builds_the_chain() {
        let steps: Vec<Step> = (1..5)
            .map(|k| Step::new(CirclePick::coordinate(k, 0), Level3::from_ints(k as i64, 0, 0)))
            .collect();
        let chain = iterate(&flat_space(1), &steps).unwrap();
        assert_eq!(chain.d(), 5);
        assert_eq!(toric::betti(&chain).unwrap()[1], 4);
        assert_eq!(iterate(&cotangent_p2(), &[]).unwrap(), cotangent_p2());
    }

    #[test]
    fn iterate_rejects_reused_level() {
        let steps = vec![
            Step::new(CirclePick::coordinate(1, 0), Level3::from_ints(1, 0, 0)),
            Step::new(CirclePick::coordinate(2, 0), Level3::from_ints(1, 0, 0)),
        ];
        let err = iterate(&flat_space(1), &steps).unwrap_err();
        assert!(matches!(err, ModifyError::GoodnessViolation { step: Some(1), .. }));
    }

    #[test]
    fn modify_keeps_existing_flats() {
        let data = cotangent_p2();
        let out = modify(&data, &CirclePick::new(vec![1, 2, 0]), &real_level(Rat::new(1, 3))).unwrap();
        assert_eq!(&out.flats[..3], &data.flats[..]);
    }
}
