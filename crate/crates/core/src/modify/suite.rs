//! Seeded random good modifications, used by the property tests and the
//! `verify` command.
//!
//! Instance `i` of seed `s` is drawn from its own ChaCha stream, so any
//! instance can be regenerated alone and the suite result does not depend on
//! evaluation order.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact::Rat;
use crate::toric::{self, orbifold_check, validate, Flat, Level3, ToricHKData};

use super::{goodness, modify_with_topology, CirclePick, Modified, ModifyError, Step};

/// Largest flat count of a generated instance after modification.
pub const MAX_SUITE_FLATS: usize = 8;

/// A valid toric model together with a good step for it.
#[derive(Clone, Debug)]
pub struct Instance {
    pub data: ToricHKData,
    pub step: Step,
}

pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn small_rat(rng: &mut impl Rng) -> Rat {
    Rat::new(rng.gen_range(-12..=12), rng.gen_range(1..=4))
}

fn random_level(rng: &mut impl Rng) -> Level3 {
    let l1 = small_rat(rng);
    if rng.gen_bool(0.25) {
        Level3::new(l1, small_rat(rng), small_rat(rng))
    } else {
        Level3::new(l1, Rat::zero(), Rat::zero())
    }
}

fn random_data(rng: &mut impl Rng) -> ToricHKData {
    loop {
        let n = rng.gen_range(1..=3usize);
        let d = rng.gen_range(n..MAX_SUITE_FLATS);
        let flats = (0..d)
            .map(|_| {
                let u = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
                Flat::new(u, random_level(rng))
            })
            .collect();
        let data = ToricHKData::new(n, flats);
        if validate(&data).is_empty() && orbifold_check(&data) {
            return data;
        }
    }
}

fn random_step(rng: &mut impl Rng, data: &ToricHKData) -> Option<Step> {
    for _ in 0..64 {
        let xi = CirclePick::new((0..data.d()).map(|_| rng.gen_range(-2..=2)).collect());
        let eps = random_level(rng);
        match goodness(data, &xi, &eps) {
            Ok(report) if report.is_good() => return Some(Step::new(xi, eps)),
            _ => {}
        }
    }
    None
}

/// The `index`-th instance of the suite seeded by `seed`.
pub fn random_instance(seed: u64, index: u64) -> Instance {
    let mut rng = instance_rng(seed, index);
    loop {
        let data = random_data(&mut rng);
        if let Some(step) = random_step(&mut rng, &data) {
            return Instance { data, step };
        }
    }
}

/// Bookkeeping for one modified instance.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct InstanceOutcome {
    pub index: u64,
    pub n: usize,
    pub d: usize,
    pub counts_before: Vec<usize>,
    pub counts_after: Vec<usize>,
    pub b2_before: u64,
    pub b2_after: u64,
    pub euler_before: u64,
    pub euler_after: u64,
}

impl InstanceOutcome {
    pub fn b2_incremented(&self) -> bool {
        self.b2_after == self.b2_before + 1
    }

    pub fn euler_monotone(&self) -> bool {
        self.euler_after >= self.euler_before
    }

    /// Alternating face count is 1 before and after.
    pub fn simply_connected(&self) -> bool {
        alternating(&self.counts_before) == 1 && alternating(&self.counts_after) == 1
    }
}

fn alternating(counts: &[usize]) -> i64 {
    counts.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
}

pub fn run_instance(seed: u64, index: u64) -> Result<InstanceOutcome, ModifyError> {
    let inst = random_instance(seed, index);
    let Modified { before, after, .. } = modify_with_topology(&inst.data, &inst.step.xi, &inst.step.epsilon)?;
    toric::check_euler(&before)?;
    toric::check_euler(&after)?;
    Ok(InstanceOutcome {
        index,
        n: inst.data.n,
        d: inst.data.d(),
        counts_before: before.counts().to_vec(),
        counts_after: after.counts().to_vec(),
        b2_before: before.poincare.b2(),
        b2_after: after.poincare.b2(),
        euler_before: before.euler(),
        euler_after: after.euler(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub count: u64,
    pub b2_increment_failures: Vec<u64>,
    pub euler_decreases: Vec<u64>,
    pub alternating_sum_failures: Vec<u64>,
    pub outcomes: Vec<InstanceOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.b2_increment_failures.is_empty() && self.euler_decreases.is_empty() && self.alternating_sum_failures.is_empty()
    }
}

/// Runs `count` instances. Errors from `modify` abort the run; they would
/// mean a generated step was not good after all.
pub fn verify(seed: u64, count: u64) -> Result<SuiteReport, ModifyError> {
    let outcomes = (0..count).map(|i| run_instance(seed, i)).collect::<Result<Vec<_>, _>>()?;
    let failing = |f: fn(&InstanceOutcome) -> bool| outcomes.iter().filter(|o| !f(o)).map(|o| o.index).collect();
    Ok(SuiteReport {
        seed,
        count,
        b2_increment_failures: failing(InstanceOutcome::b2_incremented),
        euler_decreases: failing(InstanceOutcome::euler_monotone),
        alternating_sum_failures: failing(InstanceOutcome::simply_connected),
        outcomes,
    })
}
