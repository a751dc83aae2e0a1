use hkmod_core::exact::{Rat, RatVec};
use hkmod_core::modify::suite::{random_instance, run_instance};
use hkmod_core::modify::{
    generalized_cut, goodness, iterate, modify, real_level, symplectic_cut_polytope, CirclePick, HalfSpace, Polytope,
    Step,
};
use hkmod_core::toric::examples::cotangent_p2;
use hkmod_core::toric::{betti, Flat, Level3, ToricHKData};
use proptest::prelude::*;

fn padded(step: &Step) -> Step {
    let mut xi = step.xi.xi.clone();
    xi.push(0);
    Step::new(CirclePick::new(xi), step.epsilon.clone())
}

fn sorted_flats(data: &ToricHKData) -> Vec<(Vec<i64>, Level3)> {
    let mut v: Vec<_> = data.flats.iter().map(|f| (f.u.clone(), f.level.clone())).collect();
    v.sort();
    v
}

/// Both orders of two steps, if each is good where it is applied.
fn both_orders(data: &ToricHKData, a: &Step, b: &Step) -> Option<(ToricHKData, ToricHKData)> {
    let ab = iterate(data, &[a.clone(), padded(b)]).ok()?;
    let ba = iterate(data, &[b.clone(), padded(a)]).ok()?;
    Some((ab, ba))
}

fn small_box(dim: usize) -> impl Strategy<Value = Polytope> {
    prop::collection::vec((-4i64..=0, 1i64..=4), dim)
        .prop_map(|b| Polytope::cuboid(&b.into_iter().map(|(lo, hi)| (Rat::from(lo), Rat::from(hi))).collect::<Vec<_>>()))
}

fn with_extra_face(dim: usize) -> impl Strategy<Value = Polytope> {
    (small_box(dim), prop::collection::vec(-2i64..=2, dim), -3i64..=1).prop_map(|(mut p, a, b)| {
        p.constraints.push(HalfSpace::new(RatVec::from_ints(&a), Rat::from(b)));
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn good_modifications_add_one_to_b2(seed in any::<u64>(), index in 0u64..64) {
        let out = run_instance(seed, index).unwrap();
        prop_assert!(out.b2_incremented(), "{:?}", out);
        prop_assert!(out.euler_monotone(), "{:?}", out);
        prop_assert!(out.simply_connected(), "{:?}", out);
    }

    #[test]
    fn modification_keeps_existing_flats(seed in any::<u64>(), index in 0u64..64) {
        let inst = random_instance(seed, index);
        let out = modify(&inst.data, &inst.step.xi, &inst.step.epsilon).unwrap();
        prop_assert_eq!(&out.flats[..inst.data.d()], &inst.data.flats[..]);
        prop_assert_eq!(out.d(), inst.data.d() + 1);
    }

    #[test]
    fn step_order_does_not_matter(
        seed in any::<u64>(),
        xi in prop::collection::vec(-2i64..=2, 8),
        p in -12i64..=12,
        q in 1i64..=4,
    ) {
        let inst = random_instance(seed, 0);
        let d = inst.data.d();
        let b = Step::new(CirclePick::new(xi[..d].to_vec()), real_level(Rat::new(p, q)));
        if let Some((ab, ba)) = both_orders(&inst.data, &inst.step, &b) {
            prop_assert_eq!(sorted_flats(&ab), sorted_flats(&ba));
            prop_assert_eq!(betti(&ab).unwrap(), betti(&ba).unwrap());
        }
    }

    #[test]
    fn cuts_stay_inside_and_are_idempotent(p in with_extra_face(2), a in prop::collection::vec(-2i64..=2, 2), eps in -4i64..=4) {
        let a = RatVec::from_ints(&a);
        let eps = Rat::from(eps);
        let once = symplectic_cut_polytope(&p, &a, &eps).unwrap();
        prop_assert!(p.contains(&once));
        let twice = symplectic_cut_polytope(&once, &a, &eps).unwrap();
        prop_assert!(twice.same_set(&once));
        if let Some(x) = once.witness() {
            prop_assert!(a.dot(&x) >= eps);
        }
    }

    #[test]
    fn generalized_cut_lies_in_both(p in with_extra_face(3), delta in small_box(3), shift in prop::collection::vec(-3i64..=3, 3)) {
        let shift = RatVec::from_ints(&shift);
        let cut = generalized_cut(&p, &delta, &shift).unwrap();
        prop_assert!(p.contains(&cut));
        prop_assert!(delta.translated(&shift).unwrap().contains(&cut));
        let again = generalized_cut(&cut, &delta, &shift).unwrap();
        prop_assert!(again.same_set(&cut));
    }
}

#[test]
fn cotangent_steps_commute() {
    let data = cotangent_p2();
    let a = Step::new(CirclePick::new(vec![1, 1, 0]), real_level(Rat::new(1, 2)));
    let b = Step::new(CirclePick::new(vec![1, 2, 0]), real_level(Rat::new(1, 3)));
    let (ab, ba) = both_orders(&data, &a, &b).expect("both orders are good");
    assert_eq!(sorted_flats(&ab), sorted_flats(&ba));
    assert_eq!(betti(&ab).unwrap(), betti(&ba).unwrap());
    assert_eq!(betti(&ab).unwrap()[1], 3);
}

#[test]
fn cut_truncates_while_modification_keeps_everything() {
    // The half-line x ≥ 0 cut at 1 loses [0, 1); ℍ modified at 1 keeps its
    // flat and gains one.
    let line = Polytope::new(1, vec![HalfSpace::new(RatVec::from_ints(&[1]), Rat::zero())]).unwrap();
    let cut = symplectic_cut_polytope(&line, &RatVec::from_ints(&[1]), &Rat::one()).unwrap();
    assert!(line.contains(&cut));
    assert!(!cut.contains(&line));
    assert!(!cut.contains_point(&RatVec::from_ints(&[0])));

    let h = ToricHKData::new(1, vec![Flat::new(vec![1], Level3::zero())]);
    let out = modify(&h, &CirclePick::new(vec![1]), &Level3::from_ints(1, 0, 0)).unwrap();
    assert_eq!(out.flats[0], h.flats[0]);
    assert_eq!(betti(&out).unwrap(), vec![1, 1]);
}

#[test]
fn forced_levels_make_steps_bad() {
    let data = cotangent_p2();
    let pick = CirclePick::new(vec![1, 1, 0]);
    for eps in [Level3::zero(), Level3::from_ints(1, 0, 0)] {
        let report = goodness(&data, &pick, &eps).unwrap();
        assert!(report.epsilon_forced && !report.is_good());
    }
    assert!(goodness(&data, &pick, &Level3::from_ints(2, 0, 0)).unwrap().is_good());
}
