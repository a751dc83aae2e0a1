use hkmod_core::exact::Rat;
use hkmod_core::modify::suite::random_instance;
use hkmod_core::toric::examples::{cotangent_p2, flat_space, multi_instanton};
use hkmod_core::toric::{
    betti, flats_meet, orbifold_check, topology, topology_on_axis, Flat, Level3, SliceAxis, ToricHKData,
};
use itertools::Itertools;
use proptest::prelude::*;

const SEED: u64 = 0x70_71c;

fn sample(index: u64) -> ToricHKData {
    random_instance(SEED, index).data
}

/// `u ↦ g u` for the unimodular `g` built from elementary row operations.
fn transform(data: &ToricHKData, ops: &[(usize, usize, i64, bool)]) -> ToricHKData {
    let n = data.n;
    let flats = data
        .flats
        .iter()
        .map(|f| {
            let mut u = f.u.clone();
            for &(i, j, c, swap) in ops {
                let (i, j) = (i % n, j % n);
                if swap {
                    u.swap(i, j);
                } else if i != j {
                    u[i] += c * u[j];
                }
            }
            Flat::new(u, f.level.clone())
        })
        .collect();
    ToricHKData::new(n, flats)
}

/// Translating `y` by `c` shifts every level by `⟨c, u_k⟩`.
fn translate(data: &ToricHKData, c: &[[i64; 3]]) -> ToricHKData {
    let flats = data
        .flats
        .iter()
        .map(|f| {
            let mut shift = [0i64; 3];
            for (ui, ci) in f.u.iter().zip(c) {
                for slot in 0..3 {
                    shift[slot] += ui * ci[slot];
                }
            }
            Flat::new(f.u.clone(), f.level.add(&Level3::from_ints(shift[0], shift[1], shift[2])))
        })
        .collect();
    ToricHKData::new(data.n, flats)
}

fn signature(data: &ToricHKData) -> (Vec<usize>, Vec<u64>) {
    let top = topology(data).unwrap();
    (top.counts().to_vec(), top.betti().to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unimodular_change_of_basis(index in 0u64..1000, ops in prop::collection::vec((0usize..3, 0usize..3, -2i64..=2, any::<bool>()), 0..5)) {
        let data = sample(index);
        let moved = transform(&data, &ops);
        prop_assert!(orbifold_check(&moved));
        prop_assert_eq!(signature(&moved), signature(&data));
    }

    #[test]
    fn translation_of_levels(index in 0u64..1000, c in prop::collection::vec([-2i64..=2, -2i64..=2, -2i64..=2], 3)) {
        let data = sample(index);
        let moved = translate(&data, &c[..data.n]);
        prop_assert_eq!(betti(&moved).unwrap(), betti(&data).unwrap());
    }

    #[test]
    fn flat_order_is_irrelevant(index in 0u64..1000, k in 0usize..8) {
        let data = sample(index);
        let mut flats = data.flats.clone();
        let len = flats.len();
        flats.rotate_left(k % len);
        flats.reverse();
        prop_assert_eq!(signature(&ToricHKData::new(data.n, flats)), signature(&data));
    }

    #[test]
    fn slice_axis_is_irrelevant(index in 0u64..1000) {
        let data = sample(index);
        let first = topology_on_axis(&data, SliceAxis::First).unwrap();
        for axis in [SliceAxis::Second, SliceAxis::Third] {
            let other = topology_on_axis(&data, axis).unwrap();
            prop_assert_eq!(other.betti(), first.betti());
        }
    }

    #[test]
    fn meeting_is_inherited_by_subsets(index in 0u64..1000) {
        let data = sample(index);
        for size in 2..=data.d().min(data.n + 1) {
            for s in (0..data.d()).combinations(size) {
                if flats_meet(&data, &s).unwrap() {
                    for t in s.iter().copied().combinations(size - 1) {
                        prop_assert!(flats_meet(&data, &t).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn standard_examples() {
    assert_eq!(betti(&cotangent_p2()).unwrap(), vec![1, 1, 1]);
    assert_eq!(betti(&flat_space(3)).unwrap(), vec![1, 0, 0, 0]);
    for k in 1..=6 {
        let top = topology(&multi_instanton(k)).unwrap();
        assert_eq!(top.poincare.b2(), k as u64 - 1);
        assert_eq!(top.euler(), k as u64);
    }
}

#[test]
fn nonreal_levels_need_a_rotation_only_when_the_slice_lies() {
    // Two flats whose first components agree but which do not meet.
    let data = ToricHKData::new(
        1,
        vec![Flat::new(vec![1], Level3::zero()), Flat::new(vec![1], Level3::new(Rat::zero(), Rat::one(), Rat::zero()))],
    );
    let top = topology(&data).unwrap();
    assert!(top.rotation.is_some());
    assert_eq!(top.betti(), &[1, 1]);
}
