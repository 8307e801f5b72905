use proptest::prelude::*;
use qsym_core::deck::{
    constant_deck_from_qperm, example_nontrivial_2sheet_circle, fiber_invariant_profile, verify_fibered, Covering,
    FiberedQuantumPermutation, SampledBase,
};
use qsym_core::linalg::random_unitary;
use qsym_core::weyl::{weyl_qperm, FiniteAbelianGroup};
use qsym_core::{Permutation, TolerancePolicy};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn profile_ignores_per_sample_conjugation(seed in any::<u64>()) {
        let f = example_nontrivial_2sheet_circle(16).unwrap();
        let before = fiber_invariant_profile(&f);
        let moved = f
            .map_fibers(|k, q| q.compress(&random_unitary(2, seed.wrapping_add(k as u64)).unwrap()))
            .unwrap();
        let after = fiber_invariant_profile(&moved);
        for (a, b) in before.iter().flatten().zip(after.iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn constant_weyl_decks_verify(seed in any::<u64>(), samples in 4usize..24) {
        let group = FiniteAbelianGroup::cyclic(2).unwrap();
        let q = weyl_qperm(&group, &random_unitary(2, seed).unwrap(), &tol()).unwrap();
        let covering = Covering::trivial(SampledBase::circle(samples).unwrap(), 4).unwrap();
        let f = constant_deck_from_qperm(&q, &covering).unwrap();
        let r = verify_fibered(&f, &tol());
        prop_assert!(r.valid);
        prop_assert_eq!(r.worst_transport_jump, 0.0);
        let profile = fiber_invariant_profile(&f);
        prop_assert!(profile.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn cyclic_coverings_have_cyclic_monodromy(samples in 4usize..40, sheets in 1usize..7) {
        let c = Covering::cyclic_circle(samples, sheets, -1).unwrap();
        let m = c.monodromy(&(0..samples).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(m, Permutation::shift(sheets, -1));
        prop_assert_eq!(Permutation::shift(sheets, -1).order(), sheets);
    }
}

#[test]
fn fibered_json_round_trip() {
    let f = example_nontrivial_2sheet_circle(12).unwrap();
    let text = serde_json::to_string_pretty(&f).unwrap();
    let back: FiberedQuantumPermutation = serde_json::from_str(&text).unwrap();
    assert_eq!(back, f);
}
