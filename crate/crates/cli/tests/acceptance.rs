//! One test per acceptance criterion, so that the harness reports a pass/fail line for each.

use qsym_cli::acceptance::run;

fn check(id: u8) {
    let outcome = run(&[id]).remove(0);
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

macro_rules! criteria {
    ($($name:ident => $id:expr),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                check($id);
            }
        )*
    };
}

criteria! {
    criterion_01_weyl_relations => 1,
    criterion_02_weyl_qperms_verify => 2,
    criterion_03_weyl_commutants_and_equivalence => 3,
    criterion_04_small_qperms_are_classical => 4,
    criterion_05_qaut_formulations_agree => 5,
    criterion_06_disjoint_automorphisms_irreducible => 6,
    criterion_07_distance_constraint => 7,
    criterion_08_rado_truncation => 8,
    criterion_09_isomorphism_game => 9,
    criterion_10_hom_profiles => 10,
    criterion_11_deck_examples => 11,
    criterion_12_decomposition_soundness => 12,
}
