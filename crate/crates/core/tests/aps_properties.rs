use coulomblab::aps::{self, BoundaryValueProblem};
use coulomblab::exact;
use coulomblab::spectral::{SpectralModel, SpectralProjection};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn spectrum() -> impl Strategy<Value = Vec<f64>> {
    // eigenvalues bounded away from zero, plus exact zeros
    prop::collection::vec(prop_oneof![(-3.0..-0.2f64), (0.2..3.0f64), Just(0.0)], 1..=6)
}

fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, cols), rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn index_counts_positive_modes_at_every_resolution(diag in spectrum()) {
        let model = SpectralModel::synthetic_diag(&diag);
        let l = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag.clone()));
        let positive = diag.iter().filter(|&&x| x > 0.0).count() as i64;
        for n in [32, 96] {
            let p = BoundaryValueProblem::new(l.clone(), 1.0, n, model.nonpositive_projection()).unwrap();
            prop_assert_eq!(aps::numeric_index(&p).unwrap().index, positive);
        }
    }

    #[test]
    fn commensurate_index_counts_added_and_removed_modes(diag in spectrum(), cut in 0usize..6) {
        let model = SpectralModel::synthetic_diag(&diag);
        let m = diag.len();
        let cut = cut.min(m);
        let all: Vec<usize> = (0..m).collect();
        let small = model.projection_onto(&all[..cut]);
        let large = model.projection_onto(&all);
        let k = (m - cut) as i64;
        prop_assert_eq!(aps::commensurate_index(&large, &small).unwrap(), -k);
        prop_assert_eq!(aps::commensurate_index(&small, &large).unwrap(), k);
        prop_assert_eq!(aps::commensurate_index(&small, &small).unwrap(), 0);
    }

    #[test]
    fn index_change_holds_for_spans(diag in spectrum(), entries in prop::collection::vec(-1.0..1.0f64, 36), rank in 0usize..=6) {
        let m = diag.len();
        let rank = rank.min(m);
        let l = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag.clone()));
        let model = SpectralModel::synthetic_diag(&diag);
        let base = BoundaryValueProblem::new(l, 1.0, 32, model.nonpositive_projection()).unwrap();
        let span = DMatrix::from_fn(m, rank, |i, j| entries[i * 6 + j]);
        let p = SpectralProjection::from_span(&span);
        if let Ok(change) = aps::verify_index_change(&base, &p) {
            prop_assert!(change.holds, "{:?}", change);
        }
    }

    #[test]
    fn sum_fredholm_identities(
        (domain, d1, d2) in (1usize..=10, 1usize..=5, 1usize..=5)
            .prop_flat_map(|(n, w1, w2)| (Just(n), int_matrix(w1, n), int_matrix(w2, n)))
    ) {
        let r = aps::verify_sum_fredholm(&exact::from_i64(&d1), &exact::from_i64(&d2), domain).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
        prop_assert_eq!(r.kernel_dim, r.restricted_kernel_dim);
    }
}

#[test]
fn index_formula_matches_table() {
    for e in aps::example_table().unwrap() {
        assert!(e.satisfies_identity());
        assert!(!e.perturbed().satisfies_identity());
    }
    assert_eq!(aps::index_formula(1, 2, 3, 4), 2 + 2 - 3 - 4);
}
