use coulomblab::conley::fields::LinearField;
use coulomblab::conley::*;
use proptest::prelude::*;

fn dynamics() -> CubicalDynamics {
    outer_approximation(&LinearField::saddle(), Grid::cube(2, 1.0, 24).unwrap(), 0.3).unwrap()
}

fn rect(d: &CubicalDynamics, x0: f64, x1: f64, y0: f64, y1: f64) -> CellSet {
    d.grid().select(|p| (x0..x1).contains(&p[0]) && (y0..y1).contains(&p[1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closure_is_idempotent(x0 in -1.0..0.0f64, x1 in 0.0..1.0f64, y0 in -1.0..0.0f64, y1 in 0.0..1.0f64, sx in -0.9..0.9f64, sy in -0.9..0.9f64) {
        let d = dynamics();
        let x = rect(&d, x0, x1, y0, y1);
        let s = rect(&d, sx - 0.1, sx + 0.1, sy - 0.1, sy + 0.1).intersection(&x);
        let p = min_pos_invariant(&s, &x, &d);
        prop_assert!(s.is_subset(&p));
        prop_assert!(p.is_subset(&x));
        prop_assert_eq!(min_pos_invariant(&p, &x, &d), p);
    }

    #[test]
    fn positive_invariant_part_is_greatest_fixed_point(x0 in -1.0..0.0f64, x1 in 0.0..1.0f64, y0 in -1.0..0.0f64, y1 in 0.0..1.0f64) {
        let d = dynamics();
        let x = rect(&d, x0, x1, y0, y1);
        let a = positive_invariant_part(&x, &d);
        prop_assert_eq!(positive_invariant_part(&a, &d), a.clone());
        let core = invariant_part(&x, &d);
        prop_assert!(core.is_subset(&a));
        let inner = rect(&d, x0 / 2.0, x1 / 2.0, y0, y1);
        prop_assert!(positive_invariant_part(&inner, &d).is_subset(&a));
    }
}
