use coulomblab::fda::*;
use coulomblab::spectral::Interval;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn well_field() -> FlowField {
    FlowField::double_well(&[5.0, -6.0, 7.0, -8.0, 9.0], 5.0)
}

#[test]
fn linear_eigenvector_decays_exponentially() {
    let f = FlowField::linear(&[1.0, 2.0, -1.0]);
    let traj = integrate(&f, &[0.0, 1.0, 0.0], 0.01, 100).unwrap();
    let end = traj.last().unwrap();
    assert!((end[1] - (-2.0f64).exp()).abs() < 1e-9);
    assert!(end[0].abs() < 1e-15 && end[2].abs() < 1e-15);
}

#[test]
fn double_well_converges_to_the_right_well() {
    let f = FlowField::double_well(&[], 3.0);
    let traj = integrate(&f, &[0.1], 5e-4, 40_000).unwrap();
    assert!((traj.last().unwrap()[0] - 1.0).abs() < 1e-6);
    let still = integrate(&f, &[0.0], 5e-4, 100).unwrap();
    assert_eq!(still.last().unwrap()[0], 0.0);
}

#[test]
fn coarse_step_is_rejected() {
    let f = FlowField::linear(&[10.0]);
    assert!(matches!(integrate(&f, &[1.0], 0.1, 10), Err(FdaError::StepTooCoarse { .. })));
}

#[test]
fn linear_compression_is_exact_restriction() {
    let f = FlowField::linear(&[-2.0, 3.0, -4.0, 6.0]);
    let c = compress(&f, Interval::new(-2.5, 3.5)).unwrap();
    let x0 = c.lift(&[0.3, -0.2]);
    let full = integrate(&f, &x0, 0.01, 50).unwrap();
    let comp = c.integrate(&x0, 0.01, 50).unwrap();
    for (a, b) in full.iter().zip(&comp) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-14);
        }
    }
    assert!(matches!(compress(&f, Interval::new(10.0, 11.0)), Err(FdaError::EmptySubspace(_))));
}

#[test]
fn full_window_compression_is_the_field() {
    let f = well_field();
    let c = compress(&f, Interval::all()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let a = f.eval(&x);
        let b = c.eval_ambient(&x);
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
    }
}

#[test]
fn compressed_well_keeps_three_equilibria() {
    let f = well_field();
    let c = compress(&f, Interval::new(-1.5, 5.5)).unwrap();
    assert_eq!(c.indices().len(), 2);
    let well = (0..2).find(|&k| c.lift(&[if k == 0 { 1.0 } else { 0.0 }, if k == 1 { 1.0 } else { 0.0 }])[0].abs() == 1.0).unwrap();
    for s in [-1.0, 0.0, 1.0] {
        let mut w = [0.0, 0.0];
        w[well] = s;
        assert!(c.eval_w(&w).iter().all(|v| v.abs() < 1e-14));
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let f = FlowField::double_well(&[2.0, -3.0], 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let e = 1e-5;
    for _ in 0..100 {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.5..2.5)).collect();
        let g = f.eval(&x);
        for i in 0..3 {
            let mut p = x.clone();
            let mut m = x.clone();
            p[i] += e;
            m[i] -= e;
            let fd = (f.potential(&p) - f.potential(&m)) / (2.0 * e);
            assert!((fd - g[i]).abs() < 1e-6 * (1.0 + g[i].abs()), "{fd} vs {}", g[i]);
        }
    }
}

#[test]
fn energy_decreases_along_trajectories() {
    let f = FlowField::double_well(&[2.0, 3.0], 3.0);
    let traj = integrate(&f, &[0.4, 1.0, -1.0], 5e-4, 4000).unwrap();
    for w in traj.windows(2) {
        let v: Vec<f64> = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect();
        let g = f.eval(&w[0]);
        assert!(g.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() <= 0.0);
        assert!(f.potential(&w[1]) <= f.potential(&w[0]) + 1e-15);
    }
}

#[test]
fn compression_converges_with_level() {
    let f = FlowField::double_well(&[1.5, -2.0, 2.5], 4.0);
    let x0 = [0.5, 0.4, -0.3, 0.2];
    let full = integrate(&f, &x0, 2e-4, 5000).unwrap();
    let mut last = f64::INFINITY;
    for hi in [1.0, 1.6, 2.1, 2.6] {
        let c = compress(&f, Interval::new(-2.5, hi)).unwrap();
        let comp = c.integrate(&x0, 2e-4, 5000).unwrap();
        let err = full
            .iter()
            .zip(&comp)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        assert!(err <= last);
        last = err;
    }
    assert!(last < 1e-12);
}

#[test]
fn linear_planar_ball_is_isolating_everywhere() {
    let f = FlowField::linear(&[-1.0, 2.0]);
    let grid = LevelGrid { h: 0.3, ..LevelGrid::default() };
    let levels = parse_levels("(-1.5,1.5];(-3,3]").unwrap();
    let report = isolating_persistence(&f, 2.0, &levels, &grid).unwrap();
    assert!(report.levels.iter().all(|l| l.isolating));
    assert_eq!(report.threshold, Some(0));
}

#[test]
fn boundary_equilibrium_is_never_isolating() {
    let f = FlowField::boundary_equilibria(2, 1.0);
    let levels = parse_levels("(-2,2]").unwrap();
    let err = isolating_persistence(&f, 1.0, &levels, &LevelGrid::default()).unwrap_err();
    match err {
        FdaError::NeverIsolating { witnesses, .. } => {
            let p = &witnesses[0];
            assert!((p.iter().map(|t| t * t).sum::<f64>().sqrt() - 2.0).abs() < 1e-9);
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn double_well_persistence() {
    let ex = double_well_example();
    let report = isolating_persistence(&ex.field, ex.radius, &ex.levels, &ex.grid).unwrap();
    assert!(report.levels.iter().all(|l| l.isolating));
    assert_eq!(report.threshold, Some(0));
}

#[test]
fn linear_field_stabilizes_after_shift() {
    let ex = linear_example();
    let report = desuspension_stabilization(&ex.field, ex.radius, &ex.levels, &ex.grid).unwrap();
    for (level, k) in report.levels.iter().zip([1, 1, 2]) {
        assert_eq!(level.negative, k);
        let mut expected = vec![0; level.dim + 1];
        expected[k] = 1;
        assert_eq!(level.homology, expected);
        assert_eq!(level.shifted, vec![(0, 1)]);
    }
    assert_eq!(report.max_commutator_norm(), 0.0);
}

#[test]
fn double_well_stabilizes_after_shift() {
    let ex = double_well_example();
    let report = desuspension_stabilization(&ex.field, ex.radius, &ex.levels, &ex.grid).unwrap();
    let first = report.levels[0].shifted.clone();
    assert_eq!(first.len(), 1);
    assert_eq!(report.levels[0].homology, vec![1, 0]);
    assert_eq!(report.levels[2].homology, vec![0, 1, 0, 0]);
    assert!(report.levels.iter().all(|l| l.shifted == first));
    assert_eq!(report.max_commutator_norm(), 0.0);
}

#[test]
fn time_scaling_preserves_orbits() {
    let f = well_field();
    let g = f.scaled(4.0).unwrap();
    let x = [0.3, -0.2, 0.1, 0.5, 0.0, 0.2];
    let a = f.eval(&x);
    let b = g.eval(&x);
    for (p, q) in a.iter().zip(&b) {
        assert!((4.0 * p - q).abs() < 1e-12);
    }
}

#[test]
fn single_level_is_stable() {
    let f = FlowField::linear(&[-1.0, 2.0]);
    let grid = LevelGrid { h: 0.3, ..LevelGrid::default() };
    let report = desuspension_stabilization(&f, 1.0, &[Interval::new(-1.5, 1.5)], &grid).unwrap();
    assert_eq!(report.levels.len(), 1);
}







