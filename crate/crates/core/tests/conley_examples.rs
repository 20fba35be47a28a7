use coulomblab::conley::fields::{DoubleWell, LimitCycle, LinearField};
use coulomblab::conley::sets::{combinatorial_boundary, invariant_part, min_pos_invariant};
use coulomblab::conley::*;

fn saddle_dynamics(res: usize, h: f64) -> CubicalDynamics {
    outer_approximation(&LinearField::saddle(), Grid::cube(2, 1.0, res).unwrap(), h).unwrap()
}

#[test]
fn saddle_index_pair_has_rank_one_in_degree_one() {
    let d = saddle_dynamics(64, 0.3);
    let x = d.grid().all();
    assert!(is_isolating(&x, &d));
    let a = d.grid().ball(0.1);
    let p = build_index_pair(&a, &CellSet::new(), &x, &d).unwrap();
    assert!(p.validated);
    assert_eq!(p.homology, vec![0, 1, 0]);
    assert!(validate_index_pair(&p, &x, &d).passed());
}

#[test]
fn saddle_pair_without_exit_set_fails_exit_condition() {
    let d = saddle_dynamics(64, 0.3);
    let x = d.grid().all();
    let p = build_index_pair(&d.grid().ball(0.1), &CellSet::new(), &x, &d).unwrap();
    let bad = IndexPair::new(p.n.clone(), CellSet::new(), &d);
    let report = validate_index_pair(&bad, &x, &d);
    assert!(!report.condition(3));
    for &c in &report.exit {
        assert!(d.grid().center(c)[0].abs() > d.grid().center(c)[1].abs() * 0.5);
    }
}

#[test]
fn full_pair_passes_only_without_invariant_set() {
    let d = saddle_dynamics(32, 0.3);
    let x = d.grid().all();
    let pair = IndexPair::new(x.clone(), x.clone(), &d);
    let report = validate_index_pair(&pair, &x, &d);
    assert!(report.condition(2) && report.condition(3));
    assert!(!report.condition(1));
    assert!(pair.homology.iter().all(|&r| r == 0));
}

#[test]
fn attractor_index_pair_is_a_point() {
    let f = LinearField::attractor(2).unwrap();
    let d = outer_approximation(&f, Grid::cube(2, 1.0, 64).unwrap(), 0.3).unwrap();
    let x = d.grid().all();
    assert_eq!(positive_invariant_part(&x, &d), x);
    let p = build_index_pair(&d.grid().ball(0.2), &CellSet::new(), &x, &d).unwrap();
    assert!(p.l.is_empty());
    assert_eq!(p.homology, vec![1, 0, 0]);
}

#[test]
fn repeller_1d_index_pair_is_a_circle() {
    let f = LinearField::repeller(1).unwrap();
    let d = outer_approximation(&f, Grid::cube(1, 1.0, 64).unwrap(), 0.3).unwrap();
    let x = d.grid().all();
    let a = d.grid().ball(0.7);
    let ends: CellSet = [a.as_slice()[0], *a.as_slice().last().unwrap()].into_iter().collect();
    let p = build_index_pair(&a, &ends, &x, &d).unwrap();
    assert_eq!(p.homology, vec![0, 1]);
}

#[test]
fn repeller_seed_touching_core_violates_hypothesis_two() {
    let f = LinearField::repeller(1).unwrap();
    let d = outer_approximation(&f, Grid::cube(1, 1.0, 64).unwrap(), 0.3).unwrap();
    let x = d.grid().all();
    let b = d.grid().ball(0.05);
    match build_index_pair(&CellSet::new(), &b, &x, &d) {
        Err(ConleyError::HypothesisViolated { hypothesis, witnesses }) => {
            assert_eq!(hypothesis, 2);
            assert!(!witnesses.is_empty());
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn drift_empties_positive_invariant_part() {
    let f = coulomblab::conley::fields::Drift { velocity: vec![1.0, 0.0] };
    let grid = Grid::cube(2, 1.0, 32).unwrap();
    let d = outer_approximation(&f, grid, 0.3).unwrap();
    let left = d.grid().select(|p| p[0] < 0.0);
    assert!(positive_invariant_part(&left, &d).is_empty());
}

#[test]
fn double_well_invariant_set_is_bounded() {
    let f = DoubleWell { radius_bound: 2.0 };
    let d = outer_approximation(&f, Grid::cube(1, 2.0, 128).unwrap(), 0.02).unwrap();
    let x = d.grid().all();
    let inv = invariant_part(&x, &d);
    let delta = d.padding() * 4.0;
    for c in inv.iter() {
        assert!(d.grid().center(c)[0].abs() <= 1.0 + delta);
    }
    assert!(is_isolating(&x, &d));
}

#[test]
fn unstable_axis_closure_runs_to_the_edge() {
    let d = saddle_dynamics(64, 0.3);
    let x = d.grid().all();
    let s: CellSet = [d.grid().locate(&[0.7, 0.0]).unwrap()].into_iter().collect();
    let p = min_pos_invariant(&s, &x, &d);
    assert!(p.iter().any(|c| combinatorial_boundary(&x, &d).contains(c)));
    assert!(p.iter().all(|c| d.grid().center(c)[0] > 0.6));
    assert_eq!(min_pos_invariant(&p, &x, &d), p);
}

#[test]
fn limit_cycle_annulus_carries_the_circle() {
    let f = LimitCycle { rate: 800.0, omega: 5.0, radius_bound: 2.3 };
    let d = outer_approximation(&f, Grid::cube(2, 1.6, 64).unwrap(), 0.0025).unwrap();
    let x = d.grid().select(|p| {
        let r = p[0].hypot(p[1]);
        (0.4..=1.45).contains(&r)
    });
    assert!(is_isolating(&x, &d));
    let ring = d.grid().select(|p| (p[0].hypot(p[1]) - 1.0).abs() < 0.05);
    let p = build_index_pair(&ring, &CellSet::new(), &x, &d).unwrap();
    assert_eq!(p.homology, vec![1, 1, 0]);
}



fn limit_cycle_setup() -> (CubicalDynamics, CellSet) {
    let f = LimitCycle { rate: 800.0, omega: 5.0, radius_bound: 2.3 };
    let d = outer_approximation(&f, Grid::cube(2, 1.6, 64).unwrap(), 0.0025).unwrap();
    let x = d.grid().select(|p| (0.4..=1.45).contains(&p[0].hypot(p[1])));
    (d, x)
}

fn ring(d: &CubicalDynamics, r: f64, w: f64) -> CellSet {
    d.grid().select(|p| (p[0].hypot(p[1]) - r).abs() < w)
}

#[test]
fn saddle_pairs_from_different_seeds_intersect() {
    let d = saddle_dynamics(64, 0.3);
    let x = d.grid().all();
    let p1 = build_index_pair(&d.grid().ball(0.1), &CellSet::new(), &x, &d).unwrap();
    let b2 = d.grid().select(|p| p[0].abs() > 0.8 && p[1].abs() < 0.1);
    let a2 = d.grid().select(|p| p[0].abs() < 0.1 && (0.85..0.93).contains(&p[1]));
    let p2 = build_index_pair(&a2, &b2, &x, &d).unwrap();
    assert_ne!(p1.n, p2.n);
    let meet = intersect_index_pairs(&p1, &p2, &x, &d).unwrap();
    assert!(meet.validated);
    for h in [&p1.homology, &p2.homology, &meet.homology] {
        assert_eq!(h, &vec![0, 1, 0]);
    }
    let same = intersect_index_pairs(&p1, &p1, &x, &d).unwrap();
    assert_eq!(same.homology, p1.homology);
}

#[test]
fn attractor_pairs_intersect_to_common_core() {
    let f = LinearField::attractor(2).unwrap();
    let d = outer_approximation(&f, Grid::cube(2, 1.0, 64).unwrap(), 0.3).unwrap();
    let x = d.grid().all();
    let p1 = build_index_pair(&d.grid().ball(0.2), &CellSet::new(), &x, &d).unwrap();
    let p2 = build_index_pair(&d.grid().select(|p| p[0] > 0.3 && p[0] < 0.5 && p[1].abs() < 0.1), &CellSet::new(), &x, &d).unwrap();
    let meet = intersect_index_pairs(&p1, &p2, &x, &d).unwrap();
    assert!(meet.l.is_empty());
    assert_eq!(meet.n, p1.n.intersection(&p2.n));
    assert_eq!(meet.homology, vec![1, 0, 0]);
}

#[test]
fn circle_inclusion_has_degree_one_through_the_bridge() {
    let (d, x) = limit_cycle_setup();
    let a = ring(&d, 1.0, 0.04);
    let p1 = build_index_pair(&a, &CellSet::new(), &x, &d).unwrap();
    let p2 = build_index_pair(&ring(&d, 0.7, 0.04), &CellSet::new(), &x, &d).unwrap();
    assert_ne!(p1.n, p2.n);
    let report = induced_map_check(CellMap::Inclusion, &a, &CellSet::new(), &p1, &p2, &x, &d).unwrap();
    assert_eq!(report.source_homology, vec![1, 1, 0]);
    assert_eq!(report.ranks[0], vec![1, 1, 0]);
    assert_eq!(report.ranks[1], vec![1, 1, 0]);
    for m in &report.maps {
        assert_eq!(m[1][0][0].abs(), 1);
    }
    assert!(report.commutes);
}

#[test]
fn collapse_near_attractor_is_rank_one_in_degree_zero() {
    let f = LinearField::attractor(2).unwrap();
    let d = outer_approximation(&f, Grid::cube(2, 1.0, 64).unwrap(), 0.3).unwrap();
    let x = d.grid().all();
    let a = d.grid().select(|p| (0.3..0.4).contains(&p[0].hypot(p[1])));
    let target = d.grid().locate(&[0.01, 0.01]).unwrap();
    let p1 = build_index_pair(&d.grid().ball(0.2), &CellSet::new(), &x, &d).unwrap();
    let p2 = build_index_pair(&a, &CellSet::new(), &x, &d).unwrap();
    let report = induced_map_check(CellMap::Collapse(target), &a, &CellSet::new(), &p1, &p2, &x, &d).unwrap();
    assert_eq!(report.source_homology, vec![1, 1, 0]);
    assert_eq!(report.ranks[0], vec![1, 0, 0]);
    assert_eq!(report.ranks[1], vec![1, 0, 0]);
    assert!(report.commutes);
}

#[test]
fn trivial_source_gives_zero_maps() {
    let (d, x) = limit_cycle_setup();
    let a = ring(&d, 1.0, 0.04);
    let p1 = build_index_pair(&a, &CellSet::new(), &x, &d).unwrap();
    let p2 = build_index_pair(&ring(&d, 0.7, 0.04), &CellSet::new(), &x, &d).unwrap();
    let report = induced_map_check(CellMap::Inclusion, &a, &a, &p1, &p2, &x, &d);
    // B = A lies in A+(X), so the seed hypothesis (2) rejects it.
    assert!(matches!(report, Err(ConleyError::HypothesisViolated { hypothesis: 2, .. })));
}

#[test]
fn outer_approximation_is_sampling_sound() {
    for (f, h) in [
        (Box::new(LinearField::saddle()) as Box<dyn VectorField>, 0.3),
        (Box::new(LinearField::rotation()), 0.05),
    ] {
        let d = outer_approximation(f.as_ref(), Grid::cube(2, 1.0, 32).unwrap(), h).unwrap();
        assert!(d.soundness_check(f.as_ref(), 8, 7).passed());
    }
}

#[test]
fn zero_field_images_contain_the_cell() {
    let f = coulomblab::conley::fields::Drift { velocity: vec![0.0, 0.0] };
    let d = outer_approximation(&f, Grid::cube(2, 1.0, 16).unwrap(), 0.1).unwrap();
    for c in 0..d.grid().len() {
        assert!(d.image(c).contains(&c));
        let (nb, _) = d.grid().neighbors(c);
        assert!(d.image(c).iter().all(|e| *e == c || nb.contains(e) || {
            let (a, b) = (d.grid().center(c), d.grid().center(*e));
            (a[0] - b[0]).abs().max((a[1] - b[1]).abs()) <= d.padding() + 2.0 * d.grid().cell_size(0)
        }));
    }
}

#[test]
fn contraction_shifts_images_toward_zero() {
    let f = LinearField::attractor(1).unwrap();
    let d = outer_approximation(&f, Grid::cube(1, 2.0, 64).unwrap(), 0.1).unwrap();
    let g = d.grid();
    for c in 0..g.len() {
        let x = g.center(c)[0];
        let im = d.image(c);
        let mean = im.iter().map(|&e| g.center(e)[0]).sum::<f64>() / im.len() as f64;
        if x.abs() > 2.0 * g.cell_size(0) {
            assert!(mean.abs() < x.abs(), "cell at {x} has image mean {mean}");
        }
    }
}

#[test]
fn rotation_displacement_is_bounded() {
    let f = LinearField::rotation();
    let d = outer_approximation(&f, Grid::cube(2, 1.0, 32).unwrap(), 0.05).unwrap();
    let g = d.grid();
    let bound = 2f64.sqrt() * 0.05 + 2f64.sqrt() * d.padding() + g.cell_diameter();
    for c in 0..g.len() {
        let a = g.center(c);
        for &e in d.image(c) {
            let b = g.center(e);
            assert!((a[0] - b[0]).hypot(a[1] - b[1]) <= bound + 1e-12);
        }
    }
}

#[test]
fn refinement_does_not_increase_saddle_ranks() {
    let mut previous: Option<Vec<usize>> = None;
    for res in [64, 128] {
        let d = saddle_dynamics(res, 0.3);
        let x = d.grid().all();
        let p = build_index_pair(&d.grid().ball(0.1), &CellSet::new(), &x, &d).unwrap();
        if let Some(prev) = &previous {
            assert!(p.homology.iter().zip(prev).all(|(a, b)| a <= b));
        }
        assert_eq!(p.homology, vec![0, 1, 0]);
        previous = Some(p.homology);
    }
}
