use coulomblab::mesh::{generate, parse_generator, SimplicialComplex};
use coulomblab::spectral::{build_curl_model, commutator_norm, l1_graph_check, l1_negative_graph_check, Interval, SpectralModel};
use coulomblab::linalg::CsrMatrix;

fn gen(s: &str) -> SimplicialComplex {
    generate(&parse_generator(s).unwrap()).unwrap()
}

#[test]
fn three_torus_curl_kernel_and_symmetry() {
    let model = build_curl_model(&gen("torus3:3")).unwrap();
    let tol = model.zero_tolerance();
    let ev = model.eigenvalues();
    let zeros = ev.iter().filter(|l| l.abs() <= tol).count();
    assert_eq!(zeros, 3);
    let n = ev.len();
    for i in 0..n {
        assert!((ev[i] + ev[n - 1 - i]).abs() < 1e-6, "{} vs {}", ev[i], ev[n - 1 - i]);
    }
    let negatives = ev.iter().filter(|&&l| l < -tol).count();
    assert_eq!(model.nonpositive_projection().rank(), negatives + 3);
    let (res, orth) = model.eigen_residuals();
    assert!(res < 1e-8 && orth < 1e-8);
}

#[test]
fn eigen_interval_projections_commute() {
    let model = build_curl_model(&gen("torus3:3")).unwrap();
    for iv in [Interval::new(-1.0, 1.0), Interval::below(0.0), Interval::all()] {
        assert!(commutator_norm(&model, &model.projection(iv)).unwrap() <= 1e-12 * model.matrix().amax().max(1.0));
    }
}

#[test]
fn l1_graph_on_flat_torus() {
    let r = l1_negative_graph_check(&gen("torus2:6")).unwrap();
    assert_eq!(r.image_dim, r.vertex_count - 1);
    assert_eq!(r.nonpositive_dim, r.constructed_dim);
    assert!(r.residual <= 1e-8, "{}", r.residual);
}

#[test]
fn l1_graph_on_circle() {
    let r = l1_negative_graph_check(&gen("circle:12")).unwrap();
    assert!(r.residual <= 1e-8, "{}", r.residual);
    // unweighted cycle graph through the generic entry point
    let n = 7;
    let trip: Vec<(usize, usize, f64)> = (0..n).flat_map(|i| [(i, i, -1.0), (i, (i + 1) % n, 1.0)]).collect();
    let d = CsrMatrix::from_triplets(n, n, &trip);
    let r = l1_graph_check(&d, &vec![1.0; n], &vec![1.0; n]).unwrap();
    assert_eq!(r.nonpositive_dim, n);
    assert!(r.residual <= 1e-8);
}

#[test]
fn l1_requires_closed_complex() {
    assert!(l1_negative_graph_check(&gen("disk:3")).is_err());
}

#[test]
fn nested_projections_compose() {
    let m = SpectralModel::synthetic_diag(&[-3.0, -1.0, -0.2, 0.4, 2.0]);
    let inner = m.projection(Interval::new(-1.5, 0.5)).matrix();
    let outer = m.projection(Interval::below(0.5)).matrix();
    assert!((&inner * &outer - &inner).amax() < 1e-12);
}
