//! The ten acceptance criteria as runnable checks, each reporting pass/fail
//! with a short detail line.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aps::{self, BoundaryValueProblem};
use crate::conley::fields::{LimitCycle, LinearField};
use crate::conley::{
    build_index_pair, induced_map_check, intersect_index_pairs, is_isolating, outer_approximation, CellMap, CellSet,
    CubicalDynamics, Grid, IndexPair,
};
use crate::dec::Cochain;
use crate::doublecoulomb::DoubleCoulomb;
use crate::exact;
use crate::fda;
use crate::linalg;
use crate::mesh::{catalogue, generate, parse_generator, SimplicialComplex};
use crate::spectral::{self, SpectralModel, SpectralProjection};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {}: {} {} ({:.2} s) {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.detail
        )
    }
}

type Check = Result<(bool, String), String>;

fn run(id: u8, name: &'static str, f: impl FnOnce() -> Check) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn mesh(spec: &str) -> Result<SimplicialComplex, String> {
    let g = parse_generator(spec).map_err(|e| e.to_string())?;
    generate(&g).map_err(|e| e.to_string())
}

fn random_cochain(m: &SimplicialComplex, k: usize, seed: u64) -> Result<Cochain, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Cochain::new(m, k, (0..m.count(k)).map(|_| rng.gen_range(-1.0..1.0)).collect()).map_err(|e| e.to_string())
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Boundary-carrying catalogue meshes.
fn bounded_catalogue() -> Result<Vec<SimplicialComplex>, String> {
    let mut out = Vec::new();
    for spec in catalogue() {
        let m = generate(&spec).map_err(|e| e.to_string())?.with_name(spec.to_string());
        if !m.is_closed() {
            out.push(m);
        }
    }
    Ok(out)
}

pub const DECOMPOSITION_MESHES: [&str; 4] = ["disk:16", "annulus:16", "pair-of-pants:12", "solid-torus:3"];

pub fn criterion_1() -> CriterionResult {
    run(1, "double Coulomb decomposition", || {
        let start = Instant::now();
        let mut worst = 0.0f64;
        let mut worst_idem = 0.0f64;
        for spec in DECOMPOSITION_MESHES {
            let m = mesh(spec)?;
            let dc = DoubleCoulomb::new(&m).map_err(|e| e.to_string())?;
            for seed in 0..20 {
                let alpha = random_cochain(&m, 1, seed)?;
                let scale = linalg::norm(&alpha.values);
                let out = dc.decompose(&alpha).map_err(|e| e.to_string())?;
                worst = worst.max(out.residuals.max() / scale);
                let again = dc.decompose(&out.omega).map_err(|e| e.to_string())?;
                let idem = diff_norm(&again.omega.values, &out.omega.values).max(linalg::norm(&again.xi.values));
                worst_idem = worst_idem.max(idem / scale);
            }
        }
        let secs = start.elapsed().as_secs_f64();
        let ok = worst <= 1e-9 && worst_idem <= 1e-9 && secs <= 30.0;
        Ok((ok, format!("max relative residual {worst:.2e}, idempotence {worst_idem:.2e}, {secs:.1} s")))
    })
}

pub fn criterion_2() -> CriterionResult {
    run(2, "least-squares oracle agreement", || {
        let m = mesh("annulus:16")?;
        let dc = DoubleCoulomb::new(&m).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for seed in 100..110 {
            let alpha = random_cochain(&m, 1, seed)?;
            let staged = dc.decompose(&alpha).map_err(|e| e.to_string())?;
            let dense = dc.characterization_solve(&alpha).map_err(|e| e.to_string())?;
            worst = worst
                .max(max_diff(&staged.omega.values, &dense.omega.values))
                .max(max_diff(&staged.xi.values, &dense.xi.values));
        }
        Ok((worst <= 1e-8, format!("max entrywise difference {worst:.2e} over 10 seeds")))
    })
}

pub fn criterion_3() -> CriterionResult {
    run(3, "harmonic boundary space", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for m in bounded_catalogue()? {
            let dc = DoubleCoulomb::new(&m).map_err(|e| e.to_string())?;
            let b0 = dc.boundary().component_count();
            let h = dc.harmonic_space();
            let kernel = h.ev_kernel();
            // the kernel must be spanned by the all-ones vector
            let ones = DMatrix::from_element(h.dim(), 1, 1.0 / (h.dim() as f64).sqrt());
            let kernel_ok = kernel.ncols() == 1 && linalg::subspace_distance(&kernel, &ones) <= 1e-8;
            let good = h.dim() == b0 && h.ev_rank() + 1 == b0 && kernel_ok;
            ok &= good;
            parts.push(format!("{} dim {} rank {} b0 {}", m.name(), h.dim(), h.ev_rank(), b0));
        }
        Ok((ok, parts.join("; ")))
    })
}

pub fn criterion_4() -> CriterionResult {
    run(4, "constraint rank", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for m in bounded_catalogue()? {
            let dc = DoubleCoulomb::new(&m).map_err(|e| e.to_string())?;
            let r = dc.constraint_rank();
            ok &= r + 1 == m.vertex_count();
            parts.push(format!("{} rank {} V {}", m.name(), r, m.vertex_count()));
        }
        Ok((ok, parts.join("; ")))
    })
}

fn random_symmetric(rng: &mut ChaCha8Rng, m: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

fn model_of(l: &DMatrix<f64>) -> Result<SpectralModel, String> {
    SpectralModel::from_symmetric(l.clone(), spectral::Provenance::Synthetic).map_err(|e| e.to_string())
}

pub fn criterion_5() -> CriterionResult {
    run(5, "spectral boundary index", || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut index_ok = 0;
        for _ in 0..50 {
            let m = rng.gen_range(1..=8);
            let l = random_symmetric(&mut rng, m);
            let model = model_of(&l)?;
            let tol = model.zero_tolerance();
            let positive = l.clone().symmetric_eigenvalues().iter().filter(|&&x| x > tol).count() as i64;
            let mut agree = true;
            for steps in [32, 128] {
                let p = BoundaryValueProblem::new(l.clone(), 1.0, steps, model.nonpositive_projection()).map_err(|e| e.to_string())?;
                agree &= aps::numeric_index(&p).map_err(|e| e.to_string())?.index == positive;
            }
            index_ok += agree as usize;
        }
        let mut change_ok = 0;
        for _ in 0..20 {
            let m = rng.gen_range(2..=8);
            let l = random_symmetric(&mut rng, m);
            let model = model_of(&l)?;
            let base = BoundaryValueProblem::new(l, 1.0, 32, model.nonpositive_projection()).map_err(|e| e.to_string())?;
            let rank = rng.gen_range(0..=m);
            let p = if rank == 0 {
                SpectralProjection::from_span(&DMatrix::zeros(m, 0))
            } else {
                SpectralProjection::from_span(&DMatrix::from_fn(m, rank, |_, _| rng.gen_range(-1.0..1.0)))
            };
            change_ok += aps::verify_index_change(&base, &p).map_err(|e| e.to_string())?.holds as usize;
        }
        Ok((index_ok == 50 && change_ok == 20, format!("index = #positive on {index_ok}/50, index change on {change_ok}/20")))
    })
}

pub fn criterion_6() -> CriterionResult {
    run(6, "sum Fredholm identities", || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut ok = 0;
        for _ in 0..50 {
            let domain = rng.gen_range(1..=6);
            let w1 = rng.gen_range(1..=5);
            let w2 = rng.gen_range(1..=5);
            let mut mat = |rows: usize| -> Vec<Vec<i64>> {
                // rank-deficient integer matrices: products of thin factors
                let k = rng.gen_range(0..=domain);
                let a: Vec<Vec<i64>> = (0..rows).map(|_| (0..k).map(|_| rng.gen_range(-2..=2)).collect()).collect();
                let b: Vec<Vec<i64>> = (0..k).map(|_| (0..domain).map(|_| rng.gen_range(-2..=2)).collect()).collect();
                (0..rows).map(|i| (0..domain).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
            };
            let d1 = exact::from_i64(&mat(w1));
            let d2 = exact::from_i64(&mat(w2));
            ok += aps::verify_sum_fredholm(&d1, &d2, domain).map_err(|e| e.to_string())?.holds() as usize;
        }
        Ok((ok == 50, format!("{ok}/50 pairs")))
    })
}

pub fn criterion_7() -> CriterionResult {
    run(7, "cohomological identity table", || {
        let table = aps::example_table().map_err(|e| e.to_string())?;
        let holds = table.iter().filter(|e| e.satisfies_identity()).count();
        let rejected = table.iter().filter(|e| !e.perturbed().satisfies_identity()).count();
        let ok = table.len() >= 4 && holds == table.len() && rejected == table.len();
        Ok((ok, format!("{holds}/{} entries hold, {rejected} perturbed entries fail", table.len())))
    })
}

pub fn criterion_8() -> CriterionResult {
    run(8, "L1 nonpositive eigenspace", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for spec in ["torus2:8", "circle:16"] {
            let m = mesh(spec)?;
            let r = spectral::l1_negative_graph_check(&m).map_err(|e| e.to_string())?;
            ok &= r.residual <= 1e-8 && r.nonpositive_dim == r.constructed_dim;
            parts.push(format!("{spec} distance {:.2e} dims {}/{}", r.residual, r.nonpositive_dim, r.constructed_dim));
        }
        Ok((ok, parts.join("; ")))
    })
}

fn planar(field: &LinearField, h: f64, half_width: f64) -> Result<CubicalDynamics, String> {
    outer_approximation(field, Grid::cube(2, half_width, 64).map_err(|e| e.to_string())?, h).map_err(|e| e.to_string())
}

fn near(d: &CubicalDynamics, c: &[f64], r: f64) -> CellSet {
    d.grid().select(|p| (p[0] - c[0]).hypot(p[1] - c[1]) <= r)
}

fn pair(d: &CubicalDynamics, a: &CellSet, b: &CellSet, x: &CellSet) -> Result<IndexPair, String> {
    build_index_pair(a, b, x, d).map_err(|e| e.to_string())
}

/// Attractor, 1D repeller and planar saddle: rank one in the Morse degree.
fn morse_examples() -> Result<(bool, String), String> {
    let mut ok = true;
    let mut parts = Vec::new();
    let attractor = planar(&LinearField::attractor(2).map_err(|e| e.to_string())?, 0.3, 1.0)?;
    let x = attractor.grid().all();
    let p = pair(&attractor, &attractor.grid().ball(0.2), &CellSet::new(), &x)?;
    ok &= p.validated && p.homology == [1, 0, 0];
    parts.push(format!("attractor {:?}", p.homology));

    let f = LinearField::repeller(1).map_err(|e| e.to_string())?;
    let d = outer_approximation(&f, Grid::cube(1, 1.0, 64).map_err(|e| e.to_string())?, 0.3).map_err(|e| e.to_string())?;
    let x = d.grid().all();
    let a = d.grid().ball(0.7);
    let ends: CellSet = [a.as_slice()[0], a.as_slice()[a.len() - 1]].into_iter().collect();
    let p = pair(&d, &a, &ends, &x)?;
    ok &= p.validated && p.homology == [0, 1];
    parts.push(format!("repeller {:?}", p.homology));

    let saddle = planar(&LinearField::saddle(), 0.3, 1.0)?;
    let x = saddle.grid().all();
    let p = pair(&saddle, &saddle.grid().ball(0.1), &CellSet::new(), &x)?;
    ok &= p.validated && p.homology == [0, 1, 0];
    parts.push(format!("saddle {:?}", p.homology));
    Ok((ok, parts.join(", ")))
}

const SCENARIO_HALF_WIDTH: f64 = 1.5;

/// One seeded scenario: a shifted Morse equilibrium, two index pairs from
/// different seeds and their intersection.
fn intersection_scenario(seed: u64) -> Result<bool, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = rng.gen_range(0..3);
    let spread = if kind == 1 { 0.05 } else { 0.2 };
    let c = vec![rng.gen_range(-spread..spread), rng.gen_range(-spread..spread)];
    let base = match kind {
        0 => LinearField::attractor(2),
        1 => Ok(LinearField::saddle()),
        _ => LinearField::repeller(2),
    }
    .map_err(|e| e.to_string())?;
    let d = planar(&base.with_center(c.clone()).map_err(|e| e.to_string())?, 0.3, SCENARIO_HALF_WIDTH)?;
    let x = d.grid().all();
    if !is_isolating(&x, &d) {
        return Ok(false);
    }
    let a1 = near(&d, &c, rng.gen_range(0.08..0.2));
    let (a2, b2) = match kind {
        0 => {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = rng.gen_range(0.3..0.5);
            (near(&d, &[c[0] + r * t.cos(), c[1] + r * t.sin()], 0.06), CellSet::new())
        }
        1 => {
            let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let a2 = d.grid().select(|p| (p[0] - c[0]).abs() < 0.1 && (0.85..0.93).contains(&(s * p[1] / SCENARIO_HALF_WIDTH)));
            let b2 = d.grid().select(|p| (p[0] - c[0]).abs() > 0.8 * SCENARIO_HALF_WIDTH && (p[1] - c[1]).abs() < 0.1);
            (a2, b2)
        }
        _ => (near(&d, &c, rng.gen_range(0.25..0.35)), CellSet::new()),
    };
    let p1 = pair(&d, &a1, &CellSet::new(), &x)?;
    let p2 = pair(&d, &a2, &b2, &x)?;
    let meet = intersect_index_pairs(&p1, &p2, &x, &d).map_err(|e| e.to_string())?;
    Ok(p1.validated && p2.validated && meet.validated && p1.homology == p2.homology && meet.homology == p1.homology)
}

/// Bridge-diagram commutation for an inclusion around a limit cycle and a
/// collapse onto the attractor.
fn induced_examples() -> Result<(bool, String), String> {
    let f = LimitCycle { rate: 800.0, omega: 5.0, radius_bound: 2.3 };
    let d = outer_approximation(&f, Grid::cube(2, 1.6, 64).map_err(|e| e.to_string())?, 0.0025).map_err(|e| e.to_string())?;
    let x = d.grid().select(|p| (0.4..=1.45).contains(&p[0].hypot(p[1])));
    let ring = |r: f64| d.grid().select(|p| (p[0].hypot(p[1]) - r).abs() < 0.04);
    let a = ring(1.0);
    let p1 = pair(&d, &a, &CellSet::new(), &x)?;
    let p2 = pair(&d, &ring(0.7), &CellSet::new(), &x)?;
    let cycle = induced_map_check(CellMap::Inclusion, &a, &CellSet::new(), &p1, &p2, &x, &d).map_err(|e| e.to_string())?;

    let g = planar(&LinearField::attractor(2).map_err(|e| e.to_string())?, 0.3, 1.0)?;
    let x = g.grid().all();
    let a = g.grid().select(|p| (0.3..0.4).contains(&p[0].hypot(p[1])));
    let target = g.grid().locate(&[0.01, 0.01]).ok_or("collapse target outside grid")?;
    let q1 = pair(&g, &g.grid().ball(0.2), &CellSet::new(), &x)?;
    let q2 = pair(&g, &a, &CellSet::new(), &x)?;
    let collapse = induced_map_check(CellMap::Collapse(target), &a, &CellSet::new(), &q1, &q2, &x, &g).map_err(|e| e.to_string())?;
    let ok = cycle.commutes && collapse.commutes && cycle.ranks[0] == [1, 1, 0] && collapse.ranks[0] == [1, 0, 0];
    Ok((ok, format!("cycle ranks {:?}, collapse ranks {:?}", cycle.ranks[0], collapse.ranks[0])))
}

pub const INTERSECTION_SCENARIOS: u64 = 25;

pub fn criterion_9() -> CriterionResult {
    run(9, "Conley index pairs", || {
        let start = Instant::now();
        let (morse_ok, morse) = morse_examples()?;
        let mut meet_ok = 0;
        for seed in 0..INTERSECTION_SCENARIOS {
            meet_ok += intersection_scenario(seed)? as usize;
        }
        let (induced_ok, induced) = induced_examples()?;
        let secs = start.elapsed().as_secs_f64();
        let ok = morse_ok && meet_ok == INTERSECTION_SCENARIOS as usize && induced_ok && secs <= 120.0;
        Ok((ok, format!("{morse}; intersections {meet_ok}/{INTERSECTION_SCENARIOS}; {induced}; {secs:.1} s")))
    })
}

pub fn criterion_10() -> CriterionResult {
    run(10, "spectral level stabilization", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for ex in [fda::linear_example(), fda::double_well_example()] {
            let report = fda::desuspension_stabilization(&ex.field, ex.radius, &ex.levels, &ex.grid).map_err(|e| e.to_string())?;
            let first = &report.levels[0].shifted;
            let stable = report.levels.len() >= 3 && report.levels.iter().all(|l| &l.shifted == first);
            let norm = report.max_commutator_norm();
            ok &= stable && norm == 0.0;
            parts.push(format!("{} shifted {:?} over {} levels, commutator {:.1e}", ex.name, first, report.levels.len(), norm));
        }
        Ok((ok, parts.join("; ")))
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_carry_status() {
        let r = criterion_7();
        assert!(r.line().starts_with("criterion 7: PASS"));
    }
}
