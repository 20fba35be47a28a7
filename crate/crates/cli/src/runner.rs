//! Executes scenarios and renders their CSV reports.

use std::fmt::{Debug, Display};
use std::path::Path;

use coulomblab::acceptance;
use coulomblab::aps::{self, BoundaryValueProblem};
use coulomblab::conley::{self, fields, CellMap, CellSet, CubicalDynamics, Grid, IndexPair};
use coulomblab::dec::Cochain;
use coulomblab::doublecoulomb::DoubleCoulomb;
use coulomblab::fda;
use coulomblab::linalg;
use coulomblab::mesh::{self, SimplicialComplex};
use coulomblab::spectral::{self, Interval, Provenance, SpectralModel};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::ScenarioConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    ConfigParse(String),
    #[error("{message}")]
    Module { module: &'static str, code: String, message: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Module-qualified code such as `conley::HypothesisViolated`.
    pub fn code(&self) -> String {
        match self {
            CliError::ConfigParse(_) => "ConfigParse".into(),
            CliError::Module { module, code, .. } => format!("{module}::{code}"),
            CliError::Io(_) => "io".into(),
            CliError::Csv(_) => "csv".into(),
        }
    }
}

fn module_err<E: Debug + Display>(module: &'static str) -> impl Fn(E) -> CliError {
    move |e| {
        let debug = format!("{e:?}");
        let code = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        CliError::Module { module, code, message: e.to_string() }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::ConfigParse(msg.into())
}

/// Artifacts of one scenario: the CSV body, an optional SVG and whether all
/// in-config assertions held.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv: String,
    pub svg: Option<String>,
    pub passed: bool,
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Table { writer })
    }

    fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    fn finish(self) -> Result<String, CliError> {
        let bytes = self.writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| config_err(e.to_string()))
    }
}

fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

fn ranks(v: &[usize]) -> String {
    v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
}

/// Runs one scenario and writes its report and SVG when paths are set.
pub fn run(config: &ScenarioConfig) -> Result<Outcome, CliError> {
    let outcome = execute(config)?;
    write_artifacts(config, &outcome)?;
    Ok(outcome)
}

fn execute(config: &ScenarioConfig) -> Result<Outcome, CliError> {
    match config.command.as_str() {
        "decompose" => decompose(config),
        "aps" => aps_index(config),
        "spectral" => spectral_check(config),
        "conley" => conley_run(config),
        "fda" => fda_run(config),
        other => Err(config_err(format!("unknown command `{other}`"))),
    }
}

fn write_artifacts(config: &ScenarioConfig, outcome: &Outcome) -> Result<(), CliError> {
    if let Some(path) = &config.report {
        std::fs::write(path, &outcome.csv)?;
    }
    match (&config.svg, &outcome.svg) {
        (Some(path), Some(svg)) => std::fs::write(path, svg)?,
        (Some(_), None) => return Err(config_err(format!("`{}` produces no SVG", config.command))),
        _ => {}
    }
    Ok(())
}

/// Maximum worker threads from `COULOMBLAB_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("COULOMBLAB_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(config_err(format!("COULOMBLAB_THREADS must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs independent scenarios in parallel; reports are written afterwards in
/// input order.
pub fn run_batch(configs: &[ScenarioConfig]) -> Result<Vec<Result<Outcome, CliError>>, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| config_err(e.to_string()))?;
    let results: Vec<Result<Outcome, CliError>> = pool.install(|| configs.par_iter().map(execute).collect());
    Ok(configs
        .iter()
        .zip(results)
        .map(|(c, r)| r.and_then(|o| write_artifacts(c, &o).map(|_| o)))
        .collect())
}

/// Runs every acceptance criterion; the CSV lists id, name and status.
pub fn selftest() -> Result<(Outcome, Vec<acceptance::CriterionResult>), CliError> {
    let results = acceptance::run_all();
    let mut t = Table::new(&["criterion", "name", "status"])?;
    for r in &results {
        t.row(&[r.id.to_string(), r.name.to_string(), if r.passed { "PASS" } else { "FAIL" }.to_string()])?;
    }
    let passed = results.iter().all(|r| r.passed);
    Ok((Outcome { csv: t.finish()?, svg: None, passed }, results))
}

fn load_mesh(spec: &str) -> Result<SimplicialComplex, CliError> {
    if spec.ends_with(".off") {
        return mesh::read_off(Path::new(spec)).map_err(module_err("mesh"));
    }
    let g = mesh::parse_generator(spec).map_err(module_err("mesh"))?;
    Ok(mesh::generate(&g).map_err(module_err("mesh"))?.with_name(g.to_string()))
}

fn required<'a>(value: &'a Option<String>, flag: &str, command: &str) -> Result<&'a str, CliError> {
    value.as_deref().ok_or_else(|| config_err(format!("`{command}` needs --{flag}")))
}

/// `random:SEED` or a JSON cochain file.
fn load_alpha(spec: &str, m: &SimplicialComplex) -> Result<Cochain, CliError> {
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed.trim().parse().map_err(|_| config_err(format!("bad alpha seed `{seed}`")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..m.count(1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        return Cochain::new(m, 1, values).map_err(module_err("dec"));
    }
    let text = std::fs::read_to_string(spec)?;
    Cochain::from_json(&text, m).map_err(module_err("dec"))
}

fn decompose(config: &ScenarioConfig) -> Result<Outcome, CliError> {
    let m = load_mesh(required(&config.mesh, "mesh", "decompose")?)?;
    let alpha_spec = config.alpha.clone().unwrap_or_else(|| format!("random:{}", config.seed()));
    let alpha = load_alpha(&alpha_spec, &m)?;
    let tol = config.tol.unwrap_or(1e-9);
    let dc = DoubleCoulomb::new(&m).map_err(module_err("doublecoulomb"))?;
    let out = dc.decompose(&alpha).map_err(module_err("doublecoulomb"))?;
    let again = dc.decompose(&out.omega).map_err(module_err("doublecoulomb"))?;
    let scale = linalg::norm(&alpha.values).max(f64::MIN_POSITIVE);
    let drift: Vec<f64> = again.omega.values.iter().zip(&out.omega.values).map(|(a, b)| a - b).collect();
    let idempotence = linalg::norm(&drift).max(linalg::norm(&again.xi.values)) / scale;
    let relative = out.residuals.max() / scale;
    let passed = relative <= tol && idempotence <= tol;
    let r = out.residuals;
    let mut t = Table::new(&[
        "mesh", "alpha", "edges", "alpha_norm", "interior", "boundary", "flux", "reconstruction", "relative_max", "idempotence", "pass",
    ])?;
    t.row(&[
        m.name().to_string(),
        alpha_spec,
        m.count(1).to_string(),
        sci(scale),
        sci(r.interior),
        sci(r.boundary),
        sci(r.flux),
        sci(r.reconstruction),
        sci(relative),
        sci(idempotence),
        passed.to_string(),
    ])?;
    Ok(Outcome { csv: t.finish()?, svg: None, passed })
}

/// `diag:a,b,...`, `random:M` (symmetric, seeded) or a JSON row list.
fn parse_operator(spec: &str, seed: u64) -> Result<DMatrix<f64>, CliError> {
    let numbers = |s: &str| -> Result<Vec<f64>, CliError> {
        s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| config_err(format!("bad number `{x}`")))).collect()
    };
    if let Some(d) = spec.strip_prefix("diag:") {
        let d = numbers(d)?;
        return Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)));
    }
    if let Some(m) = spec.strip_prefix("random:") {
        let m: usize = m.trim().parse().map_err(|_| config_err(format!("bad size `{m}`")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
        return Ok((&a + a.transpose()) * 0.5);
    }
    let rows: Vec<Vec<f64>> = serde_json::from_str(spec).map_err(|e| config_err(format!("operator `{spec}`: {e}")))?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(config_err("operator must be a nonempty square matrix"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn aps_index(config: &ScenarioConfig) -> Result<Outcome, CliError> {
    let l = parse_operator(required(&config.l, "L", "aps")?, config.seed())?;
    let model = SpectralModel::from_symmetric(l.clone(), Provenance::Synthetic).map_err(module_err("spectral"))?;
    let proj_name = config.proj.as_deref().unwrap_or("nonpositive");
    let projection = match proj_name {
        "nonpositive" => model.nonpositive_projection(),
        "all" => model.projection(Interval::all()),
        other => match other.strip_prefix("below:").map(str::parse::<f64>) {
            Some(Ok(c)) => model.projection(Interval::below(c)),
            _ => return Err(config_err(format!("unknown projection `{other}`"))),
        },
    };
    let steps = config.res.unwrap_or(32);
    let problem = BoundaryValueProblem::new(l, 1.0, steps, projection).map_err(module_err("aps"))?;
    let report = aps::numeric_index(&problem).map_err(module_err("aps"))?;
    let tol = model.zero_tolerance();
    let positive = model.eigenvalues().iter().filter(|&&x| x > tol).count();
    let passed = proj_name != "nonpositive" || report.index == positive as i64;
    let mut t = Table::new(&["size", "steps", "projection", "projection_rank", "kernel", "cokernel", "index", "positive_eigenvalues", "pass"])?;
    t.row(&[
        model.dim().to_string(),
        steps.to_string(),
        proj_name.to_string(),
        problem.projection().rank().to_string(),
        report.kernel_dim.to_string(),
        report.cokernel_dim.to_string(),
        report.index.to_string(),
        positive.to_string(),
        passed.to_string(),
    ])?;
    Ok(Outcome { csv: t.finish()?, svg: None, passed })
}

fn spectral_check(config: &ScenarioConfig) -> Result<Outcome, CliError> {
    let m = load_mesh(required(&config.mesh, "mesh", "spectral")?)?;
    let tol = config.tol.unwrap_or(1e-8);
    let r = spectral::l1_negative_graph_check(&m).map_err(module_err("spectral"))?;
    let passed = r.residual <= tol && r.nonpositive_dim == r.constructed_dim;
    let mut t = Table::new(&["mesh", "vertices", "image_dim", "nonpositive_dim", "constructed_dim", "distance", "pass"])?;
    t.row(&[
        m.name().to_string(),
        r.vertex_count.to_string(),
        r.image_dim.to_string(),
        r.nonpositive_dim.to_string(),
        r.constructed_dim.to_string(),
        sci(r.residual),
        passed.to_string(),
    ])?;
    Ok(Outcome { csv: t.finish()?, svg: None, passed })
}

struct ConleySetup {
    dynamics: CubicalDynamics,
    x: CellSet,
    seed_radius: f64,
}

fn conley_setup(config: &ScenarioConfig) -> Result<ConleySetup, CliError> {
    let dim = config.dim.unwrap_or(2);
    let half_width = config.radius.unwrap_or(1.0);
    let field = fields::parse_field(required(&config.field, "field", "conley")?, dim, half_width).map_err(module_err("conley"))?;
    let grid = Grid::cube(field.dim(), half_width, config.res.unwrap_or(64)).map_err(module_err("conley"))?;
    let dynamics = conley::outer_approximation(field.as_ref(), grid, config.step.unwrap_or(0.3)).map_err(module_err("conley"))?;
    let x = dynamics.grid().all();
    Ok(ConleySetup { dynamics, x, seed_radius: config.seed_radius.unwrap_or(0.1 * half_width) })
}

fn seed_set(s: &ConleySetup, scale: f64) -> CellSet {
    s.dynamics.grid().ball(s.seed_radius * scale)
}

fn conley_row(t: &mut Table, config: &ScenarioConfig, s: &ConleySetup, label: &str, p: &IndexPair, extra: String) -> Result<(), CliError> {
    t.row(&[
        config.field.clone().unwrap_or_default(),
        label.to_string(),
        s.dynamics.grid().resolution()[0].to_string(),
        sci(s.dynamics.step()),
        p.n.len().to_string(),
        p.l.len().to_string(),
        p.validated.to_string(),
        ranks(&p.homology),
        extra,
    ])
}

fn conley_run(config: &ScenarioConfig) -> Result<Outcome, CliError> {
    let s = conley_setup(config)?;
    let d = &s.dynamics;
    let isolating = conley::is_isolating(&s.x, d);
    let action = config.action.as_deref().unwrap_or("index-pair");
    let mut t = Table::new(&["field", "pair", "res", "step", "n_cells", "l_cells", "validated", "homology", "detail"])?;
    let p1 = conley::build_index_pair(&seed_set(&s, 1.0), &CellSet::new(), &s.x, d).map_err(module_err("conley"))?;
    let passed = match action {
        "index-pair" => {
            conley_row(&mut t, config, &s, "primary", &p1, format!("isolating={isolating}"))?;
            p1.validated && isolating
        }
        "validate" => {
            let r = conley::validate_index_pair(&p1, &s.x, d);
            let detail = format!(
                "nesting={} isolation={} positive_invariance={} exit={}",
                r.nesting.len(),
                r.isolation.len(),
                r.positive_invariance.len(),
                r.exit.len()
            );
            conley_row(&mut t, config, &s, "primary", &p1, detail)?;
            r.passed()
        }
        "intersect" => {
            let p2 = conley::build_index_pair(&seed_set(&s, 2.0), &CellSet::new(), &s.x, d).map_err(module_err("conley"))?;
            let meet = conley::intersect_index_pairs(&p1, &p2, &s.x, d).map_err(module_err("conley"))?;
            let preserved = p1.homology == p2.homology && meet.homology == p1.homology;
            conley_row(&mut t, config, &s, "first", &p1, String::new())?;
            conley_row(&mut t, config, &s, "second", &p2, String::new())?;
            conley_row(&mut t, config, &s, "intersection", &meet, format!("ranks_preserved={preserved}"))?;
            meet.validated && preserved
        }
        "induced-map" => {
            let a = seed_set(&s, 1.0);
            let p2 = conley::build_index_pair(&seed_set(&s, 2.0), &CellSet::new(), &s.x, d).map_err(module_err("conley"))?;
            let report = conley::induced_map_check(CellMap::Inclusion, &a, &CellSet::new(), &p1, &p2, &s.x, d)
                .map_err(module_err("conley"))?;
            let detail = format!("ranks={} commutes={}", ranks(&report.ranks[0]), report.commutes);
            conley_row(&mut t, config, &s, "first", &p1, detail)?;
            conley_row(&mut t, config, &s, "second", &p2, format!("ranks={}", ranks(&report.ranks[1])))?;
            report.commutes
        }
        other => return Err(config_err(format!("unknown conley action `{other}`"))),
    };
    let svg = if config.svg.is_some() {
        let inv = conley::invariant_part(&s.x, d);
        Some(conley::svg::render_index_pair(d.grid(), &p1.n, &p1.l, &inv).map_err(module_err("conley"))?)
    } else {
        None
    };
    Ok(Outcome { csv: t.finish()?, svg, passed })
}

fn fda_run(config: &ScenarioConfig) -> Result<Outcome, CliError> {
    let name = required(&config.field, "field", "fda")?;
    let mut ex = fda::example(name).ok_or_else(|| config_err(format!("unknown fda field `{name}`")))?;
    if let Some(levels) = &config.levels {
        // levels are given in unscaled units; the bundled fields are time-scaled
        ex.levels = fda::parse_levels(levels)
            .map_err(module_err("fda"))?
            .into_iter()
            .map(|i| Interval::new(i.lower.unwrap() * fda::EXAMPLE_TIME_SCALE, i.upper.unwrap() * fda::EXAMPLE_TIME_SCALE))
            .collect();
    }
    if let Some(r) = config.radius {
        ex.radius = r;
    }
    if let Some(seed) = config.seed {
        ex.grid.seed = seed;
    }
    let report = fda::desuspension_stabilization(&ex.field, ex.radius, &ex.levels, &ex.grid).map_err(module_err("fda"))?;
    let first = report.levels.first().map(|l| l.shifted.clone()).unwrap_or_default();
    let stable = report.levels.iter().all(|l| l.shifted == first);
    let passed = stable && report.max_commutator_norm() == 0.0;
    let mut t = Table::new(&["field", "level", "interval", "dim", "negative", "homology", "shifted", "commutator"])?;
    for (k, l) in report.levels.iter().enumerate() {
        let shifted = l.shifted.iter().map(|(d, r)| format!("{d}:{r}")).collect::<Vec<_>>().join(" ");
        t.row(&[
            name.to_string(),
            k.to_string(),
            l.interval.clone(),
            l.dim.to_string(),
            l.negative.to_string(),
            ranks(&l.homology),
            shifted,
            sci(l.commutator_norm),
        ])?;
    }
    Ok(Outcome { csv: t.finish()?, svg: None, passed })
}
