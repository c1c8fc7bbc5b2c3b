use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{
    ConfigError, Formulation, InitialConfig, Mode, ScenarioConfig, SourceConfig,
};
use super::suites::{calculus_suite, operator_suite};
use super::VerificationReport;
use crate::calculus::{io as cochain_io, AxisKind, CylinderGrid, VectorField};
use crate::linalg::weighted_skew_defect;
use crate::wave::cartesian::{friedrichs_cartesian_simulate, CartesianScenario, CartesianSystem};
use crate::wave::output::{write_spectral_csv, write_trajectory_csv};
use crate::wave::pressure::second_order_pressure_residual;
use crate::wave::transform::{manifold_m0, BiIsotropic};
use crate::wave::{
    simulate, DriftSpec, EvoSystem, ProductSpace, SimulationOptions, StepRecord, SupportProbe, WaveError,
};

/// Skew defect tolerance for the assembled generator.
const SKEW_TOL: f64 = 1e-10;
const COMMUTATION_TOL: f64 = 1e-12;
/// Relative energy band for unforced Cartesian runs.
const ENERGY_BAND: f64 = 1e-6;
/// Discretization slack on the weighted bound.
const WEIGHTED_SLACK: f64 = 1.05;

#[derive(Debug)]
pub enum ScenarioError {
    Config(ConfigError),
    Numerical(String),
    Io(String),
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioError::Config(e) => write!(f, "{e}"),
            ScenarioError::Numerical(m) => write!(f, "numerical failure: {m}"),
            ScenarioError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl ScenarioError {
    /// 2 for configuration and i/o problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) | ScenarioError::Io(_) => 2,
            ScenarioError::Numerical(_) => 3,
        }
    }
}

impl From<ConfigError> for ScenarioError {
    fn from(e: ConfigError) -> Self {
        ScenarioError::Config(e)
    }
}

impl From<WaveError> for ScenarioError {
    fn from(e: WaveError) -> Self {
        match e {
            WaveError::Io(m) => ScenarioError::Io(m),
            other => ScenarioError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for ScenarioError {
    fn from(e: std::io::Error) -> Self {
        ScenarioError::Io(e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Config(ConfigError::Invalid(vec![msg.into()]))
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: VerificationReport,
    /// Files written, in creation order.
    pub artifacts: Vec<PathBuf>,
}

impl RunOutcome {
    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            0
        } else {
            1
        }
    }
}

/// Runs the scenario and writes its artifacts into `out_dir`.
pub fn run(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunOutcome, ScenarioError> {
    fs::create_dir_all(out_dir)?;
    let mut artifacts = Vec::new();
    let report = match cfg.mode {
        Mode::VerifyOperators => operator_suite(cfg.seed, cfg.verify.cases)
            .map_err(|e| ScenarioError::Numerical(e.to_string()))?,
        Mode::VerifyCalculus => {
            let spec = cfg.grid.as_ref().ok_or_else(|| invalid("section [grid] is required"))?;
            calculus_suite(spec, cfg.verify.levels, cfg.verify.pairs, cfg.seed)
                .map_err(|e| ScenarioError::Numerical(e.to_string()))?
        }
        Mode::SimulateManifold => run_manifold(cfg, out_dir, &mut artifacts)?,
        Mode::SimulateCartesian => run_cartesian(cfg, out_dir, &mut artifacts)?,
    };
    let txt = out_dir.join("report.txt");
    fs::write(&txt, report.to_text())?;
    artifacts.push(txt);
    let csv = out_dir.join("report.csv");
    report.write_csv(BufWriter::new(File::create(&csv)?)).map_err(|e| ScenarioError::Io(e.to_string()))?;
    artifacts.push(csv);
    Ok(RunOutcome { report, artifacts })
}

fn run_manifold(cfg: &ScenarioConfig, out_dir: &Path, artifacts: &mut Vec<PathBuf>) -> Result<VerificationReport, ScenarioError> {
    let spec = cfg.grid.ok_or_else(|| invalid("section [grid] is required"))?;
    let time = cfg.time.ok_or_else(|| invalid("section [time] is required"))?;
    let grid = CylinderGrid::new(spec).map_err(|e| invalid(e.to_string()))?;
    let space = ProductSpace::new(grid.clone(), cfg.degree)?;
    let mut report = VerificationReport::new(format!(
        "simulate_manifold (degree {}, {}x{}x{} cells, seed {})",
        cfg.degree, spec.cells[0], spec.cells[1], spec.cells[2], cfg.seed
    ));
    let vertices: Vec<[f64; 3]> = (0..grid.num_vertices()).map(|i| grid.vertex_position(grid.cell(0, i).1)).collect();
    let sample = |f: &super::config::Field| -> Vec<f64> { vertices.iter().map(|&x| f.eval(x, 0.0)).collect() };
    let m1v = sample(&cfg.material.m1);
    let m1 = space.vertex_field_operator(&m1v, &m1v);

    let system = match cfg.drift.formulation {
        Formulation::Direct => {
            let field = VectorField::from_fn(&grid, |x| cfg.drift.field_at(x)).map_err(|e| invalid(format!("drift: {e}")))?;
            let defect = field.wall_normal_defect(&grid);
            if defect > 0.0 {
                return Err(invalid(format!(
                    "drift field crosses the walled cross-section (normal component up to {defect:.3e}); it must be tangent to the walls"
                )));
            }
            let alpha = sample(&cfg.drift.alpha);
            let m0v = sample(&cfg.material.m0);
            let m0 = space.vertex_field_operator(&m0v, &m0v);
            report.note("formulation", "direct");
            EvoSystem::assemble(space.clone(), &DriftSpec::new(field, alpha), m0, m1)?
        }
        Formulation::BiIsotropic => {
            let v0 = cfg.drift.mach.unwrap_or(0.0);
            let t = BiIsotropic::new(v0)?;
            report.note("formulation", format!("bi_isotropic, v0 = {v0}"));
            let ev = t.eigenvalues();
            report.note("transform M0 eigenvalues", format!("{:.6} {:.6} {:.6} {:.6}", ev[0], ev[1], ev[2], ev[3]));
            if let Some(w) = t.warning() {
                report.note("warning", &w);
            }
            let m0 = manifold_m0(&space, v0)?;
            let zero = VectorField::constant(&grid, [0.0; 3]);
            let drift = DriftSpec::new(zero, vec![0.0; grid.num_vertices()]);
            EvoSystem::assemble(space.clone(), &drift, m0, m1).map_err(|e| match (e, t.warning()) {
                (WaveError::NotPositive(l), Some(w)) => ScenarioError::Numerical(format!("{}; {w}", WaveError::NotPositive(l))),
                (e, _) => e.into(),
            })?
        }
    };

    let rho = time.rho.unwrap_or(2.0 * system.rho0());
    report.check("generator skew-adjointness", "M(D + A) + (D + A)ᵀM = 0", system.skew_defect(), SKEW_TOL);
    report.check("material commutation", "M₀α = αM₀", system.commutation_residual(), COMMUTATION_TOL);
    report.check_at_least("coercivity at rho", "ρc − ‖sym M̃₁‖ > 0", system.coercivity(rho), 0.0);

    let n = space.len();
    let [nu, _] = space.sizes();
    let positions = space.positions();
    let measures = space.measures();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut origin = [0, 1, 2].map(|a| 0.5 * spec.lengths[a]);
    let u0: Vec<f64> = match &cfg.initial {
        InitialConfig::Zero => vec![0.0; n],
        InitialConfig::Random { amplitude } => (0..n).map(|_| amplitude * rng.gen_range(-1.0..=1.0)).collect(),
        InitialConfig::Pulse { position, amplitude } => {
            if let Some(p) = position {
                origin = *p;
            }
            let target = origin;
            let nearest = (0..nu)
                .min_by(|&a, &b| {
                    let da = dist2(&grid, positions[a], target);
                    let db = dist2(&grid, positions[b], target);
                    da.total_cmp(&db)
                })
                .ok_or_else(|| invalid("the first block has no degrees of freedom"))?;
            origin = positions[nearest];
            let mut u = vec![0.0; n];
            u[nearest] = *amplitude;
            u
        }
        InitialConfig::Expression(f) => {
            (0..n).map(|i| if i < nu { f.eval(positions[i], 0.0) * measures[i] } else { 0.0 }).collect()
        }
    };

    let steps = time.steps();
    let dt = time.dt;
    let seed = cfg.seed;
    let source = |t: f64| -> Option<Vec<f64>> {
        match &cfg.source {
            SourceConfig::None => None,
            SourceConfig::Expression(f) => {
                Some((0..n).map(|i| if i < nu { f.eval(positions[i], t) * measures[i] } else { 0.0 }).collect())
            }
            SourceConfig::Random { amplitude } => {
                let step = (t / dt).floor() as u64;
                let mut r = ChaCha8Rng::seed_from_u64(seed ^ step.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                Some((0..n).map(|_| amplitude * r.gen_range(-1.0..=1.0)).collect())
            }
        }
    };
    let mut opts = SimulationOptions::new(dt, steps);
    opts.rho = rho;
    opts.solver = cfg.solver;
    opts.snapshot_every = cfg.diagnostics.snapshot_every;
    opts.probe = cfg.diagnostics.support_threshold.map(|threshold| SupportProbe { origin, threshold });
    let result = simulate(&system, &u0, &source, &opts)?;

    if !matches!(cfg.source, SourceConfig::None) {
        let w = result.weighted;
        report.check(
            "weighted well-posedness bound",
            "‖u‖_ρ ≤ ‖F‖_ρ / (ρc − ‖sym M̃₁‖)",
            w.ratio() * w.coercivity,
            WEIGHTED_SLACK,
        );
    }
    report.note("c", format!("{:.6e}", system.c()));
    report.note("rho0", format!("{:.6e}", system.rho0()));
    report.note("rho", format!("{rho:.6e}"));
    report.note("sym M1_tilde norm", format!("{:.6e}", system.sym_m1_tilde_norm()));
    report.note("steps", steps);
    let e0 = result.records[0].energy;
    if e0 > 0.0 {
        let drift = result.records.iter().map(|r| ((r.energy - e0) / e0).abs()).fold(0.0, f64::max);
        report.note("max relative energy change", format!("{drift:.6e}"));
    }
    if opts.probe.is_some() {
        let last = result.records.last().expect("initial record");
        report.note("final support radius", format!("{:.6e}", last.support_radius));
    }
    report.note("max solver residual", format!("{:.3e}", result.max_solver_residual));

    let path = out_dir.join("trajectory.csv");
    write_trajectory_csv(BufWriter::new(File::create(&path)?), &result.records)?;
    artifacts.push(path);
    if !result.snapshots.is_empty() {
        let dir = out_dir.join("snapshots");
        fs::create_dir_all(&dir)?;
        for (step, x) in &result.snapshots {
            let (u, w) = space.unpack(x);
            for (tag, c) in [("u", &u), ("w", &w)] {
                let path = dir.join(format!("step_{step:06}_{tag}.bin"));
                let mut f = BufWriter::new(File::create(&path)?);
                cochain_io::write_binary(&mut f, c).map_err(|e| ScenarioError::Io(e.to_string()))?;
                artifacts.push(path);
            }
        }
    }
    Ok(report)
}

fn dist2(grid: &CylinderGrid, a: [f64; 3], b: [f64; 3]) -> f64 {
    let l = grid.lengths();
    (0..3)
        .map(|i| {
            let mut d = (a[i] - b[i]).abs();
            if grid.axis_kind(i) == AxisKind::Periodic {
                d = d.rem_euclid(l[i]);
                d = d.min(l[i] - d);
            }
            d * d
        })
        .sum()
}

fn run_cartesian(cfg: &ScenarioConfig, out_dir: &Path, artifacts: &mut Vec<PathBuf>) -> Result<VerificationReport, ScenarioError> {
    let spec = cfg.grid.ok_or_else(|| invalid("section [grid] is required"))?;
    let time = cfg.time.ok_or_else(|| invalid("section [time] is required"))?;
    let v0 = cfg.drift.mach.unwrap_or(0.0);
    let scenario = CartesianScenario {
        grid: spec,
        v0,
        dt: time.dt,
        steps: time.steps(),
        order: cfg.cartesian.order,
        solver: cfg.solver,
        modes: cfg.cartesian.modes.clone(),
    };
    let expr = match &cfg.source {
        SourceConfig::Expression(f) => Some(f.clone()),
        _ => None,
    };
    let g = expr.as_ref().map(|f| move |x: [f64; 3], t: f64| f.eval(x, t));
    let source: Option<&dyn Fn([f64; 3], f64) -> f64> = g.as_ref().map(|g| g as &dyn Fn([f64; 3], f64) -> f64);

    let mut report = VerificationReport::new(format!(
        "simulate_cartesian (v0 = {v0}, {}x{}x{} cells, {} steps)",
        spec.cells[0], spec.cells[1], spec.cells[2], scenario.steps
    ));
    let system = CartesianSystem::new(spec, v0, scenario.order)?;
    let defect = weighted_skew_defect(system.operator(), &vec![1.0; system.len()]);
    report.check("symbol skewness", "v₀∂₃ + [[0, div], [grad, 0]] skew for every v₀", defect, SKEW_TOL);

    let outcome = friedrichs_cartesian_simulate(&scenario, source)?;
    if source.is_none() {
        report.check("energy conservation", "E(t) = E(0) for every v₀", outcome.energy_ratio() - 1.0, ENERGY_BAND);
    }
    let worst = outcome.spectral.iter().map(|l| l.rel_error).fold(0.0, f64::max);
    report.note("energy max/min", format!("{:.12}", outcome.energy_ratio()));
    if !outcome.spectral.is_empty() {
        report.note("max spectral rel_error", format!("{worst:.6e}"));
    }

    let records: Vec<StepRecord> = outcome
        .energies
        .iter()
        .enumerate()
        .map(|(step, &energy)| StepRecord {
            step,
            time: step as f64 * scenario.dt,
            energy,
            weighted_norm: f64::NAN,
            support_radius: f64::NAN,
        })
        .collect();
    let path = out_dir.join("trajectory.csv");
    write_trajectory_csv(BufWriter::new(File::create(&path)?), &records)?;
    artifacts.push(path);
    let path = out_dir.join("spectral.csv");
    write_spectral_csv(BufWriter::new(File::create(&path)?), &outcome.spectral)?;
    artifacts.push(path);

    if cfg.cartesian.pressure_residual {
        let history = second_order_pressure_residual(&scenario, source)?;
        if let Some(&(_, r)) = history.last() {
            report.note("final pressure residual", format!("{r:.6e}"));
        }
        let path = out_dir.join("pressure_residual.csv");
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
        let io = |e: csv::Error| ScenarioError::Io(e.to_string());
        w.write_record(["time", "residual"]).map_err(io)?;
        for (t, r) in history {
            w.write_record([t.to_string(), r.to_string()]).map_err(io)?;
        }
        w.flush()?;
        artifacts.push(path);
    }
    Ok(report)
}
