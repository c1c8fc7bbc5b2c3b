use crate::calculus::AxisKind;
use crate::linalg::SolverOptions;

use super::{EvoSystem, MidpointStepper, ProductSpace, WaveError};

/// Domain-of-influence scan: the support radius is the largest distance from
/// `origin` of a cell whose density exceeds `threshold` times the current
/// maximum density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportProbe {
    pub origin: [f64; 3],
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOptions {
    pub dt: f64,
    pub steps: usize,
    /// Exponential weight used by the diagnostics only.
    pub rho: f64,
    pub solver: SolverOptions,
    pub probe: Option<SupportProbe>,
    /// Keep every `n`-th state (and the last).
    pub snapshot_every: Option<usize>,
}

impl SimulationOptions {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self { dt, steps, rho: 0.0, solver: SolverOptions::default(), probe: None, snapshot_every: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    /// `⟨M₀u, u⟩_G`.
    pub energy: f64,
    /// `‖u‖_ρ` accumulated over the steps so far.
    pub weighted_norm: f64,
    /// `NaN` without a probe.
    pub support_radius: f64,
}

/// Discrete weighted norms `‖v‖²_ρ = Σ dt e^{−2ρ t_{n+½}} ‖v_{n+½}‖²_G` of the
/// solution midpoints and of the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedBound {
    pub rho: f64,
    pub solution_norm: f64,
    pub source_norm: f64,
    /// `ρ c − ‖sym M̃₁‖`; the continuous estimate is
    /// `‖u‖_ρ ≤ ‖F‖_ρ / coercivity`.
    pub coercivity: f64,
}

impl WeightedBound {
    /// `‖u‖_ρ / ‖F‖_ρ`; zero without forcing.
    pub fn ratio(&self) -> f64 {
        if self.source_norm == 0.0 {
            0.0
        } else {
            self.solution_norm / self.source_norm
        }
    }

    pub fn bound(&self) -> f64 {
        1.0 / self.coercivity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub records: Vec<StepRecord>,
    pub snapshots: Vec<(usize, Vec<f64>)>,
    pub final_state: Vec<f64>,
    pub weighted: WeightedBound,
    /// Largest relative residual of the linear solves.
    pub max_solver_residual: f64,
}

/// Integrates `M₀u' + (M̃₁ + A)u = f` from `u0` with the implicit midpoint
/// rule. `source(t)` returns the forcing at time `t`, or `None` for zero;
/// it is evaluated at the step midpoints.
pub fn simulate(
    system: &EvoSystem,
    u0: &[f64],
    source: &dyn Fn(f64) -> Option<Vec<f64>>,
    opts: &SimulationOptions,
) -> Result<SimulationResult, WaveError> {
    let space = system.space();
    if u0.len() != space.len() {
        return Err(WaveError::InvalidParameter(format!(
            "initial state has {} entries, expected {}",
            u0.len(),
            space.len()
        )));
    }
    let mut stepper = MidpointStepper::new(system.m0(), &system.generator(), opts.dt, opts.solver)?;
    let geometry = opts.probe.map(|p| SupportGeometry::new(space, p));

    let mut u = u0.to_vec();
    let mut records = Vec::with_capacity(opts.steps + 1);
    let mut snapshots = Vec::new();
    let (mut sol_sq, mut src_sq) = (0.0, 0.0);
    let mut max_res: f64 = 0.0;
    let radius = |x: &[f64]| geometry.as_ref().map_or(f64::NAN, |g| g.radius(x));
    records.push(StepRecord { step: 0, time: 0.0, energy: system.energy(&u), weighted_norm: 0.0, support_radius: radius(&u) });
    if opts.snapshot_every.is_some() {
        snapshots.push((0, u.clone()));
    }

    for n in 0..opts.steps {
        let t_mid = (n as f64 + 0.5) * opts.dt;
        let f = source(t_mid);
        if let Some(f) = &f {
            if f.len() != u.len() {
                return Err(WaveError::InvalidParameter(format!("source has {} entries, expected {}", f.len(), u.len())));
            }
        }
        let next = stepper.step(&u, f.as_deref())?;
        max_res = max_res.max(stepper.last_stats().rel_residual);

        let w = opts.dt * (-2.0 * opts.rho * t_mid).exp();
        let mid: Vec<f64> = u.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        sol_sq += w * space.inner(&mid, &mid);
        if let Some(f) = &f {
            src_sq += w * space.inner(f, f);
        }
        u = next;

        let step = n + 1;
        records.push(StepRecord {
            step,
            time: step as f64 * opts.dt,
            energy: system.energy(&u),
            weighted_norm: sol_sq.sqrt(),
            support_radius: radius(&u),
        });
        if let Some(every) = opts.snapshot_every {
            if step % every.max(1) == 0 || step == opts.steps {
                snapshots.push((step, u.clone()));
            }
        }
    }

    let weighted = WeightedBound {
        rho: opts.rho,
        solution_norm: sol_sq.sqrt(),
        source_norm: src_sq.sqrt(),
        coercivity: system.coercivity(opts.rho),
    };
    Ok(SimulationResult { records, snapshots, final_state: u, weighted, max_solver_residual: max_res })
}

struct SupportGeometry {
    distances: Vec<f64>,
    measures: Vec<f64>,
    threshold: f64,
}

impl SupportGeometry {
    fn new(space: &ProductSpace, probe: SupportProbe) -> Self {
        let grid = space.grid();
        let lengths = grid.lengths();
        let distances = space
            .positions()
            .into_iter()
            .map(|x| {
                (0..3)
                    .map(|a| {
                        let mut d = (x[a] - probe.origin[a]).abs();
                        if grid.axis_kind(a) == AxisKind::Periodic {
                            d = d.rem_euclid(lengths[a]);
                            d = d.min(lengths[a] - d);
                        }
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        Self { distances, measures: space.measures(), threshold: probe.threshold }
    }

    fn radius(&self, x: &[f64]) -> f64 {
        let dens: Vec<f64> = x.iter().zip(&self.measures).map(|(v, m)| (v / m).abs()).collect();
        let max = dens.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        dens.iter()
            .zip(&self.distances)
            .filter(|(d, _)| **d > self.threshold * max)
            .map(|(_, r)| *r)
            .fold(0.0, f64::max)
    }
}
