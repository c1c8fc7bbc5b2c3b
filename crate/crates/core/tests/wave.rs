use driftwave::calculus::{CylinderGrid, GridSpec, VectorField};
use driftwave::linalg::SolverOptions;
use driftwave::wave::transform::manifold_m0;
use driftwave::wave::{simulate, DriftSpec, EvoSystem, MidpointStepper, ProductSpace, SimulationOptions, SupportProbe};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn pipe_system(m1: (f64, f64)) -> EvoSystem {
    let space = ProductSpace::new(CylinderGrid::new(GridSpec::periodic_pipe([4, 4, 8], [1.0; 3])).unwrap(), 1).unwrap();
    let field = VectorField::from_fn(space.grid(), |p| [0.0, 0.0, 1.0 + 0.5 * (TAU * p[2]).sin()]).unwrap();
    let drift = DriftSpec::new(field, vec![1.0; space.grid().num_vertices()]);
    let (m0, m1) = (space.scalar_operator(1.5, 1.5), space.scalar_operator(m1.0, m1.1));
    EvoSystem::assemble(space, &drift, m0, m1).unwrap()
}

fn random(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn midpoint_step_satisfies_discrete_energy_identity() {
    let system = pipe_system((0.2, 0.1));
    let space = system.space();
    let dt = 0.02;
    let opts = SolverOptions::default().with_tolerance(1e-13);
    let mut stepper = MidpointStepper::new(system.m0(), &system.generator(), dt, opts).unwrap();
    let mut u = random(space.len(), 1);
    for step in 0..20 {
        let f = random(space.len(), 100 + step);
        let next = stepper.step(&u, Some(&f)).unwrap();
        let mid: Vec<f64> = u.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        // E₁ − E₀ = 2dt(⟨f, ū⟩ − ⟨M̃₁ū, ū⟩); the skew part drops out.
        let predicted = 2.0 * dt * (space.inner(&f, &mid) - space.inner(&system.m1_tilde().mul_vec(&mid), &mid));
        let actual = system.energy(&next) - system.energy(&u);
        assert!((actual - predicted).abs() <= 1e-10 * system.energy(&u), "step {step}: {actual} vs {predicted}");
        u = next;
    }
}

#[test]
fn damping_makes_energy_decay() {
    let space = ProductSpace::new(CylinderGrid::new(GridSpec::torus([6; 3], [1.0; 3])).unwrap(), 1).unwrap();
    let drift = DriftSpec::new(VectorField::constant(space.grid(), [0.0, 0.0, 0.0]), vec![0.0; space.grid().num_vertices()]);
    let system =
        EvoSystem::assemble(space.clone(), &drift, space.scalar_operator(1.0, 2.0), space.scalar_operator(0.3, 0.1))
            .unwrap();
    let result = simulate(&system, &random(space.len(), 2), &|_| None, &SimulationOptions::new(0.05, 100)).unwrap();
    for w in result.records.windows(2) {
        assert!(w[1].energy < w[0].energy);
    }
}

#[test]
fn weight_only_changes_diagnostics() {
    let system = pipe_system((0.2, 0.1));
    let u0 = random(system.space().len(), 3);
    let source = |t: f64| Some(vec![(3.0 * t).sin(); system.space().len()]);
    let mut opts = SimulationOptions::new(0.01, 30);
    let plain = simulate(&system, &u0, &source, &opts).unwrap();
    opts.rho = 3.0;
    let weighted = simulate(&system, &u0, &source, &opts).unwrap();
    assert_eq!(plain.final_state, weighted.final_state);
    assert!(weighted.weighted.solution_norm < plain.weighted.solution_norm);
}

#[test]
fn time_stepping_is_second_order() {
    let system = pipe_system((0.2, 0.1));
    let space = system.space();
    let u0 = random(space.len(), 4);
    let opts = SolverOptions::default().with_tolerance(1e-13);
    let solve = |steps: usize| {
        let mut o = SimulationOptions::new(0.4 / steps as f64, steps);
        o.solver = opts;
        simulate(&system, &u0, &|t| Some(vec![t.cos(); space.len()]), &o).unwrap().final_state
    };
    let (a, b, c) = (solve(10), solve(20), solve(40));
    let diff = |x: &[f64], y: &[f64]| space.norm(&x.iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>());
    let ratio = diff(&a, &b) / diff(&b, &c);
    assert!((3.6..4.4).contains(&ratio), "ratio {ratio}");
}

#[test]
fn drift_absorbing_material_block_has_expected_bound() {
    let space = ProductSpace::new(CylinderGrid::new(GridSpec::torus([6; 3], [1.0; 3])).unwrap(), 0).unwrap();
    let drift = DriftSpec::new(VectorField::constant(space.grid(), [0.0; 3]), vec![0.0; space.grid().num_vertices()]);
    let m0 = manifold_m0(&space, 0.5).unwrap();
    let system = EvoSystem::assemble(space.clone(), &drift, m0, space.scalar_operator(0.0, 0.0)).unwrap();
    assert!((system.c() - 2.0 / 3.0).abs() < 1e-6, "c = {}", system.c());
    assert!(manifold_m0(&space, 1.0).is_err());
}

#[test]
fn state_length_is_checked() {
    let system = pipe_system((0.0, 0.0));
    assert!(simulate(&system, &[1.0, 2.0], &|_| None, &SimulationOptions::new(0.1, 1)).is_err());
}

/// The envelope (1 + max|X₀|)t + 3h at a 1e-9 relative threshold; the
/// implicit scheme and the semi-discrete flow both leave tails beyond it.
#[test]
#[ignore = "known to exceed the envelope by several cells"]
fn pulse_support_stays_inside_envelope() {
    let n = 16;
    let h = 1.0 / n as f64;
    let space = ProductSpace::new(CylinderGrid::new(GridSpec::torus([n; 3], [1.0; 3])).unwrap(), 0).unwrap();
    let drift =
        DriftSpec::new(VectorField::constant(space.grid(), [0.0, 0.0, 0.5]), vec![1.0; space.grid().num_vertices()]);
    let system =
        EvoSystem::assemble(space.clone(), &drift, space.scalar_operator(1.0, 1.0), space.scalar_operator(0.0, 0.0))
            .unwrap();
    let mut u0 = vec![0.0; space.len()];
    u0[space.grid().locate(0, 0, [(n / 2) as i64; 3]).unwrap()] = 1.0;
    let mut opts = SimulationOptions::new(h / 4.0, n);
    opts.probe = Some(SupportProbe { origin: [0.5; 3], threshold: 1e-9 });
    for r in simulate(&system, &u0, &|_| None, &opts).unwrap().records {
        assert!(r.support_radius <= 1.5 * r.time + 3.0 * h, "t = {}: radius {}", r.time, r.support_radius);
    }
}
