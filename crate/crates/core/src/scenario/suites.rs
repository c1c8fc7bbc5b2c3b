//! Randomized verification suites behind the `verify_*` modes.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{
    hodge_star, inner_product, lie_matrix, AxisKind, CalculusError, Cochain, CylinderGrid, GridSpec, Variant,
    VectorField,
};
use crate::linalg::{weighted_dot, weighted_skew_defect};
use crate::operator::{
    check_accretivity, condition_number, resolvent, resolvent_transmutator_family, transmutator_adjoint_residual,
    verify_resolvent_commutator, verify_skew_decomposition, verify_sum_theorem, verify_weak_equals_strong,
    AccretivityVerdict, OperatorError, OperatorMatrix, OperatorSampler,
};

use super::VerificationReport;

/// Cases drawn with `cond(1 + ηC)` above this are redrawn.
const MAX_CONDITION: f64 = 1e8;
const IDENTITY_TOL: f64 = 1e-12;
const SUM_SCHEDULE: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Runs every operator identity on `cases` random draws each.
pub fn operator_suite(seed: u64, cases: usize) -> Result<VerificationReport, OperatorError> {
    let mut s = OperatorSampler::new(seed);
    let mut report = VerificationReport::new(format!("operator identities (seed {seed}, {cases} cases per check)"));

    let (mut res, mut abs, mut slow_decay, mut redraws) = (0.0f64, 0.0f64, 0usize, 0usize);
    for _ in 0..cases {
        let (c, alpha, eta) = loop {
            let n = s.size(3, 8);
            let eps = s.scale();
            let c = s.quasi_skew(n, eps).op;
            let alpha = s.symmetric(n);
            let eta = s.real(0.01, 1.0);
            let shifted = DMatrix::identity(n, n) + c.entries() * eta;
            if condition_number(&shifted) <= MAX_CONDITION {
                break (c, alpha, eta);
            }
            redraws += 1;
        };
        let check = verify_resolvent_commutator(&c, &alpha, eta)?;
        res = res.max(check.relative_residual());
        abs = abs.max(check.residual);
        if !check.decays_linearly() {
            slow_decay += 1;
        }
    }
    // relative to max(1, η‖(1+ηC)⁻¹‖²‖[α,C]‖)
    report.check("resolvent commutator", "[(1+ηC)⁻¹,α] = η(1+ηC)⁻¹[α,C](1+ηC)⁻¹", res, IDENTITY_TOL);
    report.note("resolvent commutator absolute residual", format!("{abs:.3e}"));
    report.check(
        "resolvent commutator decay",
        "‖[(1+ηC)⁻¹,α]‖ = O(η), η = 1e-1…1e-4",
        slow_decay as f64,
        0.0,
    );
    report.note("resolvent commutator redraws", redraws);

    let mut res: f64 = 0.0;
    for i in 0..cases {
        let n = s.size(2, 8);
        let c = s.uniform(n, n);
        // every third case uses a diagonal α against a tridiagonal skew C
        let alpha = if i % 3 == 0 { s.diagonal(n, -1.0, 1.0) } else { s.uniform(n, n) };
        let c = if i % 3 == 0 { tridiagonal_skew(&mut s, n) } else { c };
        res = res.max(verify_weak_equals_strong(&c, &alpha)?.max_abs_residual());
    }
    report.check("weak equals strong", "αC = Cα + [α,C], (αC)* = α*C* + [C*,α*]", res, IDENTITY_TOL);

    let mut res: f64 = 0.0;
    for _ in 0..cases {
        let n = s.size(2, 8);
        let eps = s.scale();
        let c = s.quasi_skew(n, eps).op;
        let alpha = s.symmetric(n);
        res = res.max(verify_skew_decomposition(&alpha, &c)?.max_residual());
    }
    report.check("skew decomposition", "skew(αC) = αC − α sym(C) − ½[C*,α]", res, IDENTITY_TOL);

    let mut res: f64 = 0.0;
    for _ in 0..cases {
        let n = s.size(2, 8);
        let (l, t, r) = (s.uniform(n, n), s.uniform(n, n), s.uniform(n, n));
        res = res.max(transmutator_adjoint_residual(&l, &t, &r)?);
    }
    report.check("transmutator adjoint", "[R*,T*,L*] = −[L,T,R]*", res, IDENTITY_TOL);

    let sum_cases = cases.div_ceil(10);
    let (mut res, mut no_decay) = (0.0f64, 0usize);
    for _ in 0..sum_cases {
        let n = s.size(2, 5);
        let (gu, gw) = (s.skew(n), s.skew(n));
        let eps = s.scale();
        let c = s.symmetric(2 * n).scale(eps);
        let d = s.skew(2 * n);
        let family = resolvent_transmutator_family(&gu, &gw, &SUM_SCHEDULE)?;
        let probes: Vec<_> = (0..4).map(|_| s.vector(2 * n)).collect();
        let sum = verify_sum_theorem(&c, &d, &family, &probes)?;
        res = res.max(sum.max_adjoint_residual());
        if !sum.decay_observed() {
            no_decay += 1;
        }
    }
    report.check("sum transmutator adjoint", "[R_ε*,(C+D)*,L_ε*] = −[L_ε,C+D,R_ε]*", res, IDENTITY_TOL);
    report.check("sum transmutator decay", "‖[L_ε,C+D,R_ε]*x‖ → 0 as ε → 0", no_decay as f64, 0.0);

    let (mut excess, mut strong): (f64, f64) = (0.0, 0.0);
    for _ in 0..cases {
        let n = s.size(2, 8);
        let skew = s.skew(n);
        let eta = s.real(0.0, 10.0);
        let r = resolvent(&skew, eta)?;
        excess = excess.max(r.spectral_norm() - 1.0);

        let eps = s.scale();
        let c = s.quasi_skew(n, eps).op;
        let eta = s.real(1e-4, 0.1);
        let r = resolvent(&c, eta)?;
        let x = s.vector(n);
        let lhs = (r.apply(&x) - &x).norm();
        let rhs = eta * r.spectral_norm() * c.apply(&x).norm();
        strong = strong.max((lhs - rhs) / rhs.max(f64::MIN_POSITIVE));
    }
    report.check("skew resolvent contraction", "‖(1+ηC)⁻¹‖ ≤ 1 for C* = −C", excess.max(0.0), IDENTITY_TOL);
    report.check("resolvent strong convergence", "‖(1+ηC)⁻¹x − x‖ ≤ η‖(1+ηC)⁻¹‖‖Cx‖", strong.max(0.0), IDENTITY_TOL);

    let (mut over, mut wrong) = (0.0f64, 0usize);
    for _ in 0..sum_cases {
        let n = s.size(2, 8);
        let skew = s.skew(n);
        let b = s.symmetric(n);
        let eta0 = s.real(0.1, 1.0);
        let target = s.real(0.1, 0.9) / eta0;
        let b = b.scale(target / b.spectral_norm().max(f64::MIN_POSITIVE));
        let bound = 1.0 / (1.0 - eta0 * b.spectral_norm());
        let rep = check_accretivity(&skew.add(&b)?, eta0, 16)?;
        if rep.verdict == AccretivityVerdict::Neither {
            wrong += 1;
        }
        over = over.max((rep.resolvent_norm_sup - bound) / bound);
    }
    report.check(
        "quasi-m-accretive resolvent bound",
        "sup_{η≤η₀} ‖(1+ηC)⁻¹‖ ≤ 1/(1 − η₀‖B‖)",
        over.max(0.0),
        IDENTITY_TOL,
    );
    report.check("quasi-m-accretive verdict", "C = S + B, ‖B‖ < 1/η₀", wrong as f64, 0.0);
    Ok(report)
}

fn tridiagonal_skew(s: &mut OperatorSampler, n: usize) -> OperatorMatrix {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        let v = s.real(-1.0, 1.0);
        m[(i, i + 1)] = v;
        m[(i + 1, i)] = -v;
    }
    OperatorMatrix::new(m).expect("finite")
}

/// Pairing and isometry tolerance.
const PAIRING_TOL: f64 = 1e-13;
const CARTAN_TOL: f64 = 1e-12;
/// Minimum observed order of the Lie derivative along `e₃` on smooth data.
const LIE_ORDER_MIN: f64 = 1.8;

/// Exactness checks of the discrete calculus on `base` and `levels − 1`
/// successive doublings of it, with `pairs` random samples per check.
pub fn calculus_suite(
    base: &GridSpec,
    levels: usize,
    pairs: usize,
    seed: u64,
) -> Result<VerificationReport, CalculusError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerificationReport::new(format!("exterior calculus (seed {seed}, {pairs} samples per check)"));
    let mut lie_errors = Vec::new();
    for level in 0..levels.max(1) {
        let grid = CylinderGrid::new(base.refined(1 << level))?;
        let [nx, ny, nz] = grid.cells_per_axis();
        let tag = format!("{nx}x{ny}x{nz}");

        let mut dd: f64 = 0.0;
        for variant in [Variant::Full, Variant::Dirichlet] {
            for k in 0..2 {
                let prod = grid.exterior_matrix(k + 1, variant).matmul(&grid.exterior_matrix(k, variant));
                dd = dd.max(prod.max_abs());
            }
        }
        report.check(format!("dd = 0 on {tag}"), "d_{k+1} d_k = 0", dd, 0.0);

        let mut pairing: f64 = 0.0;
        for variant in [Variant::Full, Variant::Dirichlet] {
            for k in 0..3 {
                let d = grid.exterior_matrix(k, variant);
                let dstar = grid.codifferential_matrix(k, variant);
                let (mk, mk1) = (grid.mass_for(k, variant), grid.mass_for(k + 1, variant));
                for _ in 0..pairs {
                    let a = random_vec(&mut rng, d.ncols());
                    let b = random_vec(&mut rng, d.nrows());
                    let da = d.mul_vec(&a);
                    let lhs = weighted_dot(&da, &b, &mk1);
                    let rhs = weighted_dot(&a, &dstar.mul_vec(&b), &mk);
                    let scale = weighted_dot(&da, &da, &mk1).sqrt() * weighted_dot(&b, &b, &mk1).sqrt();
                    pairing = pairing.max(relative(lhs - rhs, scale));
                }
            }
        }
        report.check(format!("adjoint pairing on {tag}"), "⟨dS,T⟩ = ⟨S,d*T⟩", pairing, PAIRING_TOL);

        let (mut iso, mut twice): (f64, f64) = (0.0, 0.0);
        for k in 0..4 {
            for _ in 0..pairs {
                let a = Cochain::new(&grid, k, random_vec(&mut rng, grid.num_cells(k)))?;
                let b = Cochain::new(&grid, k, random_vec(&mut rng, grid.num_cells(k)))?;
                let (sa, sb) = (hodge_star(&grid, &a)?, hodge_star(&grid, &b)?);
                let lhs = inner_product(&grid, &sa, &sb)?;
                let rhs = inner_product(&grid, &a, &b)?;
                let scale = (inner_product(&grid, &a, &a)? * inner_product(&grid, &b, &b)?).sqrt();
                iso = iso.max(relative(lhs - rhs, scale));
                let back = hodge_star(&grid, &sa)?;
                let sign = if (k * (3 - k)) % 2 == 0 { 1.0 } else { -1.0 };
                for (x, y) in back.values().iter().zip(a.values()) {
                    twice = twice.max(relative(x - sign * y, y.abs().max(1.0)));
                }
            }
        }
        report.check(format!("hodge isometry on {tag}"), "⟨⋆ω,⋆η⟩ = ⟨ω,η⟩", iso, PAIRING_TOL);
        report.check(format!("double star on {tag}"), "⋆⋆ = (−1)^{k(3−k)}", twice, CARTAN_TOL);

        let mut cartan: f64 = 0.0;
        for _ in 0..pairs.clamp(1, 8) {
            let comps = [0, 1, 2].map(|_| random_vec(&mut rng, grid.num_vertices()));
            let x = VectorField::new(&grid, comps)?;
            for k in 0..3 {
                let lhs = grid.exterior_matrix(k, Variant::Full).matmul(&lie_matrix(&grid, &x, k)?);
                let rhs = lie_matrix(&grid, &x, k + 1)?.matmul(&grid.exterior_matrix(k, Variant::Full));
                let w = random_vec(&mut rng, grid.num_cells(k));
                let (a, b) = (lhs.mul_vec(&w), rhs.mul_vec(&w));
                let scale = a.iter().chain(&b).fold(0.0f64, |m, v| m.max(v.abs()));
                let diff = a.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
                cartan = cartan.max(relative(diff, scale));
            }
        }
        report.check(format!("cartan commutation on {tag}"), "d𝓛_X = 𝓛_X d", cartan, CARTAN_TOL);

        if grid.axis_kind(2) == AxisKind::Periodic {
            let e3 = VectorField::constant(&grid, [0.0, 0.0, 1.0]);
            let mut skew: f64 = 0.0;
            for k in 0..4 {
                let l = lie_matrix(&grid, &e3, k)?;
                let dofs = grid.interior(k);
                let l = if dofs.len() == grid.num_cells(k) { l } else { l.select(dofs, dofs) };
                let mass: Vec<f64> = dofs.iter().map(|&i| grid.mass(k)[i]).collect();
                skew = skew.max(weighted_skew_defect(&l, &mass) / l.max_abs().max(1.0));
            }
            report.check(format!("constant-field lie skewness on {tag}"), "M𝓛_{e₃} + 𝓛_{e₃}ᵀM = 0", skew, CARTAN_TOL);
            lie_errors.push((grid.spacing()[2], lie_axial_error(&grid)?));
        }
    }
    if lie_errors.len() >= 2 {
        let mut order = f64::INFINITY;
        for w in lie_errors.windows(2) {
            order = order.min((w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln());
        }
        report.check_at_least("lie derivative convergence order", "𝓛_{e₃}f − ∂₃f = O(h²)", order, LIE_ORDER_MIN);
    }
    Ok(report)
}

/// Max error of `𝓛_{e₃}f` against `∂₃f` for `f = sin(2πz/L_z)` at vertices.
fn lie_axial_error(grid: &CylinderGrid) -> Result<f64, CalculusError> {
    let lz = grid.lengths()[2];
    let w = 2.0 * std::f64::consts::PI / lz;
    let f = Cochain::from_vertex_fn(grid, |x| (w * x[2]).sin())?;
    let l = lie_matrix(grid, &VectorField::constant(grid, [0.0, 0.0, 1.0]), 0)?;
    let got = l.mul_vec(f.values());
    let mut err: f64 = 0.0;
    for (i, g) in got.iter().enumerate() {
        let z = grid.vertex_position(grid.cell(0, i).1)[2];
        err = err.max((g - w * (w * z).cos()).abs());
    }
    Ok(err)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff.abs() / scale
    } else {
        diff.abs()
    }
}

