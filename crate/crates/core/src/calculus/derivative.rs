use super::{CalculusError, Cochain, CochainKind, CylinderGrid, Variant};

/// `dω`. The Dirichlet variant first clears the wall values of `ω`; the
/// result then vanishes on walls as well.
pub fn exterior_derivative(grid: &CylinderGrid, omega: &Cochain, variant: Variant) -> Result<Cochain, CalculusError> {
    omega.check_grid(grid)?;
    omega.require_primal("exterior derivative")?;
    let k = omega.degree();
    if k > 2 {
        return Err(CalculusError::InvalidDegree { op: "exterior derivative", degree: k });
    }
    let mut x = omega.values().to_vec();
    if variant == Variant::Dirichlet {
        grid.clear_walls(k, &mut x);
    }
    let mut y = grid.incidence(k).mul_vec(&x);
    if variant == Variant::Dirichlet {
        grid.clear_walls(k + 1, &mut y);
    }
    Ok(Cochain::from_parts(k + 1, CochainKind::Primal, grid.hash(), y))
}

/// `d*τ = M_k⁻¹ dᵀ M_{k+1} τ`, the adjoint of [`exterior_derivative`] for
/// the same variant.
pub fn codifferential(grid: &CylinderGrid, tau: &Cochain, variant: Variant) -> Result<Cochain, CalculusError> {
    tau.check_grid(grid)?;
    tau.require_primal("codifferential")?;
    let k1 = tau.degree();
    if k1 == 0 {
        return Err(CalculusError::InvalidDegree { op: "codifferential", degree: 0 });
    }
    let k = k1 - 1;
    let mut x: Vec<f64> = tau.values().iter().zip(grid.mass(k1)).map(|(v, m)| v * m).collect();
    if variant == Variant::Dirichlet {
        grid.clear_walls(k1, &mut x);
    }
    let mut y = grid.incidence(k).transpose().mul_vec(&x);
    for (v, m) in y.iter_mut().zip(grid.mass(k)) {
        *v /= m;
    }
    if variant == Variant::Dirichlet {
        grid.clear_walls(k, &mut y);
    }
    Ok(Cochain::from_parts(k, CochainKind::Primal, grid.hash(), y))
}

/// Diagonal Hodge star. Primal `k` maps to dual `3 − k` by the mass ratio;
/// dual maps back by its inverse. In three dimensions `(−1)^{k(3−k)} = 1`,
/// so applying the star twice is the identity.
pub fn hodge_star(grid: &CylinderGrid, omega: &Cochain) -> Result<Cochain, CalculusError> {
    omega.check_grid(grid)?;
    let (primal, kind) = match omega.kind() {
        CochainKind::Primal => (omega.degree(), CochainKind::Dual),
        CochainKind::Dual => (3 - omega.degree(), CochainKind::Primal),
    };
    let mass = grid.mass(primal);
    let values = omega
        .values()
        .iter()
        .zip(mass)
        .map(|(v, m)| if kind == CochainKind::Dual { v * m } else { v / m })
        .collect();
    Ok(Cochain::from_parts(3 - omega.degree(), kind, grid.hash(), values))
}

/// `⟨a, b⟩`: weights are the mass ratios for primal cochains and their
/// inverses for dual ones.
pub fn inner_product(grid: &CylinderGrid, a: &Cochain, b: &Cochain) -> Result<f64, CalculusError> {
    a.check_grid(grid)?;
    b.check_grid(grid)?;
    if a.degree() != b.degree() || a.kind() != b.kind() {
        return Err(CalculusError::Format("inner product of cochains with different degree or kind".into()));
    }
    let primal = match a.kind() {
        CochainKind::Primal => a.degree(),
        CochainKind::Dual => 3 - a.degree(),
    };
    let mass = grid.mass(primal);
    Ok(a.values()
        .iter()
        .zip(b.values())
        .zip(mass)
        .map(|((x, y), m)| if a.kind() == CochainKind::Primal { x * y * m } else { x * y / m })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::super::GridSpec;
    use super::*;

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = CylinderGrid::new(GridSpec::torus([3, 3, 3], [1.0; 3])).unwrap();
        let c = Cochain::new(&g, 0, vec![2.5; g.num_cells(0)]).unwrap();
        let dc = exterior_derivative(&g, &c, Variant::Full).unwrap();
        assert!(dc.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn axial_coordinate_differentiates_to_axial_spacing() {
        let g = CylinderGrid::new(GridSpec::truncated_pipe([2, 2, 4], [1.0, 1.0, 2.0])).unwrap();
        let z = Cochain::from_vertex_fn(&g, |p| p[2]).unwrap();
        let dz = exterior_derivative(&g, &z, Variant::Full).unwrap();
        for idx in 0..g.num_cells(1) {
            let (t, _) = g.cell(1, idx);
            let expected = if g.cell_types(1)[t].axes == [2] { 0.5 } else { 0.0 };
            assert!((dz.values()[idx] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn star_of_unit_function_is_cell_volume() {
        let g = CylinderGrid::new(GridSpec::torus([2, 4, 5], [1.0, 2.0, 3.0])).unwrap();
        let one = Cochain::new(&g, 0, vec![1.0; g.num_cells(0)]).unwrap();
        let vol = hodge_star(&g, &one).unwrap();
        assert_eq!((vol.degree(), vol.kind()), (3, CochainKind::Dual));
        assert!(vol.values().iter().all(|&v| (v - 0.5 * 0.5 * 0.6).abs() < 1e-15));
        assert_eq!(hodge_star(&g, &vol).unwrap(), one);
    }

    #[test]
    fn codifferential_rejects_degree_zero() {
        let g = CylinderGrid::new(GridSpec::torus([2; 3], [1.0; 3])).unwrap();
        let err = codifferential(&g, &Cochain::zeros(&g, 0), Variant::Full).unwrap_err();
        assert_eq!(err, CalculusError::InvalidDegree { op: "codifferential", degree: 0 });
    }
}
