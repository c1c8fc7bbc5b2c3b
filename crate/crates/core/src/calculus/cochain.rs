use super::{CalculusError, CylinderGrid};

/// Primal cochains live on cells; dual cochains are indexed by the primal
/// cell their dual cell crosses and come out of the Hodge star.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CochainKind {
    Primal,
    Dual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    degree: usize,
    kind: CochainKind,
    grid_hash: u64,
    values: Vec<f64>,
}

impl Cochain {
    pub fn new(grid: &CylinderGrid, degree: usize, values: Vec<f64>) -> Result<Self, CalculusError> {
        Self::with_kind(grid, degree, CochainKind::Primal, values)
    }

    /// For a dual cochain, `degree` is the dual degree `3 − k` where `k` is
    /// the degree of the primal cells used as index set.
    pub fn with_kind(
        grid: &CylinderGrid,
        degree: usize,
        kind: CochainKind,
        values: Vec<f64>,
    ) -> Result<Self, CalculusError> {
        if degree > 3 {
            return Err(CalculusError::InvalidDegree { op: "cochain", degree });
        }
        let primal = match kind {
            CochainKind::Primal => degree,
            CochainKind::Dual => 3 - degree,
        };
        let expected = grid.num_cells(primal);
        if values.len() != expected {
            return Err(CalculusError::LengthMismatch { degree, expected, got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CalculusError::NonFinite);
        }
        Ok(Self { degree, kind, grid_hash: grid.hash(), values })
    }

    pub fn zeros(grid: &CylinderGrid, degree: usize) -> Self {
        Self::new(grid, degree, vec![0.0; grid.num_cells(degree)]).expect("valid degree")
    }

    /// 0-cochain sampling `f` at the vertices.
    pub fn from_vertex_fn(grid: &CylinderGrid, f: impl Fn([f64; 3]) -> f64) -> Result<Self, CalculusError> {
        let values = (0..grid.num_vertices()).map(|i| f(grid.vertex_position(grid.cell(0, i).1))).collect();
        Self::new(grid, 0, values)
    }

    pub(crate) fn from_parts(degree: usize, kind: CochainKind, grid_hash: u64, values: Vec<f64>) -> Self {
        Self { degree, kind, grid_hash, values }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> CochainKind {
        self.kind
    }

    pub fn grid_hash(&self) -> u64 {
        self.grid_hash
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn check_grid(&self, grid: &CylinderGrid) -> Result<(), CalculusError> {
        if self.grid_hash != grid.hash() {
            return Err(CalculusError::GridMismatch);
        }
        Ok(())
    }

    pub(crate) fn require_primal(&self, op: &'static str) -> Result<(), CalculusError> {
        if self.kind != CochainKind::Primal {
            return Err(CalculusError::WrongKind { op, expected: "primal" });
        }
        Ok(())
    }
}
