//! Sparse LU factorization backed by `faer`.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par};

use super::sparse::CsrMatrix;

pub struct SparseLu {
    n: usize,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu").field("n", &self.n).finish_non_exhaustive()
    }
}

impl SparseLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self, String> {
        assert!(a.is_square());
        // Sequential kernels keep the factors bitwise reproducible.
        faer::set_global_parallelism(Par::Seq);
        let triplets: Vec<Triplet<usize, usize, f64>> =
            a.triplets().into_iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(a.nrows(), a.ncols(), &triplets)
            .map_err(|e| format!("{e:?}"))?;
        let lu = mat.sp_lu().map_err(|e| format!("{e:?}"))?;
        Ok(Self { n: a.nrows(), lu })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let rhs = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }
}
