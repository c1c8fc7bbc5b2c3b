//! Restarted GMRES with Jacobi scaling.

use super::sparse::{dot, norm2, CsrMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    pub rel_tol: f64,
    pub restart: usize,
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, restart: 60, max_iter: 3000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOutcome {
    pub iterations: usize,
    /// Final `‖b − Ax‖ / ‖b‖` of the unscaled system.
    pub rel_residual: f64,
    pub converged: bool,
}

/// Solves `a x = b` in place, starting from the contents of `x`.
pub fn gmres(a: &CsrMatrix, b: &[f64], x: &mut [f64], opts: &GmresOptions) -> GmresOutcome {
    let n = b.len();
    assert!(a.is_square() && a.nrows() == n && x.len() == n);
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return GmresOutcome { iterations: 0, rel_residual: 0.0, converged: true };
    }

    let inv_diag: Vec<f64> = a
        .diagonal_entries()
        .into_iter()
        .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let m = opts.restart.max(1);

    let mut total = 0;
    let mut r = vec![0.0; n];
    let mut ax = vec![0.0; n];
    loop {
        a.mul_vec_into(x, &mut ax);
        for i in 0..n {
            r[i] = b[i] - ax[i];
        }
        let true_res = norm2(&r) / b_norm;
        if true_res <= opts.rel_tol || total >= opts.max_iter {
            return GmresOutcome { iterations: total, rel_residual: true_res, converged: true_res <= opts.rel_tol };
        }

        // Preconditioned residual and the matching target for the inner loop.
        let z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
        let beta = norm2(&z);
        let inner_target = beta * opts.rel_tol / true_res * 0.5;

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(z.iter().map(|v| v / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;

        let mut used = 0;
        let mut w = vec![0.0; n];
        for j in 0..m {
            a.mul_vec_into(&basis[j], &mut w);
            w.iter_mut().zip(&inv_diag).for_each(|(wi, di)| *wi *= di);
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                h[i][j] = hij;
                w.iter_mut().zip(v).for_each(|(wk, vk)| *wk -= hij * vk);
            }
            let h_next = norm2(&w);
            h[j + 1][j] = h_next;

            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = h[j][j].hypot(h[j + 1][j]);
            if denom == 0.0 {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = h[j][j] / denom;
                sn[j] = h[j + 1][j] / denom;
            }
            h[j][j] = denom;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];

            used = j + 1;
            total += 1;
            if g[j + 1].abs() <= inner_target || h_next == 0.0 || total >= opts.max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / h_next).collect());
        }

        // Back substitution on the triangular Hessenberg factor.
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in i + 1..used {
                s -= h[i][k] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (k, yk) in y.iter().enumerate() {
            x.iter_mut().zip(&basis[k]).for_each(|(xi, vi)| *xi += yk * vi);
        }
    }
}
