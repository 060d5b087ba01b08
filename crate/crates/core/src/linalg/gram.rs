use nalgebra::DMatrix;

use super::{check_input, complete_orthonormal, sort_descending, Svd, SvdBackend};
use crate::error::{Error, Result};

/// SVD through the eigendecomposition of the smaller Gram matrix.
///
/// Squaring the matrix halves the attainable relative accuracy, so singular
/// values below `cutoff · σ₁` are reported as exactly zero and their left
/// vectors are completed to an orthonormal set.
#[derive(Clone, Debug)]
pub struct GramEigen {
    pub cutoff: f64,
    pub max_sweeps: usize,
}

impl Default for GramEigen {
    fn default() -> Self {
        GramEigen {
            cutoff: 1e-6,
            max_sweeps: 100,
        }
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Returns unsorted eigenvalues and the matching eigenvector columns.
fn symmetric_eigen(mut g: DMatrix<f64>, max_sweeps: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = g.nrows();
    let mut q = DMatrix::<f64>::identity(n, n);
    for _ in 0..max_sweeps {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| g[(i, j)] * g[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| g[(i, i)] * g[(i, i)]).sum();
        if off <= 1e-30 * diag || off == 0.0 {
            return Ok(((0..n).map(|i| g[(i, i)]).collect(), q));
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = g[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (g[(r, r)] - g[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + 1f64.hypot(theta));
                let c = 1.0 / 1f64.hypot(t);
                let s = t * c;
                for k in 0..n {
                    let gkp = g[(k, p)];
                    let gkr = g[(k, r)];
                    g[(k, p)] = c * gkp - s * gkr;
                    g[(k, r)] = s * gkp + c * gkr;
                }
                for k in 0..n {
                    let gpk = g[(p, k)];
                    let grk = g[(r, k)];
                    g[(p, k)] = c * gpk - s * grk;
                    g[(r, k)] = s * gpk + c * grk;
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }
    Err(Error::Numerical(format!(
        "Jacobi eigensolver did not converge in {max_sweeps} sweeps"
    )))
}

impl GramEigen {
    fn decompose_tall(&self, a: &DMatrix<f64>) -> Result<Svd> {
        let (d, m) = a.shape();
        let (lambda, q) = symmetric_eigen(a.transpose() * a, self.max_sweeps)?;
        let order = sort_descending(&lambda);
        let top = lambda[order[0]].max(0.0).sqrt();

        let mut u = DMatrix::<f64>::zeros(d, m);
        let mut v = DMatrix::<f64>::zeros(m, m);
        let mut sigma = Vec::with_capacity(m);
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for (dst, &src) in order.iter().enumerate() {
            let s = lambda[src].max(0.0).sqrt();
            v.set_column(dst, &q.column(src));
            if s > 0.0 && s > self.cutoff * top {
                sigma.push(s);
                u.set_column(dst, &(a * q.column(src) / s));
                kept.push(dst);
            } else {
                sigma.push(0.0);
                dropped.push(dst);
            }
        }
        // Modified Gram-Schmidt over the retained columns.
        for (idx, &c) in kept.iter().enumerate() {
            for &prev in &kept[..idx] {
                let proj = u.column(prev).dot(&u.column(c));
                let prev_col = u.column(prev).clone_owned();
                u.column_mut(c).axpy(-proj, &prev_col, 1.0);
            }
            let norm = u.column(c).norm();
            u.column_mut(c).unscale_mut(norm);
        }
        complete_orthonormal(&mut u, &dropped);
        Ok(Svd { u, sigma, v })
    }
}

impl SvdBackend for GramEigen {
    fn name(&self) -> &'static str {
        "gram"
    }

    fn decompose(&self, a: &DMatrix<f64>) -> Result<Svd> {
        check_input(a)?;
        if a.nrows() >= a.ncols() {
            self.decompose_tall(a)
        } else {
            let t = self.decompose_tall(&a.transpose())?;
            Ok(Svd {
                u: t.v,
                sigma: t.sigma,
                v: t.u,
            })
        }
    }
}
