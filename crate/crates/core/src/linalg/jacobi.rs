use nalgebra::DMatrix;

use super::{check_input, complete_orthonormal, sort_descending, Svd, SvdBackend};
use crate::error::{Error, Result};

/// One-sided (Hestenes) Jacobi SVD.
///
/// Plane rotations are applied to pairs of columns until every pair is
/// orthogonal to within `tolerance` relative to the product of their norms.
/// Wide inputs are handled through their transpose.
///
/// Columns whose norm drops below `negligible · ‖A‖_F` carry only rounding
/// noise; they are left unrotated and reported as exact zero singular values.
#[derive(Clone, Debug)]
pub struct OneSidedJacobi {
    pub tolerance: f64,
    pub negligible: f64,
    pub max_sweeps: usize,
}

impl Default for OneSidedJacobi {
    fn default() -> Self {
        OneSidedJacobi {
            tolerance: 1e-15,
            negligible: 1e-13,
            max_sweeps: 100,
        }
    }
}

impl OneSidedJacobi {
    /// Orthogonalizes the columns of a tall matrix in place.
    /// Returns the accumulated right rotation `V` (m × m).
    fn orthogonalize(&self, w: &mut DMatrix<f64>, floor_sq: f64) -> Result<DMatrix<f64>> {
        let (d, m) = w.shape();
        let mut v = DMatrix::<f64>::identity(m, m);
        let ws = w.as_mut_slice();
        let vs = v.as_mut_slice();

        for _ in 0..self.max_sweeps {
            let mut rotated = false;
            for i in 0..m {
                for j in (i + 1)..m {
                    let (alpha, beta, gamma) = {
                        let ci = &ws[i * d..(i + 1) * d];
                        let cj = &ws[j * d..(j + 1) * d];
                        let mut alpha = 0.0;
                        let mut beta = 0.0;
                        let mut gamma = 0.0;
                        for (x, y) in ci.iter().zip(cj) {
                            alpha += x * x;
                            beta += y * y;
                            gamma += x * y;
                        }
                        (alpha, beta, gamma)
                    };
                    if alpha <= floor_sq || beta <= floor_sq {
                        continue;
                    }
                    if gamma == 0.0 || gamma.abs() <= self.tolerance * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;

                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + 1f64.hypot(zeta));
                    let c = 1.0 / 1f64.hypot(t);
                    let s = c * t;

                    rotate(ws, d, i, j, c, s);
                    rotate(vs, m, i, j, c, s);
                }
            }
            if !rotated {
                return Ok(v);
            }
        }
        Err(Error::Numerical(format!(
            "one-sided Jacobi did not converge in {} sweeps",
            self.max_sweeps
        )))
    }

    fn decompose_tall(&self, a: &DMatrix<f64>) -> Result<Svd> {
        let (d, m) = a.shape();
        let floor = self.negligible * a.norm();
        let mut w = a.clone();
        let v_rot = self.orthogonalize(&mut w, floor * floor)?;

        let norms: Vec<f64> = (0..m)
            .map(|j| w.column(j).norm())
            .map(|n| if n <= floor { 0.0 } else { n })
            .collect();
        let order = sort_descending(&norms);

        let mut u = DMatrix::<f64>::zeros(d, m);
        let mut v = DMatrix::<f64>::zeros(m, m);
        let mut sigma = Vec::with_capacity(m);
        let mut zero_cols = Vec::new();
        for (dst, &src) in order.iter().enumerate() {
            let s = norms[src];
            sigma.push(s);
            v.set_column(dst, &v_rot.column(src));
            if s > 0.0 {
                u.set_column(dst, &(w.column(src) / s));
            } else {
                zero_cols.push(dst);
            }
        }
        complete_orthonormal(&mut u, &zero_cols);
        Ok(Svd { u, sigma, v })
    }
}

fn rotate(data: &mut [f64], len: usize, i: usize, j: usize, c: f64, s: f64) {
    let (head, tail) = data.split_at_mut(j * len);
    let ci = &mut head[i * len..(i + 1) * len];
    let cj = &mut tail[..len];
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

impl SvdBackend for OneSidedJacobi {
    fn name(&self) -> &'static str {
        "jacobi"
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
