//! Dense SVD kernels and the subspace operations built on them.

mod gram;
mod jacobi;
mod pca;

use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub use gram::GramEigen;
pub use jacobi::OneSidedJacobi;
pub use pca::{
    basis_from_svd, captured_energy, center_columns, energy_fraction, numerical_rank,
    principal_angle_cosines, top_components, OrthonormalBasis, RANK_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::registry::Registry;

/// Thin singular value decomposition `A = U · diag(sigma) · Vᵀ`.
///
/// For `A` of shape `d × m` and `k = min(d, m)`: `u` is `d × k`, `v` is
/// `m × k`, both with orthonormal columns, and `sigma` is descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.u
            * DMatrix::from_diagonal(&DVector::from_column_slice(&self.sigma))
            * self.v.transpose()
    }
}

/// A singular value decomposition algorithm.
pub trait SvdBackend: Send + Sync + Debug {
    fn name(&self) -> &'static str;

    /// Decomposes a finite, non-empty matrix.
    fn decompose(&self, a: &DMatrix<f64>) -> Result<Svd>;
}

pub type SvdFactory = fn() -> Arc<dyn SvdBackend>;

/// Registry of the built-in SVD kernels.
pub fn svd_registry() -> Registry<SvdFactory> {
    let mut reg: Registry<SvdFactory> = Registry::new("svd backend");
    reg.register(
        "jacobi",
        "one-sided Jacobi rotations on the stacked matrix (default, full relative accuracy)",
        || Arc::new(OneSidedJacobi::default()),
    );
    reg.register(
        "gram",
        "eigendecomposition of the small Gram matrix; faster for d >> m, accurate to ~1e-6 relative",
        || Arc::new(GramEigen::default()),
    );
    reg
}

pub fn svd_backend(name: &str) -> Result<Arc<dyn SvdBackend>> {
    svd_registry().get(name).map(|f| f())
}

pub fn default_backend() -> Arc<dyn SvdBackend> {
    Arc::new(OneSidedJacobi::default())
}

/// SVD with the default backend.
pub fn svd(a: &DMatrix<f64>) -> Result<Svd> {
    OneSidedJacobi::default().decompose(a)
}

pub(crate) fn check_input(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::EmptyInput("matrix has no rows or columns"));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(())
}

/// Sorts singular triplets by descending sigma, ties by original index.
pub(crate) fn sort_descending(sigma: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));
    order
}

/// Replaces the listed columns of `u` with unit vectors orthogonal to every
/// other column. Columns outside `missing` must already be orthonormal.
pub(crate) fn complete_orthonormal(u: &mut DMatrix<f64>, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let d = u.nrows();
    let mut filled: Vec<usize> = (0..u.ncols()).filter(|c| !missing.contains(c)).collect();
    let mut candidate = 0;
    for &col in missing {
        loop {
            assert!(candidate < d, "cannot complete orthonormal basis");
            let mut v = DVector::<f64>::zeros(d);
            v[candidate] = 1.0;
            candidate += 1;
            // Two Gram-Schmidt passes.
            for _ in 0..2 {
                for &f in &filled {
                    let proj = u.column(f).dot(&v);
                    v.axpy(-proj, &u.column(f), 1.0);
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                u.set_column(col, &(v / norm));
                filled.push(col);
                break;
            }
        }
    }
}
