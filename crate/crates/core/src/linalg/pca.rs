use nalgebra::{DMatrix, DVector};

use super::{Svd, SvdBackend};
use crate::error::{Error, Result};

/// Relative cutoff: singular values `σₜ ≤ RANK_TOLERANCE · σ₁` are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Largest cosine accepted before it is treated as a numerical failure rather
/// than rounding noise to be clamped to 1.
const COSINE_SLACK: f64 = 1e-8;

/// Orthonormal basis of a principal subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    /// `dim × rank`, orthonormal columns.
    pub columns: DMatrix<f64>,
    /// Squared singular values of the retained components, descending.
    pub component_energy: Vec<f64>,
}

impl OrthonormalBasis {
    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn rank(&self) -> usize {
        self.columns.ncols()
    }

    /// Builds a basis from explicit columns. The caller guarantees orthonormality.
    pub fn from_columns(columns: DMatrix<f64>, component_energy: Vec<f64>) -> Self {
        debug_assert_eq!(columns.ncols(), component_energy.len());
        OrthonormalBasis {
            columns,
            component_energy,
        }
    }
}

/// Number of singular values above the relative rank cutoff.
pub fn numerical_rank(sigma: &[f64]) -> usize {
    match sigma.first() {
        Some(&top) if top > 0.0 => sigma.iter().filter(|&&s| s > RANK_TOLERANCE * top).count(),
        _ => 0,
    }
}

/// Fraction of `Σ σₜ²` held by the first `n` singular values.
pub fn captured_energy(sigma: &[f64], n: usize) -> f64 {
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    let top: f64 = sigma.iter().take(n).map(|s| s * s).sum();
    top / total
}

/// Subtracts the mean column from every column.
pub fn center_columns(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mean: DVector<f64> = a.column_mean();
    let mut out = a.clone();
    for mut col in out.column_iter_mut() {
        col -= &mean;
    }
    out
}

/// Flips each column so its largest-magnitude entry is positive
/// (first index wins ties).
fn canonicalize_signs(u: &mut DMatrix<f64>) {
    for mut col in u.column_iter_mut() {
        let mut best = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Leading `min(n, m, d, numerical_rank)` left singular vectors of the
/// uncentered matrix `a` (`d × m`), sign-canonicalized.
pub fn top_components(
    a: &DMatrix<f64>,
    n: usize,
    backend: &dyn SvdBackend,
) -> Result<OrthonormalBasis> {
    let svd = backend.decompose(a)?;
    basis_from_svd(&svd, n)
}

/// Basis from an existing decomposition of the stacked matrix.
pub fn basis_from_svd(svd: &Svd, n: usize) -> Result<OrthonormalBasis> {
    if n == 0 {
        return Err(Error::Config("rank must be at least 1".into()));
    }
    let n_eff = n.min(numerical_rank(&svd.sigma));
    if n_eff == 0 {
        return Err(Error::ZeroMatrix);
    }
    let mut columns = svd.u.columns(0, n_eff).into_owned();
    canonicalize_signs(&mut columns);
    let component_energy = svd.sigma[..n_eff].iter().map(|s| s * s).collect();
    Ok(OrthonormalBasis {
        columns,
        component_energy,
    })
}

/// Share of the squared Frobenius norm of `a` captured by its top `n`
/// principal directions.
pub fn energy_fraction(a: &DMatrix<f64>, n: usize, backend: &dyn SvdBackend) -> Result<f64> {
    let svd = backend.decompose(a)?;
    if svd.sigma.first().is_none_or(|&s| s == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    Ok(captured_energy(&svd.sigma, n))
}

/// Cosines of the principal angles between two subspaces: the singular
/// values of `U1ᵀ U2`, descending, `min(rank1, rank2)` of them, clamped to [0, 1].
pub fn principal_angle_cosines(
    u1: &OrthonormalBasis,
    u2: &OrthonormalBasis,
    backend: &dyn SvdBackend,
) -> Result<Vec<f64>> {
    if u1.dim() != u2.dim() {
        return Err(Error::SubspaceDimMismatch(u1.dim(), u2.dim()));
    }
    let cross = u1.columns.transpose() * &u2.columns;
    let svd = backend.decompose(&cross)?;
    let k = u1.rank().min(u2.rank());
    svd.sigma
        .iter()
        .take(k)
        .map(|&s| {
            if s > 1.0 + COSINE_SLACK {
                Err(Error::Numerical(format!(
                    "principal-angle cosine {s} exceeds 1; bases are not orthonormal"
                )))
            } else {
                Ok(s.clamp(0.0, 1.0))
            }
        })
        .collect()
}
