//! Sentence representations and their similarity scores.
//!
//! A sentence is represented either by the span of the leading principal
//! directions of its stacked word vectors, or by the plain mean of those
//! vectors (the baseline).

use nalgebra::DVector;
use serde::Serialize;

use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::linalg::{
    basis_from_svd, captured_energy, center_columns, principal_angle_cosines, OrthonormalBasis,
    SvdBackend,
};
use crate::text::{stack_vectors, TokenizedSentence};

/// Rank used when none is configured.
pub const DEFAULT_RANK: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Subspace,
    Average,
}

/// Span of a sentence's leading principal directions.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceRep {
    pub basis: OrthonormalBasis,
    pub requested_rank: usize,
    /// Number of word vectors stacked.
    pub n_words: usize,
    /// Energy fraction at the effective rank.
    pub energy_captured: f64,
}

impl SubspaceRep {
    /// Effective rank `N_eff`.
    pub fn rank(&self) -> usize {
        self.basis.rank()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AverageRep {
    /// Unnormalized mean of the word vectors.
    pub vector: DVector<f64>,
    pub n_words: usize,
}

impl AverageRep {
    pub fn is_zero_norm(&self) -> bool {
        self.vector.iter().all(|&x| x == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimilarityResult {
    pub score: f64,
    /// Principal-angle cosines; empty for the average method.
    pub sigmas: Vec<f64>,
    pub method: MethodKind,
}

/// Builds the rank-`rank` subspace of a sentence. With `center`, the mean
/// word vector is removed before the decomposition.
pub fn build_subspace(
    sent: &TokenizedSentence,
    store: &EmbeddingStore,
    rank: usize,
    center: bool,
    backend: &dyn SvdBackend,
) -> Result<SubspaceRep> {
    let (matrix, _) = stack_vectors(&sent.tokens, store);
    let n_words = matrix.ncols();
    if n_words == 0 {
        return Err(Error::Unrepresentable);
    }
    let matrix = if center {
        center_columns(&matrix)
    } else {
        matrix
    };
    let svd = backend.decompose(&matrix)?;
    let basis = match basis_from_svd(&svd, rank) {
        Ok(b) => b,
        // An all-zero (e.g. centered single-word) matrix spans nothing.
        Err(Error::ZeroMatrix) => return Err(Error::Unrepresentable),
        Err(e) => return Err(e),
    };
    let energy_captured = captured_energy(&svd.sigma, basis.rank());
    Ok(SubspaceRep {
        basis,
        requested_rank: rank,
        n_words,
        energy_captured,
    })
}

/// `√(Σ σₜ²)` over the principal-angle cosines. With `normalize`, divided by
/// `√min(N_eff₁, N_eff₂)` so the score lies in [0, 1].
pub fn subspace_similarity(
    r1: &SubspaceRep,
    r2: &SubspaceRep,
    normalize: bool,
    backend: &dyn SvdBackend,
) -> Result<SimilarityResult> {
    let sigmas = principal_angle_cosines(&r1.basis, &r2.basis, backend)?;
    let mut score = sigmas.iter().map(|s| s * s).sum::<f64>().sqrt();
    if normalize {
        score /= (sigmas.len() as f64).sqrt();
    }
    Ok(SimilarityResult {
        score,
        sigmas,
        method: MethodKind::Subspace,
    })
}

pub fn build_average(sent: &TokenizedSentence, store: &EmbeddingStore) -> Result<AverageRep> {
    let (matrix, _) = stack_vectors(&sent.tokens, store);
    if matrix.ncols() == 0 {
        return Err(Error::Unrepresentable);
    }
    Ok(AverageRep {
        vector: matrix.column_mean(),
        n_words: matrix.ncols(),
    })
}

/// Cosine of the two mean vectors.
pub fn average_similarity(a1: &AverageRep, a2: &AverageRep) -> Result<SimilarityResult> {
    if a1.vector.len() != a2.vector.len() {
        return Err(Error::SubspaceDimMismatch(a1.vector.len(), a2.vector.len()));
    }
    let n1 = a1.vector.norm();
    let n2 = a2.vector.norm();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroNormAverage);
    }
    let score = (a1.vector.dot(&a2.vector) / (n1 * n2)).clamp(-1.0, 1.0);
    Ok(SimilarityResult {
        score,
        sigmas: Vec::new(),
        method: MethodKind::Average,
    })
}
