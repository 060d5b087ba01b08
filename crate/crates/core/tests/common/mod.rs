//! Test-only oracles. They rely on nalgebra's own eigen/SVD routines, never
//! on the crate's Jacobi kernels.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subspace_sts::embedding::EmbeddingStore;
use subspace_sts::text::TokenizedSentence;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `d × m` matrix with i.i.d. U(-1, 1) entries.
pub fn uniform_matrix(rng: &mut ChaCha8Rng, d: usize, m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, m, |_, _| rng.gen_range(-1.0..1.0))
}

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
pub fn sorted_eigen(g: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Top-`n` eigenvectors of `A Aᵀ`: the oracle principal directions.
pub fn oracle_top_directions(a: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let (_, vectors) = sorted_eigen(a * a.transpose());
    vectors.columns(0, n).into_owned()
}

/// Eigenvalues of `Aᵀ A`, descending, clamped at zero.
pub fn oracle_gram_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    sorted_eigen(a.transpose() * a)
        .0
        .into_iter()
        .map(|l| l.max(0.0))
        .collect()
}

/// Energy fraction from oracle eigenvalues.
pub fn oracle_energy(a: &DMatrix<f64>, n: usize) -> f64 {
    let lambda = oracle_gram_eigenvalues(a);
    lambda.iter().take(n).sum::<f64>() / lambda.iter().sum::<f64>()
}

/// `‖P₁ − P₂‖_F` for the orthogonal projectors onto two column spans.
pub fn projector_distance(u1: &DMatrix<f64>, u2: &DMatrix<f64>) -> f64 {
    (u1 * u1.transpose() - u2 * u2.transpose()).norm()
}

/// Principal-angle cosines through nalgebra's SVD.
pub fn oracle_cosines(u1: &DMatrix<f64>, u2: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = (u1.transpose() * u2)
        .singular_values()
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn orthonormality_error(u: &DMatrix<f64>) -> f64 {
    (u.transpose() * u - DMatrix::identity(u.ncols(), u.ncols())).amax()
}

/// Random orthogonal `n × n` matrix (QR of a Gaussian-ish matrix).
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    uniform_matrix(rng, n, n).qr().q()
}

pub fn word(i: usize) -> String {
    format!("w{i:03}")
}

/// Store of `vocab` random words in `dim` dimensions.
pub fn toy_store(seed: u64, vocab: usize, dim: usize) -> EmbeddingStore {
    let mut rng = rng(seed);
    let entries: Vec<(String, Vec<f32>)> = (0..vocab)
        .map(|i| {
            (
                word(i),
                (0..dim).map(|_| rng.gen_range(-1.0f32..1.0)).collect(),
            )
        })
        .collect();
    EmbeddingStore::from_entries(dim, entries).unwrap().0
}

/// Sentence of `len` random words from a `vocab`-word toy store.
pub fn random_sentence(rng: &mut ChaCha8Rng, vocab: usize, len: usize) -> TokenizedSentence {
    TokenizedSentence::from_tokens((0..len).map(|_| word(rng.gen_range(0..vocab))).collect())
}

/// Stacked `f64` matrix of a sentence, built straight from store lookups.
pub fn oracle_stack(sent: &TokenizedSentence, store: &EmbeddingStore) -> DMatrix<f64> {
    let cols: Vec<Vec<f64>> = sent
        .tokens
        .iter()
        .filter_map(|t| store.lookup(t))
        .map(|v| v.iter().map(|&x| x as f64).collect())
        .collect();
    DMatrix::from_fn(store.dim(), cols.len(), |r, c| cols[c][r])
}

/// Sentence with a random length in `lo..=hi`.
pub fn sentence_between(
    rng: &mut ChaCha8Rng,
    vocab: usize,
    lo: usize,
    hi: usize,
) -> TokenizedSentence {
    let len = rng.gen_range(lo..=hi);
    random_sentence(rng, vocab, len)
}

/// Writes `store` as GloVe text under `dir`.
pub fn write_store(
    dir: &std::path::Path,
    name: &str,
    store: &EmbeddingStore,
) -> std::path::PathBuf {
    let path = dir.join(name);
    store
        .write_glove_text(std::fs::File::create(&path).unwrap())
        .unwrap();
    path
}

/// Writes an input/gold file pair and returns their paths.
pub fn write_dataset(
    dir: &std::path::Path,
    name: &str,
    pairs: &[(String, String, Option<f64>)],
) -> (std::path::PathBuf, std::path::PathBuf) {
    let input = dir.join(format!("{name}.input.txt"));
    let gs = dir.join(format!("{name}.gs.txt"));
    let mut input_text = String::new();
    let mut gs_text = String::new();
    for (a, b, g) in pairs {
        input_text.push_str(&format!("{a}\t{b}\n"));
        gs_text.push_str(&g.map(|g| g.to_string()).unwrap_or_default());
        gs_text.push('\n');
    }
    std::fs::write(&input, input_text).unwrap();
    std::fs::write(&gs, gs_text).unwrap();
    (input, gs)
}

/// Writes a manifest naming each `(name, input, gs)` triple, paths relative to `dir`.
pub fn write_manifest(dir: &std::path::Path, names: &[&str]) -> std::path::PathBuf {
    let path = dir.join("manifest.tsv");
    let text: String = names
        .iter()
        .map(|n| format!("{n}\t{n}.input.txt\t{n}.gs.txt\n"))
        .collect();
    std::fs::write(&path, format!("# toy manifest\n{text}")).unwrap();
    path
}
