//! Sentences as low-rank subspaces of word-vector space.
//!
//! A sentence is embedded by stacking the vectors of its content words and
//! keeping the span of the leading principal directions. Two sentences are
//! compared through the principal angles between their subspaces:
//! `score = √(Σ cos²θₜ)`. The crate also ships the averaged-vector baseline,
//! an STS evaluation harness (Pearson × 100 per dataset) and an energy study
//! showing how much of a sentence matrix a rank-N subspace captures.
//!
//! Interchangeable parts are selected by name at runtime:
//! [`method::method_registry`] holds the similarity methods and
//! [`linalg::svd_registry`] the SVD kernels.
//!
//! ```
//! use subspace_sts::embedding::EmbeddingStore;
//! use subspace_sts::method::{build_method, MethodOptions};
//! use subspace_sts::text::TextPipeline;
//!
//! let text = "cat 1 0 0\ndog 0.9 0.1 0\ntree 0 0 1\n";
//! let (store, _) = EmbeddingStore::read_glove_text(text.as_bytes(), None).unwrap();
//! let pipeline = TextPipeline::default();
//! let method = build_method("subspace:2", &MethodOptions::default()).unwrap();
//! let a = pipeline.prepare("The cat and the tree");
//! let b = pipeline.prepare("A dog near a tree");
//! let result = method.score(&a, &b, &store).unwrap();
//! // Shared direction `tree`, plus cat vs dog at cos² = 0.81 / 0.82.
//! let expected = (1.0f64 + 0.81 / 0.82).sqrt();
//! assert!((result.score - expected).abs() < 1e-6);
//! ```

pub mod analysis;
pub mod commands;
pub mod config;
pub mod embedding;
pub mod error;
pub mod linalg;
pub mod method;
pub mod registry;
pub mod representation;
pub mod sts;
pub mod text;

pub use config::{Fingerprint, OutputFormat, RunConfig};
pub use embedding::{EmbeddingFormat, EmbeddingStore, LoadReport};
pub use error::{Error, Result};
pub use method::{build_method, MethodOptions, SimilarityMethod};
pub use representation::{AverageRep, SimilarityResult, SubspaceRep};
pub use text::{TextPipeline, TokenizedSentence};
